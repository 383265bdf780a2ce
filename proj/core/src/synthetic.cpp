#include "ineq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"
#include "ineq/rng.hpp"

namespace ineq {

void SyntheticPopulationSpec::validate() const {
    if (population_size == 0) throw ValidationError("population_size must be positive");
    if (!(sdlog >= 0.0)) throw ValidationError("sdlog must be nonnegative");
    if (!(tail_exponent > 1.0)) throw ValidationError("tail_exponent must exceed 1 (finite mean)");
    if (!(tail_mix_weight >= 0.0 && tail_mix_weight < 1.0)) {
        throw ValidationError("tail_mix_weight must lie in [0, 1)");
    }
    if (tail_scale < 0.0) throw ValidationError("tail_scale must be nonnegative");
    if (strata_design.empty()) throw ValidationError("strata_design must list at least one bracket");
    for (std::size_t r = 0; r < strata_design.size(); ++r) {
        const auto& b = strata_design[r];
        if (!(b.sampling_rate > 0.0 && b.sampling_rate <= 1.0)) {
            throw ValidationError("sampling rate of bracket " + std::to_string(r + 1) + " must lie in (0, 1]");
        }
        if (!(b.upper > b.lower)) throw ValidationError("bracket bounds must be increasing");
        if (r > 0 && b.lower != strata_design[r - 1].upper) {
            throw ValidationError("brackets must be contiguous");
        }
        if (!(b.special_forms_prob >= 0.0 && b.special_forms_prob <= 1.0)) {
            throw ValidationError("special_forms_prob must lie in [0, 1]");
        }
        if (b.usefulness_probs.empty()) throw ValidationError("usefulness_probs must not be empty");
        for (double p : b.usefulness_probs) {
            if (!(p >= 0.0)) throw ValidationError("usefulness_probs must be nonnegative");
        }
    }
    double share_total = 0.0;
    for (const auto& a : assets) {
        if (!(a.portfolio_share >= 0.0)) throw ValidationError("portfolio_share must be nonnegative");
        if (!(a.true_rate > 0.0)) throw ValidationError("true_rate must be positive");
        if (a.top_rate && !(*a.top_rate > 0.0)) throw ValidationError("top_rate must be positive");
        if (!(a.top_fraction > 0.0 && a.top_fraction < 1.0)) throw ValidationError("top_fraction in (0,1)");
        share_total += a.portfolio_share;
    }
    if (!assets.empty() && !(share_total > 0.0)) throw ValidationError("portfolio shares sum to zero");
}

int encode_stratum(int bracket, int special_forms, int usefulness, int usefulness_levels) {
    return (bracket - 1) * 2 * usefulness_levels + special_forms * usefulness_levels + usefulness + 1;
}

std::span<const double> Population::column(const std::string& name) const {
    if (name == "income") return income;
    if (name == "wealth") return wealth;
    for (std::size_t a = 0; a < asset_names.size(); ++a) {
        if (name == "income_" + asset_names[a]) return asset_income[a];
        if (name == "holding_" + asset_names[a]) return asset_holding[a];
    }
    throw ValidationError("population has no column '" + name + "'");
}

std::vector<std::string> Population::value_columns() const {
    std::vector<std::string> out{"income", "wealth"};
    for (const auto& a : asset_names) out.push_back("income_" + a);
    for (const auto& a : asset_names) out.push_back("holding_" + a);
    return out;
}

Population generate_population(const SyntheticPopulationSpec& spec) {
    spec.validate();
    const std::size_t n = spec.population_size;
    const double tail_scale =
        spec.tail_scale > 0.0 ? spec.tail_scale : std::exp(spec.meanlog + 3.0 * spec.sdlog);

    int usefulness_levels = 1;
    for (const auto& b : spec.strata_design) {
        usefulness_levels = std::max(usefulness_levels, static_cast<int>(b.usefulness_probs.size()));
    }

    Population pop;
    pop.ids.resize(n);
    pop.income.resize(n);
    pop.wealth.resize(n);
    pop.stratum.resize(n);
    pop.bracket.resize(n);
    pop.special_forms.resize(n);
    pop.usefulness.resize(n);

    // Separate streams so adding an asset class does not perturb incomes.
    Rng income_rng(derive_seed(spec.seed, 1));
    Rng design_rng(derive_seed(spec.seed, 2));
    Rng wealth_rng(derive_seed(spec.seed, 3));

    std::vector<double> bracket_lowers;
    for (const auto& b : spec.strata_design) bracket_lowers.push_back(b.lower);

    for (std::size_t i = 0; i < n; ++i) {
        pop.ids[i] = static_cast<std::int64_t>(i + 1);
        const bool tail = spec.tail_mix_weight > 0.0 && income_rng.bernoulli(spec.tail_mix_weight);
        const double y = tail ? income_rng.pareto(tail_scale, spec.tail_exponent)
                              : income_rng.lognormal(spec.meanlog, spec.sdlog);
        pop.income[i] = y;

        // Bracket r such that lower_r <= y < upper_r; values below the first
        // lower bound fall in bracket 1.
        auto it = std::upper_bound(bracket_lowers.begin(), bracket_lowers.end(), y);
        const int r = std::max(1, static_cast<int>(it - bracket_lowers.begin()));
        const auto& b = spec.strata_design[static_cast<std::size_t>(r - 1)];
        const int flag = design_rng.bernoulli(b.special_forms_prob) ? 1 : 0;
        const int code = static_cast<int>(design_rng.categorical(b.usefulness_probs.data(), b.usefulness_probs.size()));
        pop.bracket[i] = r;
        pop.special_forms[i] = flag;
        pop.usefulness[i] = code;
        pop.stratum[i] = encode_stratum(r, flag, code, usefulness_levels);

        pop.wealth[i] = y * spec.wealth_income_ratio *
                        (spec.wealth_noise_sdlog > 0.0 ? wealth_rng.lognormal(0.0, spec.wealth_noise_sdlog) : 1.0);
    }

    const std::size_t A = spec.assets.size();
    if (A == 0) return pop;

    for (const auto& a : spec.assets) pop.asset_names.push_back(a.name);
    pop.asset_holding.assign(A, std::vector<double>(n));
    pop.asset_income.assign(A, std::vector<double>(n));

    Rng portfolio_rng(derive_seed(spec.seed, 4));
    std::vector<double> shares(A);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t a = 0; a < A; ++a) {
            const double noise =
                spec.portfolio_noise_sdlog > 0.0 ? portfolio_rng.lognormal(0.0, spec.portfolio_noise_sdlog) : 1.0;
            shares[a] = spec.assets[a].portfolio_share * noise;
            total += shares[a];
        }
        for (std::size_t a = 0; a < A; ++a) pop.asset_holding[a][i] = pop.wealth[i] * shares[a] / total;
    }

    // Ranking by total financial wealth for categories with a top-group rate.
    std::vector<std::size_t> by_wealth;
    for (std::size_t a = 0; a < A; ++a) {
        const auto& cat = spec.assets[a];
        std::vector<char> top(n, 0);
        if (cat.top_rate) {
            if (by_wealth.empty()) {
                by_wealth.resize(n);
                std::iota(by_wealth.begin(), by_wealth.end(), 0);
                std::stable_sort(by_wealth.begin(), by_wealth.end(),
                                 [&](auto x, auto y) { return pop.wealth[x] > pop.wealth[y]; });
            }
            const auto count = static_cast<std::size_t>(std::ceil(cat.top_fraction * static_cast<double>(n)));
            for (std::size_t j = 0; j < count && j < n; ++j) top[by_wealth[j]] = 1;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double rate = top[i] ? *cat.top_rate : cat.true_rate;
            pop.asset_income[a][i] = pop.asset_holding[a][i] * rate;
        }
    }
    return pop;
}

std::vector<StratumProfile> population_strata(const Population& population) {
    std::map<int, StratumProfile> by_id;
    for (std::size_t i = 0; i < population.size(); ++i) {
        auto& p = by_id[population.stratum[i]];
        p.stratum_id = population.stratum[i];
        p.income_bracket_rank = population.bracket[i];
        p.special_forms_flag = population.special_forms[i];
        p.usefulness_code = population.usefulness[i];
        ++p.size;
    }
    std::vector<StratumProfile> out;
    for (auto& [id, p] : by_id) out.push_back(p);
    return out;
}

MicrodataSet population_as_microdata(const Population& population, std::span<const std::string> variables) {
    std::vector<std::string> names =
        variables.empty() ? population.value_columns() : std::vector<std::string>(variables.begin(), variables.end());
    std::vector<std::vector<double>> cols;
    for (const auto& v : names) {
        const auto c = population.column(v);
        cols.emplace_back(c.begin(), c.end());
    }
    return MicrodataSet::from_columns(population.ids, std::vector<double>(population.size(), 1.0),
                                      population.stratum, std::move(names), std::move(cols));
}

SamplingDesign SamplingDesign::from_spec(const SyntheticPopulationSpec& spec) {
    SamplingDesign d;
    for (const auto& b : spec.strata_design) d.bracket_rates.push_back(b.sampling_rate);
    return d;
}

StratifiedSample draw_stratified_sample(const Population& population,
                                        const SamplingDesign& design,
                                        std::uint64_t seed,
                                        std::span<const std::string> variables) {
    for (double r : design.bracket_rates) {
        if (!(r > 0.0 && r <= 1.0)) throw ValidationError("sampling rates must lie in (0, 1]");
    }
    std::vector<std::string> names =
        variables.empty() ? population.value_columns() : std::vector<std::string>(variables.begin(), variables.end());
    std::vector<std::span<const double>> src;
    for (const auto& v : names) src.push_back(population.column(v));

    Rng rng(derive_seed(seed, 0x5a3d));
    std::vector<std::int64_t> ids;
    std::vector<double> weights;
    std::vector<int> strata;
    std::vector<std::vector<double>> cols(names.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        const auto r = static_cast<std::size_t>(population.bracket[i] - 1);
        if (r >= design.bracket_rates.size()) throw ValidationError("design lacks a rate for bracket " + std::to_string(r + 1));
        const double rate = design.bracket_rates[r];
        if (rate < 1.0 && !(rng.uniform() < rate)) continue;
        ids.push_back(population.ids[i]);
        weights.push_back(1.0 / rate);
        strata.push_back(population.stratum[i]);
        for (std::size_t v = 0; v < names.size(); ++v) cols[v].push_back(src[v][i]);
    }

    StratifiedSample out{
        .data = MicrodataSet::from_columns(std::move(ids), std::move(weights), std::move(strata), names, std::move(cols)),
        .strata = {},
        .warnings = {},
    };

    const auto universe = population_strata(population);
    std::map<int, std::size_t> counts;
    for (int s : out.data.strata()) ++counts[s];
    for (auto p : universe) {
        const auto it = counts.find(p.stratum_id);
        if (it == counts.end()) {
            out.warnings.push_back("stratum " + std::to_string(p.stratum_id) + " is empty in the sample");
            continue;
        }
        p.size = it->second;
        out.strata.push_back(p);
    }
    return out;
}

double oracle_top_share(std::span<const double> values, double k) {
    if (!(k > 0.0 && k < 1.0)) throw ValidationError("k must lie in (0, 1)");
    if (values.empty()) throw ValidationError("empty population");
    std::vector<double> v(values.begin(), values.end());
    for (double x : v) {
        if (!std::isfinite(x)) throw ValidationError("nonfinite value in population");
    }
    std::sort(v.begin(), v.end(), std::greater<>());

    const double n = static_cast<double>(v.size());
    const double top_units = n - k * n;  // (1-k)N, measured from the top
    CompensatedSum total;
    for (double x : v) total += x;

    CompensatedSum top;
    double taken = 0.0;
    for (double x : v) {
        if (taken + 1.0 <= top_units) {
            top += x;
            taken += 1.0;
        } else {
            top += (top_units - taken) * x;
            break;
        }
    }
    const double denom = total.value();
    if (denom == 0.0) throw NumericalError("total is zero; top share undefined");
    return top.value() / denom;
}

MicrodataSet synthesize_implicates(const MicrodataSet& single,
                                   const std::string& variable,
                                   double missing_fraction,
                                   std::size_t implicates,
                                   std::uint64_t seed) {
    if (single.implicate_count() != 1) throw ValidationError("synthesize_implicates expects one implicate");
    if (implicates < 1) throw ValidationError("need at least one implicate");
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0)) {
        throw ValidationError("missing_fraction must lie in [0, 1)");
    }
    const std::size_t n = single.size();
    const std::size_t var = single.variable_index(variable);

    Rng rng(derive_seed(seed, 0x1a9e));
    std::vector<char> missing(n, 0);
    for (std::size_t i = 0; i < n; ++i) missing[i] = rng.bernoulli(missing_fraction) ? 1 : 0;

    // Donor pools by stratum (or one pool when unstratified).
    std::map<int, std::vector<std::size_t>> donors;
    for (std::size_t i = 0; i < n; ++i) {
        if (!missing[i]) donors[single.stratified() ? single.strata()[i] : 0].push_back(i);
    }

    std::vector<MicrodataRecord> records;
    records.reserve(n * implicates);
    for (std::size_t m = 0; m < implicates; ++m) {
        Rng fill(derive_seed(seed, 0x1000 + m));
        for (std::size_t i = 0; i < n; ++i) {
            MicrodataRecord r;
            r.id = single.ids()[i];
            r.implicate = static_cast<int>(m + 1);
            r.weight = single.weights(0)[i];
            if (single.stratified()) r.stratum = single.strata()[i];
            for (std::size_t v = 0; v < single.variables().size(); ++v) r.values.push_back(single.values(0, v)[i]);
            if (missing[i]) {
                const auto& pool = donors[single.stratified() ? single.strata()[i] : 0];
                if (!pool.empty()) {
                    r.values[var] = single.values(0, var)[pool[fill.below(pool.size())]];
                }
            }
            records.push_back(std::move(r));
        }
    }
    return MicrodataSet::from_records(std::move(records), single.variables(), single.stratified());
}

SyntheticPopulationSpec default_population_spec() {
    SyntheticPopulationSpec s;
    s.population_size = 100000;
    s.meanlog = 10.5;
    s.sdlog = 0.8;
    s.tail_exponent = 2.5;
    s.tail_mix_weight = 0.05;
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> bounds{0.0, 2e4, 4e4, 7e4, 1e5, 2e5, 5e5, 1e6, inf};
    const std::vector<double> rates{0.005, 0.005, 0.008, 0.01, 0.02, 0.05, 0.1, 0.2};
    for (std::size_t r = 0; r + 1 < bounds.size(); ++r) {
        StratumBracket b;
        b.lower = bounds[r];
        b.upper = bounds[r + 1];
        b.special_forms_prob = 0.1 + 0.08 * static_cast<double>(r);
        b.usefulness_probs = {0.6, 0.3, 0.1};
        b.sampling_rate = rates[r];
        s.strata_design.push_back(b);
    }
    s.assets = {
        {"taxable_interest", 0.15, 0.010, std::nullopt, 0.01},
        {"nontaxable_interest", 0.05, 0.025, std::nullopt, 0.01},
        {"dividends", 0.25, 0.03411, std::nullopt, 0.01},
        {"s_corp", 0.15, 0.08, std::nullopt, 0.01},
        {"partnership", 0.10, 0.06, std::nullopt, 0.01},
        {"rental", 0.10, 0.04, std::nullopt, 0.01},
        {"pension", 0.20, 0.02, std::nullopt, 0.01},
    };
    s.seed = 42;
    return s;
}

}  // namespace ineq
