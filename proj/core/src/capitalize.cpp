#include "ineq/capitalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"

namespace ineq {

void CapitalizationSpec::validate() const {
    if (categories.empty()) throw ValidationError("capitalization needs at least one asset category");
    for (const auto& c : categories) {
        const auto it = fa_totals.find(c);
        if (it == fa_totals.end()) throw ValidationError("missing aggregate total for category '" + c + "'");
        if (!(it->second >= 0.0) || !std::isfinite(it->second)) {
            throw ValidationError("aggregate total for '" + c + "' must be finite and nonnegative");
        }
    }
    if (regime == RateRegime::Heterogeneous && heterogeneous.empty()) {
        throw ValidationError("heterogeneous regime needs a heterogeneous category rule");
    }
    for (const auto& h : heterogeneous) {
        if (std::find(categories.begin(), categories.end(), h.category) == categories.end()) {
            throw ValidationError("heterogeneous category '" + h.category + "' is not a listed category");
        }
        if (!(h.top_fraction > 0.0 && h.top_fraction < 1.0)) throw ValidationError("top_fraction must lie in (0, 1)");
        if (!(h.top_rate > 0.0)) throw ValidationError("top rate for '" + h.category + "' must be positive");
    }
    if (max_iterations < 1) throw ValidationError("max_iterations must be positive");
}

namespace {

double weighted_sum(std::span<const double> x, std::span<const double> w) {
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s += (w.empty() ? 1.0 : w[i]) * x[i];
    return s.value();
}

}  // namespace

double estimate_rate(std::span<const double> incomes, std::span<const double> weights, double fa_total) {
    if (!weights.empty() && weights.size() != incomes.size()) throw ValidationError("weights and incomes differ in length");
    if (!(fa_total > 0.0)) throw ValidationError("aggregate total FA must be positive");
    const double total = weighted_sum(incomes, weights);
    if (!(total > 0.0)) {
        throw NumericalError("aggregate income is not positive while FA = " + format_number(fa_total) +
                             "; rate of return undefined");
    }
    return total / fa_total;
}

HeterogeneousRates solve_heterogeneous_rates(std::span<const double> incomes,
                                             std::span<const double> weights,
                                             std::span<const char> top_member,
                                             double fa_total,
                                             double top_rate) {
    if (top_member.size() != incomes.size()) throw ValidationError("membership and incomes differ in length");
    if (!weights.empty() && weights.size() != incomes.size()) throw ValidationError("weights and incomes differ in length");
    if (!(top_rate > 0.0)) throw ValidationError("top rate must be positive");
    if (!(fa_total > 0.0)) throw ValidationError("aggregate total FA must be positive");

    CompensatedSum top_income;
    CompensatedSum bottom_income;
    for (std::size_t i = 0; i < incomes.size(); ++i) {
        const double wi = (weights.empty() ? 1.0 : weights[i]) * incomes[i];
        (top_member[i] ? top_income : bottom_income) += wi;
    }
    const double top_holdings = top_income.value() / top_rate;
    const double remaining = fa_total - top_holdings;
    if (!(remaining > 0.0)) {
        std::ostringstream msg;
        msg << "infeasible heterogeneous rates: top-group holdings " << format_number(top_holdings)
            << " at r_top = " << format_number(top_rate) << " exhaust the aggregate FA = " << format_number(fa_total);
        throw NumericalError(msg.str());
    }
    if (!(bottom_income.value() > 0.0)) {
        throw NumericalError("bottom-group income is not positive; bottom rate undefined");
    }
    return {top_rate, bottom_income.value() / remaining};
}

double capitalize_wealth(const std::map<std::string, double>& incomes,
                         const RateSolution& rates,
                         double nonfin,
                         bool top_member) {
    double wealth = nonfin;
    for (const auto& [category, income] : incomes) {
        if (income == 0.0) continue;
        const auto it = rates.rates.find(category);
        if (it == rates.rates.end()) {
            throw ValidationError("no rate of return for held category '" + category + "'");
        }
        const auto& r = it->second;
        const double rate = (r.top_rate && top_member) ? *r.top_rate : r.rate;
        wealth += income / rate;
    }
    return wealth;
}

std::vector<char> classify_top(std::span<const double> wealth,
                               std::span<const double> weights,
                               double top_fraction,
                               std::span<const std::int64_t> ids) {
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) throw ValidationError("top_fraction must lie in (0, 1)");
    const std::size_t n = wealth.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (wealth[a] != wealth[b]) return wealth[a] > wealth[b];
        return ids.empty() ? a < b : ids[a] < ids[b];
    });
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) total += weights.empty() ? 1.0 : weights[i];
    const double cutoff = top_fraction * total.value();

    std::vector<char> top(n, 0);
    CompensatedSum above;
    for (auto i : order) {
        if (!(above.value() < cutoff)) break;
        top[i] = 1;
        above += weights.empty() ? 1.0 : weights[i];
    }
    return top;
}

CapitalizationResult capitalize(const ImplicateView& data, const CapitalizationSpec& spec) {
    spec.validate();
    const std::size_t n = data.size();
    const auto weights = data.weights();

    std::map<std::string, std::span<const double>> incomes;
    for (const auto& c : spec.categories) incomes[c] = data.values(spec.income_prefix + c);

    std::vector<double> nonfin(n, 0.0);
    if (spec.nonfin.kind == NonfinancialRule::Kind::Column) {
        const auto col = data.values(spec.nonfin.column);
        nonfin.assign(col.begin(), col.end());
    } else if (spec.nonfin.kind == NonfinancialRule::Kind::Constant) {
        nonfin.assign(n, spec.nonfin.constant);
    }

    CapitalizationResult result;
    auto& sol = result.rates;
    for (const auto& c : spec.categories) {
        const double fa = spec.fa_totals.at(c);
        const double total = weighted_sum(incomes[c], weights);
        if (fa == 0.0 && total == 0.0) continue;  // category absent on both sides
        sol.rates[c].rate = estimate_rate(incomes[c], weights, fa);
    }

    auto recompute = [&](const std::vector<char>& top) {
        result.wealth.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) result.wealth[i] = nonfin[i];
        for (const auto& c : spec.categories) {
            auto& h = result.holdings[c];
            h.assign(n, 0.0);
            const auto inc = incomes[c];
            const auto it = sol.rates.find(c);
            for (std::size_t i = 0; i < n; ++i) {
                if (inc[i] == 0.0) continue;
                if (it == sol.rates.end()) throw ValidationError("no rate of return for held category '" + c + "'");
                const auto& r = it->second;
                const double rate = (r.top_rate && !top.empty() && top[i]) ? *r.top_rate : r.rate;
                h[i] = inc[i] / rate;
                result.wealth[i] += h[i];
            }
        }
    };

    recompute({});
    sol.iterations = 1;
    sol.converged = true;

    if (spec.regime == RateRegime::Homogeneous) {
        const double q = spec.heterogeneous.empty() ? 0.01 : spec.heterogeneous.front().top_fraction;
        result.top_member = classify_top(result.wealth, weights, q, data.ids());
        return result;
    }

    // Membership depends on wealth, which depends on the split rates.
    const double q = spec.heterogeneous.front().top_fraction;
    std::vector<char> top = classify_top(result.wealth, weights, q, data.ids());
    sol.converged = false;
    for (std::size_t it = 1; it <= spec.max_iterations; ++it) {
        for (const auto& h : spec.heterogeneous) {
            const auto r = solve_heterogeneous_rates(incomes[h.category], weights, top,
                                                     spec.fa_totals.at(h.category), h.top_rate);
            auto& cr = sol.rates[h.category];
            cr.rate = r.bottom;
            cr.bottom_rate = r.bottom;
            cr.top_rate = r.top;
        }
        recompute(top);
        sol.iterations = it;
        auto next = classify_top(result.wealth, weights, q, data.ids());
        if (next == top) {
            sol.converged = true;
            break;
        }
        top = std::move(next);
    }
    result.top_member = std::move(top);
    if (!sol.converged) {
        // Rates and wealth above belong to the last membership tried; keep them consistent.
        for (const auto& h : spec.heterogeneous) {
            const auto r = solve_heterogeneous_rates(incomes[h.category], weights, result.top_member,
                                                     spec.fa_totals.at(h.category), h.top_rate);
            auto& cr = sol.rates[h.category];
            cr.rate = r.bottom;
            cr.bottom_rate = r.bottom;
            cr.top_rate = r.top;
        }
        recompute(result.top_member);
    }
    return result;
}

MicrodataSet capitalize_dataset(const MicrodataSet& data, const CapitalizationSpec& spec,
                                const std::string& output_column, std::vector<RateSolution>* solutions) {
    std::vector<std::vector<double>> cols;
    for (std::size_t m = 0; m < data.implicate_count(); ++m) {
        auto r = capitalize(data.implicate(m), spec);
        cols.push_back(std::move(r.wealth));
        if (solutions) solutions->push_back(std::move(r.rates));
    }
    return data.with_column(output_column, std::move(cols));
}

}  // namespace ineq
