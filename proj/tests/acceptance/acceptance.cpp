// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "ineq/bootstrap.hpp"
#include "ineq/capitalize.hpp"
#include "ineq/clustering.hpp"
#include "ineq/envelope.hpp"
#include "ineq/error_components.hpp"
#include "ineq/growth.hpp"
#include "ineq/rng.hpp"
#include "ineq/serialize.hpp"
#include "ineq/synthetic.hpp"
#include "ineq/topshare.hpp"
#include "ineq/trend.hpp"
#include "oracles.hpp"

using namespace ineq;

namespace tol {
constexpr double kOracleRel = 1e-12;
constexpr double kOracleSeconds = 5.0;
constexpr double kWorkedWealth = 1.0;
constexpr double kRubin = 1e-6;
constexpr double kCoverageLo = 0.93;
constexpr double kCoverageHi = 0.97;
constexpr double kAddingUp = 1e-9;
constexpr double kWls = 1e-10;
constexpr double kTailSlopeRel = 0.02;
constexpr double kParetoShare = 0.001;
constexpr double kWidthRatioLo = 5.0;
constexpr double kWidthRatioHi = 20.0;
constexpr double kPufMedian = 0.015;
}  // namespace tol

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome estimator_matches_oracle() {
    Rng rng(2024);
    std::size_t accepted = 0, skipped = 0;
    double worst = 0.0, elapsed = 0.0;
    while (accepted < 1000) {
        const std::size_t n = 2 + rng.below(49);
        std::vector<double> v(n);
        double total = 0.0, absolute = 0.0;
        for (auto& x : v) {
            x = static_cast<double>(static_cast<int>(rng.below(301)) - 100);
            total += x;
            absolute += std::abs(x);
        }
        if (std::abs(total) < 0.05 * absolute) {
            ++skipped;
            continue;
        }
        const double k = 0.01 + 0.98 * rng.uniform();
        const std::vector<double> w(n, 1.0);
        const auto t0 = std::chrono::steady_clock::now();
        const double p = estimate_top_share(v, w, k);
        elapsed += seconds_since(t0);
        const double a = oracle::top_share_units(v, k);
        const double b = oracle_top_share(v, k);
        worst = std::max({worst, rel(p, a), rel(p, b)});
        ++accepted;
    }
    return {worst <= tol::kOracleRel && elapsed < tol::kOracleSeconds,
            fmt("1000 datasets (%zu near-zero totals skipped), max rel diff %.2e, %.3f s", skipped, worst, elapsed)};
}

Outcome dividend_worked_example() {
    RateSolution r;
    r.rates["dividends"].rate = 0.03411;
    const double wealth = capitalize_wealth({{"dividends", 6710.0}}, r, 0.0);
    return {std::abs(wealth - 196716.5) <= tol::kWorkedWealth && std::lround(wealth) == 196717,
            fmt("wealth %.2f", wealth)};
}

Outcome rubin_combination() {
    const double s = combined_error(0.03, 0.01, 5);
    const double only = combined_error(0.03, 0.0, 5);
    return {std::abs(s - 0.031937) <= tol::kRubin && only == 0.03, fmt("sigma %.7f, sigma2=0 gives %.17g", s, only)};
}

Outcome bootstrap_coverage() {
    constexpr int kReps = 500;
    auto spec = default_population_spec();
    spec.population_size = 1000000;
    const auto pop = generate_population(spec);
    const double truth = oracle_top_share(pop.income, 0.9);
    auto design = SamplingDesign::from_spec(spec);
    for (auto& r : design.bracket_rates) r = std::min(1.0, 1.625 * r);  // n near 20,000
    const std::string vars[] = {"income"};
    int covered = 0;
    double units = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < kReps; ++r) {
        const auto s = draw_stratified_sample(pop, design, 1000 + static_cast<std::uint64_t>(r), vars);
        units += static_cast<double>(s.data.size());
        const auto assignment = select_cluster_count(s.strata);
        const auto rep = ReplicateDesign::from_assignment(s.data, assignment);
        BootstrapOptions o;
        o.ks = {0.9};
        o.replicates = 999;
        o.seed = 5000 + static_cast<std::uint64_t>(r);
        o.threads = std::max(1u, std::thread::hardware_concurrency());
        const auto res = run_bootstrap(s.data, rep, o);
        const auto& ci = res.intervals[0];
        covered += (ci.lo <= truth && truth <= ci.hi) ? 1 : 0;
    }
    const double c = static_cast<double>(covered) / kReps;
    return {c >= tol::kCoverageLo && c <= tol::kCoverageHi,
            fmt("coverage %.3f over %d samples of mean size %.0f, truth %.5f, %.0f s", c, kReps, units / kReps, truth,
                seconds_since(t0))};
}

Outcome capitalization_adds_up() {
    const auto pop = generate_population(default_population_spec());
    const auto design = SamplingDesign::from_spec(default_population_spec());
    std::vector<std::string> vars;
    for (const auto& a : pop.asset_names) vars.push_back("income_" + a);
    const auto s = draw_stratified_sample(pop, design, 77, vars);
    CapitalizationSpec spec;
    spec.categories = pop.asset_names;
    for (std::size_t a = 0; a < pop.asset_names.size(); ++a) {
        long double fa = 0.0L;
        for (double h : pop.asset_holding[a]) fa += h;
        spec.fa_totals[pop.asset_names[a]] = static_cast<double>(fa);
    }
    const auto w = s.data.weights(0);
    double worst = 0.0;
    std::string runs;
    auto check = [&](const CapitalizationSpec& cs, const char* label) {
        const auto r = capitalize(s.data.implicate(0), cs);
        for (const auto& c : cs.categories) {
            long double sum = 0.0L;
            const auto& h = r.holdings.at(c);
            for (std::size_t i = 0; i < h.size(); ++i) sum += static_cast<long double>(w[i]) * h[i];
            worst = std::max(worst, std::abs(static_cast<double>(sum) / cs.fa_totals.at(c) - 1.0));
        }
        runs += fmt("; %s %zu it%s", label, r.rates.iterations, r.rates.converged ? "" : " (flagged cycle)");
    };
    check(spec, "homogeneous");
    // a top rate below the bottom rate settles; above it, boundary units alternate
    for (double top_rate : {0.005, 0.03}) {
        auto het = spec;
        het.regime = RateRegime::Heterogeneous;
        het.heterogeneous = {{"taxable_interest", 0.01, top_rate}};
        check(het, top_rate < 0.01 ? "split r_A 0.005" : "split r_A 0.03");
    }
    return {worst <= tol::kAddingUp, fmt("max relative gap %.2e", worst) + runs};
}

Outcome wls_matches_normal_equations() {
    Rng rng(31);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 5 + rng.below(60);
        std::vector<double> x(n), y(n), se(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 1913.0 + static_cast<double>(i);
            se[i] = 0.002 + 0.03 * rng.uniform();
            w[i] = 1.0 / (se[i] * se[i]);
            y[i] = 0.1 + 0.001 * (x[i] - 1913.0) + se[i] * rng.normal();
        }
        const auto fit = wls_fit(y, x, se);
        const auto ref = oracle::normal_equations(y, x, w);
        worst = std::max({worst, rel(fit.slope, ref.slope), rel(fit.intercept, ref.intercept)});
    }
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> y{0.3, 0.9, 1.4, 2.2, 2.4, 3.1, 3.9};
    const auto ols = ols_fit(y, x);
    const auto flat = wls_fit(y, x, std::vector<double>(x.size(), 0.05));
    const double gap = std::max(rel(ols.slope, flat.slope), rel(ols.intercept, flat.intercept));
    return {worst <= tol::kWls && gap <= tol::kWls,
            fmt("100 instances, max rel diff %.2e; constant weights vs OLS %.2e", worst, gap)};
}

Outcome tail_slope_grid() {
    const ModelDefaults d;
    double worst = 0.0;
    std::string where;
    for (double mu : {0.0, 0.01, 0.02, 0.03, 0.04}) {
        for (double sigma : {0.1, 0.125, 0.15, 0.175, 0.2}) {
            const double xi = xi_from_mu_high(mu, sigma, d.alpha, d.delta);
            const double est = estimated_tail_exponent(steady_state(d.make(mu, sigma)));
            const double e = std::abs(est - xi) / xi;
            if (e > worst) {
                worst = e;
                where = fmt("mu_H %.3f sigma_H %.3f", mu, sigma);
            }
        }
    }
    return {worst <= tol::kTailSlopeRel, fmt("25 points, worst rel error %.4f at %s", worst, where.c_str())};
}

Outcome discretized_pareto() {
    const Grid grid{0.0, 20.0, 4001};
    DensityState s;
    s.grid = grid;
    s.high.assign(grid.points, 0.0);
    s.low.assign(grid.points, 0.0);
    for (std::size_t i = 0; i < grid.points; ++i) s.high[i] = 2.0 * std::exp(-2.0 * grid.x(i));
    const double share = top_share_from_density(s, 0.01);
    return {std::abs(share - 0.1) <= tol::kParetoShare, fmt("top 1%% share %.5f", share)};
}

Outcome survey_envelopes() {
    auto load = [](const char* name) {
        auto spec = experiment_spec_from_json(read_json_file(std::string(INEQ_CONFIG_DIR) + "/" + name));
        spec.calibration.sigma_high_set = {0.15};
        spec.calibration.draws = 100;
        return spec;
    };
    const auto puf = load("experiment_puf1973.json");
    const auto scf = load("experiment_scf1973.json");
    const auto a = mc_envelope(puf.calibration, puf.experiment, 1).band(0.15);
    const auto b = mc_envelope(scf.calibration, scf.experiment, 1).band(0.15);
    const double wa = a.upper.back() - a.lower.back();
    const double wb = b.upper.back() - b.lower.back();
    const double ratio = wb / wa;
    const bool ratio_ok = ratio >= tol::kWidthRatioLo && ratio <= tol::kWidthRatioHi;
    const bool median_ok = std::abs(a.median.back() - 0.225) <= tol::kPufMedian;
    const bool covers = b.lower.back() <= 0.20 && b.upper.back() >= 0.27;
    return {ratio_ok && median_ok && covers,
            fmt("final-year width ratio %.2f%s, PUF median %.5f, SCF band [%.4f, %.4f]", ratio,
                ratio_ok ? "" : " (outside bounds)", a.median.back(), b.lower.back(), b.upper.back())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"estimator matches unit-weight oracle", estimator_matches_oracle},
        {"dividend capitalization example", dividend_worked_example},
        {"Rubin combination", rubin_combination},
        {"bootstrap interval coverage", bootstrap_coverage},
        {"capitalization adding-up", capitalization_adds_up},
        {"WLS against normal equations", wls_matches_normal_equations},
        {"steady-state tail slope", tail_slope_grid},
        {"discretized Pareto top share", discretized_pareto},
        {"survey envelopes", survey_envelopes},
    };
    int failures = 0;
    int index = 1;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
