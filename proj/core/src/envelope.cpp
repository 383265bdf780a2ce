#include "ineq/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ineq/error_components.hpp"
#include "ineq/errors.hpp"
#include "ineq/parallel.hpp"
#include "ineq/rng.hpp"

namespace ineq {

DrawLaw parse_draw_law(const std::string& name) {
    if (name == "uniform") return DrawLaw::Uniform;
    if (name == "truncated_normal") return DrawLaw::TruncatedNormal;
    throw ValidationError("unknown draw law '" + name + "' (expected uniform or truncated_normal)");
}

std::string to_string(DrawLaw law) { return law == DrawLaw::Uniform ? "uniform" : "truncated_normal"; }

void CalibrationInput::validate() const {
    if (!(eta_hat > 0.0)) throw ValidationError("eta_hat must be positive");
    if (!(se >= 0.0) || !std::isfinite(se)) throw ValidationError("se must be finite and nonnegative");
    if (draws < 1) throw ValidationError("draw count B must be at least 1");
    if (sigma_high_set.empty()) throw ValidationError("sigma_high set is empty");
    for (double s : sigma_high_set) {
        if (!(s > 0.0)) throw ValidationError("sigma_high values must be positive");
    }
}

void ShockExperiment::validate() const {
    if (!(end_year > start_year)) throw ValidationError("end year must follow the start year");
    if (std::abs(end_year - start_year - std::round(end_year - start_year)) > 1e-9) {
        throw ValidationError("experiment must span a whole number of years");
    }
    if (!(top_fraction > 0.0 && top_fraction < 1.0)) throw ValidationError("top fraction must lie in (0, 1)");
    if (!std::isfinite(delta_mu)) throw ValidationError("delta_mu must be finite");
    grid.validate();
}

ShockPath run_shock(double eta, double sigma_high, const ShockExperiment& ex) {
    ex.validate();
    ShockPath path;
    path.eta = eta;
    path.sigma_high = sigma_high;
    path.mu_high = mu_high_from_eta(eta, sigma_high, ex.defaults.alpha, ex.defaults.delta, ex.convention);
    const auto before = ex.defaults.make(path.mu_high, sigma_high);
    const auto initial = steady_state(before, ex.grid);
    auto after = before;
    after.mu_high += ex.delta_mu;
    const double q[] = {ex.top_fraction};
    const auto t = simulate_transition(initial, after, ex.end_year - ex.start_year, ex.dt, q, ex.start_year);
    path.years = t.times;
    path.shares = t.shares[0];
    return path;
}

std::vector<double> draw_etas(const CalibrationInput& calib, std::uint64_t seed) {
    calib.validate();
    constexpr double z = 1.96;
    std::vector<double> etas(calib.draws);
    for (std::size_t b = 0; b < calib.draws; ++b) {
        Rng rng(derive_seed(seed, b + 1));
        double unit = 0.0;  // position in [-1, 1] of the interval
        if (calib.law == DrawLaw::Uniform) {
            unit = 2.0 * rng.uniform() - 1.0;
        } else {
            double x = 0.0;
            do {
                x = rng.normal();
            } while (std::abs(x) > z);
            unit = x / z;
        }
        etas[b] = calib.eta_hat + unit * z * calib.se;
    }
    return etas;
}

const EnvelopeBand& Envelope::band(double sigma_high) const {
    for (const auto& b : bands) {
        if (std::abs(b.sigma_high - sigma_high) < 1e-12) return b;
    }
    throw ValidationError("no envelope band for sigma_high = " + std::to_string(sigma_high));
}

Envelope mc_envelope(const CalibrationInput& calib, const ShockExperiment& experiment, std::uint64_t seed,
                     std::size_t threads) {
    calib.validate();
    experiment.validate();
    Envelope env;
    env.label = calib.label;
    env.etas = draw_etas(calib, seed);

    const std::size_t B = calib.draws;
    const std::size_t S = calib.sigma_high_set.size();

    // Draws sharing an eta (e.g. SE = 0) share one simulation.
    std::map<double, std::size_t> unique;
    std::vector<std::size_t> slot(B);
    std::vector<double> distinct;
    for (std::size_t b = 0; b < B; ++b) {
        auto [it, fresh] = unique.emplace(env.etas[b], distinct.size());
        if (fresh) distinct.push_back(env.etas[b]);
        slot[b] = it->second;
    }

    const std::size_t U = distinct.size();
    std::vector<ShockPath> paths(U * S);
    std::vector<std::string> failures(U * S);
    parallel_for(U * S, threads, [&](std::size_t task) {
        const std::size_t u = task / S;
        const std::size_t s = task % S;
        try {
            paths[task] = run_shock(distinct[u], calib.sigma_high_set[s], experiment);
        } catch (const std::runtime_error& e) {
            failures[task] = e.what();
        }
    });

    for (std::size_t s = 0; s < S; ++s) {
        EnvelopeBand band;
        band.sigma_high = calib.sigma_high_set[s];
        std::vector<const ShockPath*> ok;
        for (std::size_t b = 0; b < B; ++b) {
            const std::size_t task = slot[b] * S + s;
            if (failures[task].empty()) {
                ok.push_back(&paths[task]);
            } else {
                ++band.excluded;
                std::ostringstream msg;
                msg << "draw " << b + 1 << " (eta = " << env.etas[b] << "): " << failures[task];
                band.exclusions.push_back(msg.str());
            }
        }
        if (static_cast<double>(band.excluded) > 0.1 * static_cast<double>(B) || ok.empty()) {
            std::ostringstream msg;
            msg << band.excluded << " of " << B << " draws infeasible at sigma_high = " << band.sigma_high
                << " (limit 10%)";
            if (!band.exclusions.empty()) msg << "; first: " << band.exclusions.front();
            throw NumericalError(msg.str());
        }
        band.years = ok.front()->years;
        std::vector<double> column(ok.size());
        for (std::size_t t = 0; t < band.years.size(); ++t) {
            for (std::size_t i = 0; i < ok.size(); ++i) column[i] = ok[i]->shares[t];
            band.median.push_back(empirical_quantile(column, 0.5));
            band.lower.push_back(empirical_quantile(column, 0.025));
            band.upper.push_back(empirical_quantile(column, 0.975));
        }
        env.bands.push_back(std::move(band));
    }
    return env;
}

double calibrate_shock(double eta, double sigma_high, const ShockExperiment& experiment, double target_share,
                       double lo, double hi, double tolerance) {
    if (!(target_share > 0.0 && target_share < 1.0)) throw ValidationError("target share must lie in (0, 1)");
    auto ex = experiment;
    auto final_share = [&](double dmu) {
        ex.delta_mu = dmu;
        return run_shock(eta, sigma_high, ex).shares.back();
    };
    double f_lo = final_share(lo) - target_share;
    const double f_hi = final_share(hi) - target_share;
    if (f_lo * f_hi > 0.0) {
        std::ostringstream msg;
        msg << "shock calibration: target " << target_share << " is not bracketed by delta_mu in [" << lo << ", "
            << hi << "]";
        throw NumericalError(msg.str());
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = final_share(mid) - target_share;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace ineq
