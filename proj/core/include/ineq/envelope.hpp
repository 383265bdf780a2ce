#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ineq/growth.hpp"

namespace ineq {

enum class DrawLaw { Uniform, TruncatedNormal };

DrawLaw parse_draw_law(const std::string& name);
std::string to_string(DrawLaw law);

/// Calibration target for the growth model: eta-hat and its standard error.
struct CalibrationInput {
    double eta_hat = 0.39;
    double se = 0.0;
    std::string label;
    std::size_t draws = 100;
    std::vector<double> sigma_high_set{0.15, 0.175, 0.2};
    DrawLaw law = DrawLaw::Uniform;

    [[nodiscard]] double cv() const noexcept { return eta_hat != 0.0 ? se / eta_hat : 0.0; }
    void validate() const;
};

/// A permanent shift of mu_high by delta_mu at start_year, simulated to end_year.
struct ShockExperiment {
    double start_year = 1973.0;
    double end_year = 2050.0;
    double delta_mu = 0.0;
    double dt = 0.05;
    double top_fraction = 0.01;
    Grid grid;
    ExitRate convention = ExitRate::Combined;
    ModelDefaults defaults;

    void validate() const;
};

/// Baseline path for one eta and sigma_high: calibrate, solve the steady
/// state, shift mu_high, simulate. Shares are reported for the top fraction.
struct ShockPath {
    double eta = 0.0;
    double sigma_high = 0.0;
    double mu_high = 0.0;
    std::vector<double> years;
    std::vector<double> shares;
};

ShockPath run_shock(double eta, double sigma_high, const ShockExperiment& experiment);

/// The draws used by mc_envelope: draw b (0-based) uses Rng(derive_seed(seed, b + 1)).
std::vector<double> draw_etas(const CalibrationInput& calib, std::uint64_t seed);

struct EnvelopeBand {
    double sigma_high = 0.0;
    std::vector<double> years;
    std::vector<double> median;
    std::vector<double> lower;
    std::vector<double> upper;
    std::size_t excluded = 0;
    std::vector<std::string> exclusions;  // one reason per excluded draw
};

struct Envelope {
    std::string label;
    std::vector<double> etas;
    std::vector<EnvelopeBand> bands;  // one per sigma_high, in input order

    [[nodiscard]] const EnvelopeBand& band(double sigma_high) const;
};

/// Pointwise 2.5 / 50 / 97.5 percentile bands of the top share across draws,
/// per sigma_high. Infeasible draws are excluded and counted; more than 10%
/// excluded is a NumericalError.
Envelope mc_envelope(const CalibrationInput& calib, const ShockExperiment& experiment, std::uint64_t seed,
                     std::size_t threads = 0);

/// Finds delta_mu so that the baseline path ends at `target_share`, by
/// bisection on [lo, hi]. Run once; the result is frozen in config.
double calibrate_shock(double eta, double sigma_high, const ShockExperiment& experiment, double target_share,
                       double lo = 0.0, double hi = 0.1, double tolerance = 1e-7);

}  // namespace ineq
