#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ineq {

/// Which rate enters the tail-exponent root.
///
/// Combined: high types leave the high-growth state at rate delta + alpha
/// (retirement or switching), the root of (s^2/2) xi^2 + mu xi - (alpha + delta)
/// implied by the stationary forward equation. Netted: delta - alpha, kept for
/// comparison; with the usual alpha > delta it rules out most calibrations.
enum class ExitRate { Combined, Netted };

ExitRate parse_exit_rate(const std::string& name);
std::string to_string(ExitRate e);

struct GrowthModelParams {
    double mu_high = 0.0;
    double mu_low = -0.1;
    double sigma_high = 0.15;
    double sigma_low = 0.15;
    double alpha = 1.0 / 6.0;   // high -> low switching rate
    double delta = 1.0 / 30.0;  // retirement (replacement) rate
    double entry_high_prob = 0.1;
    double entry_mean = 0.0;    // entrant log income ~ N(entry_mean, entry_sd^2)
    double entry_sd = 0.5;

    void validate() const;
};

/// Defaults for the parameters not pinned by the calibration (everything but
/// mu_high and sigma_high). `sigma_low <= 0` means "equal to sigma_high".
struct ModelDefaults {
    double mu_low = -0.1;
    double sigma_low = 0.0;
    double alpha = 1.0 / 6.0;
    double delta = 1.0 / 30.0;
    double entry_high_prob = 0.1;
    double entry_mean = 0.0;
    double entry_sd = 0.5;

    [[nodiscard]] GrowthModelParams make(double mu_high, double sigma_high) const;
};

/// Uniform log-income grid.
struct Grid {
    double lo = -5.0;
    double hi = 20.0;
    std::size_t points = 2001;

    [[nodiscard]] double step() const noexcept { return (hi - lo) / static_cast<double>(points - 1); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return lo + step() * static_cast<double>(i); }
    void validate() const;
};

/// Two-type log-income density on a grid; mass is h * sum(fH + fL).
struct DensityState {
    Grid grid;
    std::vector<double> high;
    std::vector<double> low;
    double time = 0.0;

    [[nodiscard]] double mass() const noexcept;
    [[nodiscard]] std::vector<double> total() const;
};

/// eta = 1 + log10(p_{k/10} / p_k): inverse tail exponent implied by two
/// nested top shares (e.g. top 1% and top 10%).
double eta_from_shares(double p_tenth_k, double p_k);

/// Tail exponent xi of the stationary distribution for a given high-type drift.
/// Throws NumericalError when no Pareto steady state exists.
double xi_from_mu_high(double mu_high, double sigma_high, double alpha, double delta,
                       ExitRate convention = ExitRate::Combined);

/// Inverse of xi_from_mu_high at xi = 1/eta; verified by round trip to 1e-10.
double mu_high_from_eta(double eta, double sigma_high, double alpha, double delta,
                        ExitRate convention = ExitRate::Combined);

/// Stationary two-type forward equation: reflecting lower boundary,
/// zero density beyond the upper boundary, renormalized to unit mass.
DensityState steady_state(const GrowthModelParams& params, const Grid& grid = {});

/// Least-squares slope of log(fH + fL) over [x_lo, x_hi]; the tail exponent
/// is its negative.
double tail_slope(const DensityState& state, double x_lo, double x_hi);

/// Tail exponent estimated over the region where the survival function lies
/// between 1e-8 and 1e-12, excluding the top 5% of the grid. Returns 0 when
/// that region has fewer than 3 points.
double estimated_tail_exponent(const DensityState& state);

/// Income share (income = exp(x)) of the top fraction q of the population,
/// by trapezoidal quadrature with a proportional split of the threshold cell.
double top_share_from_density(const DensityState& state, double q);

struct TransitionResult {
    std::vector<double> times;                 // checkpoint times (start_time + whole years)
    std::vector<std::vector<double>> shares;   // [q][checkpoint]
    double max_mass_drift = 0.0;
    DensityState final_state;
};

/// Implicit-Euler evolution of the two-type density under `params` from
/// `initial`, reporting top shares for each q at yearly checkpoints
/// (including t = 0). Throws NumericalError when total mass drifts by more
/// than 1e-6. Transitional states are not screened for a divergent tail:
/// their far tail is not Pareto, and upper-boundary leakage shows up as
/// mass drift.
TransitionResult simulate_transition(const DensityState& initial,
                                     const GrowthModelParams& params,
                                     double horizon_years,
                                     double dt = 0.05,
                                     std::span<const double> top_fractions = std::span<const double>{},
                                     double start_time = 0.0);

}  // namespace ineq
