#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ineq {

/// Two-sided standard-normal quantile for a 95% interval, shared by the
/// confidence intervals and the calibration envelopes.
inline constexpr double kZ975 = 1.959964;

/// Sample standard deviation (L-1 denominator) of replicate estimates.
double sampling_error(std::span<const double> replicate_estimates);

/// Between-implicate standard deviation around the grand estimate.
/// M = 1 yields 0 and appends a warning when `warnings` is given.
double imputation_error(std::span<const double> implicate_estimates, double grand,
                        std::vector<std::string>* warnings = nullptr);

/// Rubin's combination: sqrt(s1^2 + s2^2 (1 + 1/M)).
double combined_error(double sigma1, double sigma2, std::size_t implicates);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Normal-approximation interval point +- z sigma. The 95% level uses
/// kZ975 exactly; other levels use the inverse normal CDF.
Interval confidence_interval(double point, double sigma, double level = 0.95);

/// Percentile-bootstrap interval from replicate estimates (sensitivity option).
Interval percentile_interval(std::span<const double> replicate_estimates, double level = 0.95);

/// Standard normal quantile.
double normal_quantile(double p);

/// Linear-interpolation (type 7) quantile of unsorted data.
double empirical_quantile(std::span<const double> data, double p);

/// Share of the combined error attributable to each component.
struct ErrorDecomposition {
    double sampling_ratio = 0.0;     // sigma1 / sigma
    double imputation_ratio = 0.0;   // sigma2 sqrt(1 + 1/M) / sigma
    double relative_error = 0.0;     // sigma / |point|
};

ErrorDecomposition decompose_error(double point, double sigma1, double sigma2, std::size_t implicates);

}  // namespace ineq
