#pragma once

#include <span>
#include <string>
#include <vector>

namespace ineq {

struct RegressionResult {
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double t_intercept = 0.0;
    double t_slope = 0.0;
    double r_squared = 0.0;
    double residual_variance = 0.0;  // weighted SSE / (n - 2)
    double cov_intercept_slope = 0.0;
    std::size_t n = 0;
    std::size_t dof = 0;
    std::vector<double> weights;

    [[nodiscard]] double predict(double x) const noexcept { return intercept + slope * x; }
    /// Standard error of the fitted mean at x.
    [[nodiscard]] double prediction_se(double x) const noexcept;
};

/// Weighted least squares of y on a constant and x with weights 1/se^2.
/// The regressor is centred at its weighted mean before solving; reported
/// coefficients are on the original scale. Coefficient covariance is
/// s^2 (X'WX)^{-1} with s^2 the weighted residual variance.
RegressionResult wls_fit(std::span<const double> y, std::span<const double> x, std::span<const double> se);

/// General weighted fit with explicit weights.
RegressionResult weighted_fit(std::span<const double> y, std::span<const double> x, std::span<const double> weights);

/// Ordinary least squares (unit weights).
RegressionResult ols_fit(std::span<const double> y, std::span<const double> x);

/// 100 (yhat(x1) - yhat(x0)) / yhat(x0).
double trend_percent_change(const RegressionResult& fit, double x0, double x1);

struct TrendPoint {
    double x = 0.0;
    double fitted = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Pointwise normal-approximation band for the fitted line.
std::vector<TrendPoint> trend_band(const RegressionResult& fit, std::span<const double> xs, double level = 0.95);

}  // namespace ineq
