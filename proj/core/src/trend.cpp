#include "ineq/trend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ineq/error_components.hpp"
#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"

namespace ineq {

namespace {

double t_ratio(double coef, double se) {
    if (se > 0.0) return coef / se;
    if (coef == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), coef);
}

}  // namespace

double RegressionResult::prediction_se(double x) const noexcept {
    const double v = se_intercept * se_intercept + 2.0 * x * cov_intercept_slope + x * x * se_slope * se_slope;
    return std::sqrt(std::max(v, 0.0));
}

RegressionResult weighted_fit(std::span<const double> y, std::span<const double> x, std::span<const double> w) {
    const std::size_t n = y.size();
    if (x.size() != n || w.size() != n) throw ValidationError("regression inputs differ in length");
    if (n < 3) throw ValidationError("regression needs at least 3 points");
    for (std::size_t t = 0; t < n; ++t) {
        if (!std::isfinite(y[t]) || !std::isfinite(x[t])) throw ValidationError("nonfinite regression input");
        if (!(w[t] > 0.0) || !std::isfinite(w[t])) throw ValidationError("regression weights must be positive");
    }

    CompensatedSum sw, swx, swy;
    for (std::size_t t = 0; t < n; ++t) {
        sw += w[t];
        swx += w[t] * x[t];
        swy += w[t] * y[t];
    }
    const double W = sw.value();
    const double xbar = swx.value() / W;
    const double ybar = swy.value() / W;

    CompensatedSum sxx, sxy, syy;
    double xscale = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dx = x[t] - xbar;
        const double dy = y[t] - ybar;
        sxx += w[t] * dx * dx;
        sxy += w[t] * dx * dy;
        syy += w[t] * dy * dy;
        xscale = std::max(xscale, std::abs(x[t]));
    }
    const double Sxx = sxx.value();
    if (!(Sxx > 1e-24 * W * std::max(1.0, xscale * xscale))) {
        throw ValidationError("regressor is collinear with the constant (all x equal)");
    }

    RegressionResult r;
    r.n = n;
    r.dof = n - 2;
    r.weights.assign(w.begin(), w.end());
    r.slope = sxy.value() / Sxx;
    r.intercept = ybar - r.slope * xbar;

    CompensatedSum sse;
    for (std::size_t t = 0; t < n; ++t) {
        const double e = y[t] - (ybar + r.slope * (x[t] - xbar));
        sse += w[t] * e * e;
    }
    const double SSE = sse.value();
    const double SST = syy.value();
    r.r_squared = SST > 0.0 ? std::clamp(1.0 - SSE / SST, 0.0, 1.0) : 1.0;
    r.residual_variance = SSE / static_cast<double>(r.dof);

    const double var_slope = r.residual_variance / Sxx;
    const double var_centred = r.residual_variance / W;
    r.se_slope = std::sqrt(var_slope);
    r.se_intercept = std::sqrt(var_centred + xbar * xbar * var_slope);
    r.cov_intercept_slope = -xbar * var_slope;
    r.t_slope = t_ratio(r.slope, r.se_slope);
    r.t_intercept = t_ratio(r.intercept, r.se_intercept);
    return r;
}

RegressionResult wls_fit(std::span<const double> y, std::span<const double> x, std::span<const double> se) {
    if (se.size() != y.size()) throw ValidationError("regression inputs differ in length");
    std::vector<double> w(se.size());
    for (std::size_t t = 0; t < se.size(); ++t) {
        if (!(se[t] > 0.0) || !std::isfinite(se[t])) {
            throw ValidationError("standard error at point " + std::to_string(t + 1) +
                                  " is not positive; WLS weights undefined (use OLS)");
        }
        w[t] = 1.0 / (se[t] * se[t]);
    }
    return weighted_fit(y, x, w);
}

RegressionResult ols_fit(std::span<const double> y, std::span<const double> x) {
    return weighted_fit(y, x, std::vector<double>(y.size(), 1.0));
}

double trend_percent_change(const RegressionResult& fit, double x0, double x1) {
    const double y0 = fit.predict(x0);
    if (y0 == 0.0) throw NumericalError("fitted value at the base point is zero; percent change undefined");
    return 100.0 * (fit.predict(x1) - y0) / y0;
}

std::vector<TrendPoint> trend_band(const RegressionResult& fit, std::span<const double> xs, double level) {
    std::vector<TrendPoint> out;
    for (double x : xs) {
        const auto ci = confidence_interval(fit.predict(x), fit.prediction_se(x), level);
        out.push_back({x, fit.predict(x), ci.lo, ci.hi});
    }
    return out;
}

}  // namespace ineq
