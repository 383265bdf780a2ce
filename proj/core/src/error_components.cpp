#include "ineq/error_components.hpp"

#include <algorithm>
#include <cmath>

#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"

namespace ineq {

double sampling_error(std::span<const double> x) {
    if (x.size() < 2) throw ValidationError("sampling error needs at least 2 replicate estimates");
    const double mean = compensated_sum(x) / static_cast<double>(x.size());
    CompensatedSum ss;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss.value() / static_cast<double>(x.size() - 1));
}

double imputation_error(std::span<const double> x, double grand, std::vector<std::string>* warnings) {
    if (x.empty()) throw ValidationError("imputation error needs at least one implicate estimate");
    const double mean = compensated_sum(x) / static_cast<double>(x.size());
    if (std::abs(mean - grand) > 1e-9 * std::max(1.0, std::abs(grand))) {
        throw ValidationError("grand estimate is not the mean of the implicate estimates");
    }
    if (x.size() == 1) {
        if (warnings) warnings->push_back("single implicate: imputation error set to 0");
        return 0.0;
    }
    CompensatedSum ss;
    for (double v : x) ss += (v - grand) * (v - grand);
    return std::sqrt(ss.value() / static_cast<double>(x.size() - 1));
}

double combined_error(double sigma1, double sigma2, std::size_t implicates) {
    if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0)) throw ValidationError("error components must be nonnegative");
    if (implicates < 1) throw ValidationError("implicate count must be at least 1");
    return std::sqrt(sigma1 * sigma1 + sigma2 * sigma2 * (1.0 + 1.0 / static_cast<double>(implicates)));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal quantile needs p in (0, 1)");
    // Acklam's rational approximation followed by one Halley refinement step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

Interval confidence_interval(double point, double sigma, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    if (!(sigma >= 0.0)) throw ValidationError("standard error must be nonnegative");
    const double z = level == 0.95 ? kZ975 : normal_quantile(0.5 + level / 2.0);
    return {point - z * sigma, point + z * sigma};
}

double empirical_quantile(std::span<const double> data, double p) {
    if (data.empty()) throw ValidationError("quantile of empty data");
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("quantile probability must lie in [0, 1]");
    std::vector<double> s(data.begin(), data.end());
    std::sort(s.begin(), s.end());
    const double h = p * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

Interval percentile_interval(std::span<const double> x, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
    const double tail = (1.0 - level) / 2.0;
    return {empirical_quantile(x, tail), empirical_quantile(x, 1.0 - tail)};
}

ErrorDecomposition decompose_error(double point, double sigma1, double sigma2, std::size_t implicates) {
    const double sigma = combined_error(sigma1, sigma2, implicates);
    ErrorDecomposition d;
    if (sigma > 0.0) {
        d.sampling_ratio = sigma1 / sigma;
        d.imputation_ratio = sigma2 * std::sqrt(1.0 + 1.0 / static_cast<double>(implicates)) / sigma;
    }
    d.relative_error = point != 0.0 ? sigma / std::abs(point) : 0.0;
    return d;
}

}  // namespace ineq
