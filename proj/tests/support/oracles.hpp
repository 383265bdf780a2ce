#pragma once

// Independent reference computations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

/// Share of the top (1-k)n units of a unit-weight population, taken greedily
/// from the largest value down; the last unit counts fractionally.
inline double top_share_units(std::vector<double> values, double k) {
    std::sort(values.begin(), values.end(), std::greater<>());
    long double total = 0.0L;
    for (double v : values) total += v;
    long double remaining = (1.0L - static_cast<long double>(k)) * static_cast<long double>(values.size());
    long double top = 0.0L;
    for (double v : values) {
        if (remaining <= 0.0L) break;
        const long double take = std::min<long double>(1.0L, remaining);
        top += take * v;
        remaining -= take;
    }
    return static_cast<double>(top / total);
}

/// Replicates value i weights[i] times.
inline std::vector<double> expand(const std::vector<double>& values, const std::vector<int>& weights) {
    std::vector<double> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.insert(out.end(), static_cast<std::size_t>(weights[i]), values[i]);
    return out;
}

/// Hill estimator of the tail exponent from the largest `top` observations.
inline double hill(std::vector<double> values, std::size_t top) {
    std::sort(values.begin(), values.end(), std::greater<>());
    const double threshold = values[top];
    long double s = 0.0L;
    for (std::size_t i = 0; i < top; ++i) s += std::log(values[i] / threshold);
    return static_cast<double>(static_cast<long double>(top) / s);
}

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double r_squared = 0.0;
};

/// Weighted least squares by the uncentred 2x2 normal equations in long
/// double, with covariance s^2 (X'WX)^-1 and weighted R^2 about the
/// weighted mean.
inline Line normal_equations(const std::vector<double>& y, const std::vector<double>& x, const std::vector<double>& w) {
    long double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const long double wi = w[i], xi = x[i], yi = y[i];
        s0 += wi;
        s1 += wi * xi;
        s2 += wi * xi * xi;
        t0 += wi * yi;
        t1 += wi * xi * yi;
    }
    const long double det = s0 * s2 - s1 * s1;
    const long double b = (s0 * t1 - s1 * t0) / det;
    const long double a = (t0 - b * s1) / s0;
    long double sse = 0, sst = 0;
    const long double ybar = t0 / s0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const long double e = y[i] - a - b * x[i];
        sse += w[i] * e * e;
        sst += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    const long double s2hat = sse / static_cast<long double>(y.size() - 2);
    Line out;
    out.intercept = static_cast<double>(a);
    out.slope = static_cast<double>(b);
    out.se_intercept = static_cast<double>(std::sqrt(s2hat * s2 / det));
    out.se_slope = static_cast<double>(std::sqrt(s2hat * s0 / det));
    out.r_squared = static_cast<double>(1.0L - sse / sst);
    return out;
}

inline double sample_sd(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Exhaustive search over all medoid pairs of an n x n dissimilarity given
/// as a callable; returns the minimal total cost of a 2-medoid clustering.
template <typename Dist>
double best_two_medoid_cost(std::size_t n, Dist d) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            double cost = 0.0;
            for (std::size_t i = 0; i < n; ++i) cost += std::min(d(i, a), d(i, b));
            best = std::min(best, cost);
        }
    }
    return best;
}

/// Top-q share of a Pareto(xi) law with unit scale: q^(1 - 1/xi).
inline double pareto_top_share(double xi, double q) { return std::pow(q, 1.0 - 1.0 / xi); }

}  // namespace oracle
