#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ineq/microdata.hpp"

namespace ineq {

/// Default fractile set: bottom shares k whose complements are the top
/// 10, 5, 1, 0.5, 0.1 and 0.01 percent.
inline constexpr double kDefaultFractiles[] = {0.9, 0.95, 0.99, 0.995, 0.999, 0.9999};

struct ShareQuery {
    std::string variable = "income";
    double k = 0.9;  // bottom fraction; the estimate is the share of the top 1-k

    void validate() const;
};

/// Intermediate quantities of one top-share evaluation.
struct ShareComputation {
    double m_k = 0.0;          // k * N, units in the bottom 100k percent
    std::size_t j_star = 0;    // number of order statistics fully below m_k
    double omega = 0.0;        // interpolation weight on order statistic j*+1
    double r_lower = 0.0;      // bottom share through j*
    double r_upper = 0.0;      // bottom share through j*+1
    double r_hat = 0.0;
    double p_hat = 0.0;        // 1 - r_hat
};

/// Top-share estimate with its uncertainty decomposition.
///
/// `point` is the mean of `per_implicate`. The error fields stay empty until
/// a bootstrap run fills them.
struct ShareEstimate {
    std::string variable;
    double k = 0.0;
    double point = 0.0;
    std::vector<double> per_implicate;
    std::optional<double> sigma1;  // sampling
    std::optional<double> sigma2;  // imputation
    std::optional<double> sigma;   // combined (Rubin)
    std::size_t n = 0;
    double N = 0.0;
    std::size_t replicates = 0;
    std::string dataset;
};

/// Weighted top-share estimator with linear interpolation at the m_k boundary.
///
/// Values are ordered ascending (ties by id, then input position), the index
/// j* is the largest with cumulative weight <= m_k = kN, and the boundary
/// observation contributes the fraction omega of its weight to the bottom
/// group. Negative values are allowed; the result is not clamped to [0, 1].
///
/// Throws NumericalError when the weighted total is zero and when m_k
/// reaches past the last observation.
ShareComputation compute_top_share(std::span<const double> values,
                                   std::span<const double> weights,
                                   double k,
                                   std::span<const std::int64_t> ids = {});

double estimate_top_share(std::span<const double> values,
                          std::span<const double> weights,
                          double k,
                          std::span<const std::int64_t> ids = {});

double estimate_top_share(const ImplicateView& data, const ShareQuery& query);

/// Same estimator on data already in ascending order. Zero weights are
/// skipped, so bootstrap multiplicities can be applied without re-sorting.
ShareComputation compute_top_share_sorted(std::span<const double> sorted_values,
                                          std::span<const double> weights,
                                          double k);

/// Permutation that sorts `values` ascending, ties by id (or position).
std::vector<std::size_t> ascending_order(std::span<const double> values, std::span<const std::int64_t> ids = {});

/// Arithmetic mean of per-implicate estimates.
double grand_estimate(std::span<const double> per_implicate);

/// Point estimate (grand mean over implicates) for every requested k.
std::vector<ShareEstimate> estimate_shares(const MicrodataSet& data,
                                           const std::string& variable,
                                           std::span<const double> ks,
                                           const std::string& dataset = {});

}  // namespace ineq
