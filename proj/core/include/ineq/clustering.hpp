#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ineq/synthetic.hpp"

namespace ineq {

/// Gower dissimilarity of two strata over one ordinal attribute (income
/// bracket rank, range 1..R) and two nominal attributes.
double gower_distance(const StratumProfile& a, const StratumProfile& b, int rank_range);

/// Dense symmetric dissimilarity matrix, row-major.
class DissimilarityMatrix {
public:
    DissimilarityMatrix() = default;
    explicit DissimilarityMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    static DissimilarityMatrix gower(std::span<const StratumProfile> strata, int rank_range);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) noexcept {
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

struct PamResult {
    std::vector<std::size_t> medoids;  // indices into the input, ascending by cluster label
    std::vector<std::size_t> label;    // per input item, 0..k-1
    double total_cost = 0.0;
    std::vector<double> cost_trace;    // after BUILD, then after every accepted swap
    std::size_t swaps = 0;
};

/// Partitioning Around Medoids (BUILD + SWAP) on a precomputed matrix.
/// Deterministic: every tie is resolved toward the lowest index.
PamResult pam(const DissimilarityMatrix& d, std::size_t k);

/// Per-item silhouette widths for a labelling; singletons score 0.
std::vector<double> silhouette_widths(const DissimilarityMatrix& d, std::span<const std::size_t> label, std::size_t k);

struct ClusterAssignment {
    std::map<int, int> cluster_of;       // stratum id -> cluster 1..J*
    int cluster_count = 0;               // J*
    std::vector<int> medoids;            // stratum ids, by cluster
    std::map<int, double> silhouette_by_j;
    std::vector<std::size_t> cluster_sizes;  // n*_j, observations per cluster
    double total_cost = 0.0;
    std::vector<std::string> warnings;
};

/// Clusters strata into `clusters` groups. Strata are ordered by stratum id
/// before clustering so ties resolve toward the lowest id. The seed is
/// accepted for interface stability; the result does not depend on it.
ClusterAssignment pam_cluster(std::span<const StratumProfile> strata, int clusters, std::uint64_t seed = 0);

struct ClusterCountOptions {
    int min_clusters = 2;
    int max_clusters = 40;  // capped at J-1
    std::size_t min_cluster_observations = 30;
};

/// Silhouette analysis over candidate cluster counts; ties go to fewer clusters.
ClusterAssignment select_cluster_count(std::span<const StratumProfile> strata,
                                       const ClusterCountOptions& options = {});

/// Largest bracket rank among the profiles (R), at least 2.
int rank_range_of(std::span<const StratumProfile> strata);

}  // namespace ineq
