#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ineq/clustering.hpp"
#include "ineq/error_components.hpp"
#include "ineq/microdata.hpp"
#include "ineq/topshare.hpp"

namespace ineq {

/// Resampling clusters of a base sample: which observation indices belong
/// to each cluster. Replicate l draws n*_j indices with replacement from
/// cluster j, using the sub-seed derive_seed(seed, l), so any replicate can
/// be regenerated independently of the others.
class ReplicateDesign {
public:
    /// Clusters from a stratum assignment; every sampled stratum must be covered.
    static ReplicateDesign from_assignment(const MicrodataSet& sample, const ClusterAssignment& assignment);
    /// Each stratum resampled on its own (no clustering).
    static ReplicateDesign by_stratum(const MicrodataSet& sample);
    /// Simple bootstrap over all observations.
    static ReplicateDesign single_cluster(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] std::size_t cluster_count() const noexcept { return members_.size(); }
    [[nodiscard]] const std::vector<std::uint32_t>& members(std::size_t j) const { return members_[j]; }

    /// Indices of replicate l (1-based), cluster by cluster.
    void draw(std::uint64_t seed, std::size_t l, std::vector<std::uint32_t>& indices) const;
    /// Multiplicity of every base observation in replicate l.
    void draw_counts(std::uint64_t seed, std::size_t l, std::vector<std::uint32_t>& counts) const;

private:
    std::size_t n_ = 0;
    std::vector<std::vector<std::uint32_t>> members_;
};

struct ReplicateSet {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> replicates;  // L lists of n indices

    [[nodiscard]] std::size_t size() const noexcept { return replicates.size(); }
};

ReplicateSet make_replicates(const ReplicateDesign& design, std::size_t L, std::uint64_t seed,
                             std::size_t threads = 1);
ReplicateSet make_replicates(const MicrodataSet& sample, const ClusterAssignment& assignment, std::size_t L,
                             std::uint64_t seed, std::size_t threads = 1);

/// Binary cache format: "INEQREP1", u64 L, u64 n, u64 seed, then L*n u32
/// little-endian indices.
void write_replicates(const ReplicateSet& set, const std::filesystem::path& path);
ReplicateSet read_replicates(const std::filesystem::path& path);

struct BootstrapOptions {
    std::string variable = "income";
    std::vector<double> ks{0.9};
    std::size_t replicates = 999;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    double level = 0.95;
    bool percentile_interval = false;
};

struct BootstrapResult {
    std::vector<ShareEstimate> estimates;               // one per k, errors filled in
    std::vector<Interval> intervals;                    // one per k
    std::vector<std::vector<double>> replicate_values;  // [k][l], mean over implicates
    std::vector<std::string> warnings;
};

/// Top-share estimates with sampling, imputation and combined errors.
/// Replicate l reuses the same respondent indices in every implicate and
/// its estimate is the mean over implicates.
BootstrapResult run_bootstrap(const MicrodataSet& data, const ReplicateDesign& design,
                              const BootstrapOptions& options);

}  // namespace ineq
