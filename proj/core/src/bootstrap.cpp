#include "ineq/bootstrap.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "ineq/errors.hpp"
#include "ineq/parallel.hpp"
#include "ineq/rng.hpp"

namespace ineq {

ReplicateDesign ReplicateDesign::from_assignment(const MicrodataSet& sample, const ClusterAssignment& assignment) {
    if (!sample.stratified()) throw ValidationError("cluster-stratified replicates need stratum labels");
    ReplicateDesign d;
    d.n_ = sample.size();
    d.members_.resize(static_cast<std::size_t>(assignment.cluster_count));
    const auto strata = sample.strata();
    for (std::size_t i = 0; i < strata.size(); ++i) {
        const auto it = assignment.cluster_of.find(strata[i]);
        if (it == assignment.cluster_of.end()) {
            throw ValidationError("stratum " + std::to_string(strata[i]) + " is not covered by the cluster assignment");
        }
        d.members_[static_cast<std::size_t>(it->second - 1)].push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t j = 0; j < d.members_.size(); ++j) {
        if (d.members_[j].empty()) {
            throw ValidationError("cluster " + std::to_string(j + 1) + " has no sampled observations");
        }
    }
    return d;
}

ReplicateDesign ReplicateDesign::by_stratum(const MicrodataSet& sample) {
    if (!sample.stratified()) return single_cluster(sample.size());
    std::map<int, std::vector<std::uint32_t>> groups;
    for (std::size_t i = 0; i < sample.size(); ++i) groups[sample.strata()[i]].push_back(static_cast<std::uint32_t>(i));
    ReplicateDesign d;
    d.n_ = sample.size();
    for (auto& [s, members] : groups) d.members_.push_back(std::move(members));
    return d;
}

ReplicateDesign ReplicateDesign::single_cluster(std::size_t n) {
    if (n == 0) throw ValidationError("cannot resample an empty sample");
    ReplicateDesign d;
    d.n_ = n;
    d.members_.resize(1);
    d.members_[0].resize(n);
    for (std::size_t i = 0; i < n; ++i) d.members_[0][i] = static_cast<std::uint32_t>(i);
    return d;
}

void ReplicateDesign::draw(std::uint64_t seed, std::size_t l, std::vector<std::uint32_t>& indices) const {
    Rng rng(derive_seed(seed, l));
    indices.clear();
    indices.reserve(n_);
    for (const auto& cluster : members_) {
        for (std::size_t k = 0; k < cluster.size(); ++k) indices.push_back(cluster[rng.below(cluster.size())]);
    }
}

void ReplicateDesign::draw_counts(std::uint64_t seed, std::size_t l, std::vector<std::uint32_t>& counts) const {
    Rng rng(derive_seed(seed, l));
    counts.assign(n_, 0);
    for (const auto& cluster : members_) {
        for (std::size_t k = 0; k < cluster.size(); ++k) ++counts[cluster[rng.below(cluster.size())]];
    }
}

ReplicateSet make_replicates(const ReplicateDesign& design, std::size_t L, std::uint64_t seed, std::size_t threads) {
    if (L < 1) throw ValidationError("replicate count L must be positive");
    ReplicateSet set;
    set.seed = seed;
    set.n = design.size();
    set.replicates.resize(L);
    parallel_for(L, threads, [&](std::size_t l) { design.draw(seed, l + 1, set.replicates[l]); });
    return set;
}

ReplicateSet make_replicates(const MicrodataSet& sample, const ClusterAssignment& assignment, std::size_t L,
                             std::uint64_t seed, std::size_t threads) {
    return make_replicates(ReplicateDesign::from_assignment(sample, assignment), L, seed, threads);
}

namespace {

constexpr char kMagic[8] = {'I', 'N', 'E', 'Q', 'R', 'E', 'P', '1'};

template <typename T>
void put(std::ostream& out, T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto* p = reinterpret_cast<unsigned char*>(&v);
        std::reverse(p, p + sizeof(T));
    }
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ValidationError("truncated replicate file");
    if constexpr (std::endian::native == std::endian::big) {
        auto* p = reinterpret_cast<unsigned char*>(&v);
        std::reverse(p, p + sizeof(T));
    }
    return v;
}

}  // namespace

void write_replicates(const ReplicateSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write replicate file: " + path.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint64_t>(out, set.replicates.size());
    put<std::uint64_t>(out, set.n);
    put<std::uint64_t>(out, set.seed);
    for (const auto& r : set.replicates) {
        if (r.size() != set.n) throw ValidationError("replicate length differs from n");
        for (auto i : r) put<std::uint32_t>(out, i);
    }
}

ReplicateSet read_replicates(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open replicate file: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw ValidationError("not a replicate file");
    ReplicateSet set;
    const auto L = get<std::uint64_t>(in);
    set.n = get<std::uint64_t>(in);
    set.seed = get<std::uint64_t>(in);
    set.replicates.assign(L, std::vector<std::uint32_t>(set.n));
    for (auto& r : set.replicates) {
        for (auto& i : r) {
            i = get<std::uint32_t>(in);
            if (i >= set.n) throw ValidationError("replicate index out of range");
        }
    }
    return set;
}

BootstrapResult run_bootstrap(const MicrodataSet& data, const ReplicateDesign& design,
                              const BootstrapOptions& options) {
    if (options.replicates < 2) throw ValidationError("bootstrap needs L >= 2 replicates");
    if (design.size() != data.size()) throw ValidationError("replicate design does not match the sample size");
    if (options.ks.empty()) throw ValidationError("no fractiles requested");
    for (double k : options.ks) ShareQuery{options.variable, k}.validate();

    const std::size_t M = data.implicate_count();
    const std::size_t n = data.size();
    const std::size_t K = options.ks.size();
    const std::size_t var = data.variable_index(options.variable);

    BootstrapResult result;
    result.estimates = estimate_shares(data, options.variable, options.ks);

    // Sort each implicate once; replicates only rescale weights.
    std::vector<std::vector<std::uint32_t>> order(M);
    std::vector<std::vector<double>> sorted_values(M);
    std::vector<std::vector<double>> sorted_weights(M);
    for (std::size_t m = 0; m < M; ++m) {
        const auto values = data.values(m, var);
        const auto idx = ascending_order(values, data.ids());
        order[m].assign(idx.begin(), idx.end());
        sorted_values[m].resize(n);
        sorted_weights[m].resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            sorted_values[m][j] = values[idx[j]];
            sorted_weights[m][j] = data.weights(m)[idx[j]];
        }
    }

    const std::size_t L = options.replicates;
    result.replicate_values.assign(K, std::vector<double>(L));
    parallel_for(L, options.threads, [&](std::size_t l) {
        std::vector<std::uint32_t> counts;
        std::vector<double> w(n);
        design.draw_counts(options.seed, l + 1, counts);
        std::vector<double> acc(K, 0.0);
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t j = 0; j < n; ++j) w[j] = sorted_weights[m][j] * counts[order[m][j]];
            for (std::size_t q = 0; q < K; ++q) acc[q] += compute_top_share_sorted(sorted_values[m], w, options.ks[q]).p_hat;
        }
        for (std::size_t q = 0; q < K; ++q) result.replicate_values[q][l] = acc[q] / static_cast<double>(M);
    });

    for (std::size_t q = 0; q < K; ++q) {
        auto& e = result.estimates[q];
        e.replicates = L;
        e.sigma1 = sampling_error(result.replicate_values[q]);
        e.sigma2 = imputation_error(e.per_implicate, e.point, q == 0 ? &result.warnings : nullptr);
        e.sigma = combined_error(*e.sigma1, *e.sigma2, M);
        if (options.percentile_interval) {
            result.intervals.push_back(percentile_interval(result.replicate_values[q], options.level));
        } else {
            result.intervals.push_back(confidence_interval(e.point, *e.sigma, options.level));
        }
    }
    return result;
}

}  // namespace ineq
