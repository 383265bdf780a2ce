#include "ineq/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ineq/errors.hpp"

namespace ineq {

namespace {

constexpr double kSwapTolerance = 1e-12;

struct Nearest {
    std::vector<double> first;   // distance to nearest medoid
    std::vector<double> second;  // distance to second nearest
    std::vector<std::size_t> which;  // position in medoid list of the nearest
};

Nearest nearest_medoids(const DissimilarityMatrix& d, const std::vector<std::size_t>& medoids) {
    const std::size_t n = d.size();
    Nearest nr{std::vector<double>(n, std::numeric_limits<double>::infinity()),
               std::vector<double>(n, std::numeric_limits<double>::infinity()),
               std::vector<std::size_t>(n, 0)};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < medoids.size(); ++p) {
            const double dist = d(j, medoids[p]);
            // Equal distances keep the earlier (lower-index) medoid as nearest.
            const bool closer = dist < nr.first[j] ||
                                (dist == nr.first[j] && medoids[p] < medoids[nr.which[j]]);
            if (closer) {
                nr.second[j] = nr.first[j];
                nr.first[j] = dist;
                nr.which[j] = p;
            } else if (dist < nr.second[j]) {
                nr.second[j] = dist;
            }
        }
    }
    return nr;
}

double total_cost(const Nearest& nr) {
    double c = 0.0;
    for (double x : nr.first) c += x;
    return c;
}

}  // namespace

double gower_distance(const StratumProfile& a, const StratumProfile& b, int rank_range) {
    if (rank_range < 2) throw ValidationError("Gower distance needs an ordinal range R >= 2");
    for (const auto* p : {&a, &b}) {
        if (p->income_bracket_rank < 1 || p->income_bracket_rank > rank_range) {
            throw ValidationError("income bracket rank " + std::to_string(p->income_bracket_rank) +
                                  " of stratum " + std::to_string(p->stratum_id) + " outside 1.." +
                                  std::to_string(rank_range));
        }
    }
    const double ordinal =
        std::abs(a.income_bracket_rank - b.income_bracket_rank) / static_cast<double>(rank_range - 1);
    const double forms = a.special_forms_flag != b.special_forms_flag ? 1.0 : 0.0;
    const double useful = a.usefulness_code != b.usefulness_code ? 1.0 : 0.0;
    return (ordinal + forms + useful) / 3.0;
}

DissimilarityMatrix DissimilarityMatrix::gower(std::span<const StratumProfile> strata, int rank_range) {
    DissimilarityMatrix m(strata.size());
    for (std::size_t i = 0; i < strata.size(); ++i) {
        for (std::size_t j = i + 1; j < strata.size(); ++j) m.set(i, j, gower_distance(strata[i], strata[j], rank_range));
    }
    return m;
}

PamResult pam(const DissimilarityMatrix& d, std::size_t k) {
    const std::size_t n = d.size();
    if (k == 0 || k > n) {
        throw ValidationError("PAM needs 1 <= k <= n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");
    }

    // BUILD: start from the most central item, then greedily add the item
    // with the largest reduction in total dissimilarity.
    std::vector<std::size_t> medoids;
    std::vector<char> is_medoid(n, 0);
    {
        std::size_t best = 0;
        double best_sum = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += d(i, j);
            if (s < best_sum) {
                best_sum = s;
                best = i;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
    }
    std::vector<double> nearest(n);
    for (std::size_t j = 0; j < n; ++j) nearest[j] = d(j, medoids[0]);
    while (medoids.size() < k) {
        std::size_t best = n;
        double best_gain = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_medoid[i]) continue;
            double gain = 0.0;
            for (std::size_t j = 0; j < n; ++j) gain += std::max(nearest[j] - d(i, j), 0.0);
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        medoids.push_back(best);
        is_medoid[best] = 1;
        for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], d(j, best));
    }

    PamResult out;
    auto nr = nearest_medoids(d, medoids);
    out.total_cost = total_cost(nr);
    out.cost_trace.push_back(out.total_cost);

    // SWAP: apply the single best improving (medoid, non-medoid) exchange
    // until none reduces the cost.
    for (;;) {
        double best_delta = -kSwapTolerance;
        std::size_t best_p = k;
        std::size_t best_h = n;
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                double delta = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double dh = d(j, h);
                    if (nr.which[j] == p) {
                        delta += std::min(dh, nr.second[j]) - nr.first[j];
                    } else if (dh < nr.first[j]) {
                        delta += dh - nr.first[j];
                    }
                }
                if (delta < best_delta) {
                    best_delta = delta;
                    best_p = p;
                    best_h = h;
                }
            }
        }
        if (best_p == k) break;
        is_medoid[medoids[best_p]] = 0;
        medoids[best_p] = best_h;
        is_medoid[best_h] = 1;
        nr = nearest_medoids(d, medoids);
        const double cost = total_cost(nr);
        if (cost > out.total_cost + 1e-9) {
            throw NumericalError("PAM swap increased total cost");
        }
        out.total_cost = cost;
        out.cost_trace.push_back(cost);
        ++out.swaps;
    }

    // Canonical labels: clusters numbered by ascending medoid index.
    std::sort(medoids.begin(), medoids.end());
    nr = nearest_medoids(d, medoids);
    out.medoids = medoids;
    out.label = nr.which;
    out.total_cost = total_cost(nr);
    return out;
}

std::vector<double> silhouette_widths(const DissimilarityMatrix& d, std::span<const std::size_t> label, std::size_t k) {
    const std::size_t n = d.size();
    std::vector<std::size_t> count(k, 0);
    for (auto l : label) ++count[l];
    std::vector<double> s(n, 0.0);
    std::vector<double> sum(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (count[label[i]] <= 1) continue;
        std::fill(sum.begin(), sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sum[label[j]] += d(i, j);
        }
        const double a = sum[label[i]] / static_cast<double>(count[label[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == label[i] || count[c] == 0) continue;
            b = std::min(b, sum[c] / static_cast<double>(count[c]));
        }
        const double denom = std::max(a, b);
        s[i] = (std::isfinite(b) && denom > 0.0) ? (b - a) / denom : 0.0;
    }
    return s;
}

int rank_range_of(std::span<const StratumProfile> strata) {
    int r = 2;
    for (const auto& s : strata) r = std::max(r, s.income_bracket_rank);
    return r;
}

namespace {

std::vector<StratumProfile> sorted_by_id(std::span<const StratumProfile> strata) {
    std::vector<StratumProfile> s(strata.begin(), strata.end());
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.stratum_id < b.stratum_id; });
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].stratum_id == s[i - 1].stratum_id) {
            throw ValidationError("duplicate stratum id " + std::to_string(s[i].stratum_id));
        }
    }
    return s;
}

ClusterAssignment to_assignment(const std::vector<StratumProfile>& s, const PamResult& r, std::size_t k,
                                std::size_t min_obs) {
    ClusterAssignment a;
    a.cluster_count = static_cast<int>(k);
    a.total_cost = r.total_cost;
    a.cluster_sizes.assign(k, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        a.cluster_of[s[i].stratum_id] = static_cast<int>(r.label[i]) + 1;
        a.cluster_sizes[r.label[i]] += s[i].size;
    }
    for (auto m : r.medoids) a.medoids.push_back(s[m].stratum_id);
    for (std::size_t c = 0; c < k; ++c) {
        if (a.cluster_sizes[c] < min_obs) {
            a.warnings.push_back("cluster " + std::to_string(c + 1) + " has only " +
                                 std::to_string(a.cluster_sizes[c]) + " observations (< " + std::to_string(min_obs) +
                                 ")");
        }
    }
    return a;
}

}  // namespace

ClusterAssignment pam_cluster(std::span<const StratumProfile> strata, int clusters, std::uint64_t /*seed*/) {
    if (strata.empty()) throw ValidationError("no strata to cluster");
    if (clusters < 1) throw ValidationError("cluster count must be positive");
    if (static_cast<std::size_t>(clusters) > strata.size()) {
        throw ValidationError("cluster count " + std::to_string(clusters) + " exceeds the number of strata (" +
                              std::to_string(strata.size()) + ")");
    }
    const auto s = sorted_by_id(strata);
    const auto d = DissimilarityMatrix::gower(s, rank_range_of(s));
    const auto r = pam(d, static_cast<std::size_t>(clusters));
    return to_assignment(s, r, static_cast<std::size_t>(clusters), 30);
}

ClusterAssignment select_cluster_count(std::span<const StratumProfile> strata, const ClusterCountOptions& options) {
    if (strata.size() < 3) throw ValidationError("silhouette analysis needs at least 3 strata");
    const auto s = sorted_by_id(strata);
    const auto d = DissimilarityMatrix::gower(s, rank_range_of(s));

    bool all_zero = true;
    for (std::size_t i = 0; i < d.size() && all_zero; ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (d(i, j) != 0.0) {
                all_zero = false;
                break;
            }
        }
    }
    if (all_zero) {
        auto a = to_assignment(s, pam(d, 2), 2, options.min_cluster_observations);
        a.warnings.insert(a.warnings.begin(), "all stratum dissimilarities are zero; silhouette undefined, using 2 clusters");
        return a;
    }

    const int lo = std::max(2, options.min_clusters);
    const int hi = std::min(options.max_clusters, static_cast<int>(s.size()) - 1);
    if (lo > hi) throw ValidationError("empty candidate range for the cluster count");

    std::map<int, double> curve;
    int best_j = lo;
    double best_s = -std::numeric_limits<double>::infinity();
    PamResult best;
    for (int j = lo; j <= hi; ++j) {
        auto r = pam(d, static_cast<std::size_t>(j));
        const auto w = silhouette_widths(d, r.label, static_cast<std::size_t>(j));
        const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
        curve[j] = mean;
        if (mean > best_s + 1e-12) {
            best_s = mean;
            best_j = j;
            best = std::move(r);
        }
    }
    auto a = to_assignment(s, best, static_cast<std::size_t>(best_j), options.min_cluster_observations);
    a.silhouette_by_j = std::move(curve);
    return a;
}

}  // namespace ineq
