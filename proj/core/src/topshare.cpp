#include "ineq/topshare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ineq/errors.hpp"
#include "ineq/numeric.hpp"

namespace ineq {

void ShareQuery::validate() const {
    if (!(k > 0.0 && k < 1.0)) throw ValidationError("k must lie in (0, 1), got " + format_number(k));
}

std::vector<std::size_t> ascending_order(std::span<const double> values, std::span<const std::int64_t> ids) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    if (ids.empty()) {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    } else {
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            if (values[a] != values[b]) return values[a] < values[b];
            return ids[a] < ids[b];
        });
    }
    return order;
}

ShareComputation compute_top_share_sorted(std::span<const double> g, std::span<const double> w, double k) {
    if (!(k > 0.0 && k < 1.0)) throw ValidationError("k must lie in (0, 1), got " + format_number(k));
    if (g.size() != w.size()) throw ValidationError("values and weights differ in length");

    CompensatedSum weight_total;
    CompensatedSum value_total;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!std::isfinite(g[j])) throw ValidationError("nonfinite value in top-share input");
        if (!(w[j] >= 0.0) || !std::isfinite(w[j])) throw ValidationError("weights must be finite and nonnegative");
        if (w[j] == 0.0) continue;
        weight_total += w[j];
        value_total += w[j] * g[j];
    }
    const double N = weight_total.value();
    const double denom = value_total.value();
    if (!(N > 0.0)) throw ValidationError("population total N must be positive");
    if (denom == 0.0) throw NumericalError("weighted total of values is zero; top share undefined");

    ShareComputation out;
    out.m_k = k * N;

    // Walk the order statistics until the next weight would pass m_k.
    CompensatedSum cum_w;
    CompensatedSum cum_wg;
    std::size_t j = 0;
    std::size_t next = g.size();
    for (; j < g.size(); ++j) {
        if (w[j] == 0.0) continue;
        if (cum_w.value() + w[j] > out.m_k) {
            next = j;
            break;
        }
        cum_w += w[j];
        cum_wg += w[j] * g[j];
        ++out.j_star;
    }
    if (next == g.size()) {
        std::ostringstream msg;
        msg << "k = " << format_number(k) << " leaves no observation above m_k = " << format_number(out.m_k)
            << " (N = " << format_number(N) << ")";
        throw NumericalError(msg.str());
    }

    const double below = cum_wg.value();
    out.omega = (out.m_k - cum_w.value()) / w[next];
    out.r_lower = below / denom;
    out.r_upper = (below + w[next] * g[next]) / denom;
    out.r_hat = (below + out.omega * w[next] * g[next]) / denom;
    out.p_hat = 1.0 - out.r_hat;
    return out;
}

ShareComputation compute_top_share(std::span<const double> values,
                                   std::span<const double> weights,
                                   double k,
                                   std::span<const std::int64_t> ids) {
    if (values.size() != weights.size()) throw ValidationError("values and weights differ in length");
    if (!ids.empty() && ids.size() != values.size()) throw ValidationError("ids and values differ in length");
    if (values.empty()) throw ValidationError("no observations");
    for (double x : values) {
        if (!std::isfinite(x)) throw ValidationError("nonfinite value in top-share input");
    }
    const auto order = ascending_order(values, ids);
    std::vector<double> g(values.size());
    std::vector<double> w(values.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        g[j] = values[order[j]];
        w[j] = weights[order[j]];
    }
    return compute_top_share_sorted(g, w, k);
}

double estimate_top_share(std::span<const double> values,
                          std::span<const double> weights,
                          double k,
                          std::span<const std::int64_t> ids) {
    return compute_top_share(values, weights, k, ids).p_hat;
}

double estimate_top_share(const ImplicateView& data, const ShareQuery& query) {
    query.validate();
    return estimate_top_share(data.values(query.variable), data.weights(), query.k, data.ids());
}

double grand_estimate(std::span<const double> per_implicate) {
    if (per_implicate.empty()) throw ValidationError("grand estimate needs at least one implicate estimate");
    return compensated_sum(per_implicate) / static_cast<double>(per_implicate.size());
}

std::vector<ShareEstimate> estimate_shares(const MicrodataSet& data,
                                           const std::string& variable,
                                           std::span<const double> ks,
                                           const std::string& dataset) {
    std::vector<ShareEstimate> out;
    for (double k : ks) {
        ShareQuery q{variable, k};
        q.validate();
        ShareEstimate e;
        e.variable = variable;
        e.k = k;
        e.n = data.size();
        e.N = data.population_total();
        e.dataset = dataset;
        for (std::size_t m = 0; m < data.implicate_count(); ++m) {
            e.per_implicate.push_back(estimate_top_share(data.implicate(m), q));
        }
        e.point = grand_estimate(e.per_implicate);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace ineq
