#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "ineq/rng.hpp"
#include "ineq/topshare.hpp"

namespace {

void BM_TopShare(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    ineq::Rng rng(1);
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rng.lognormal(10.0, 1.2);
        w[i] = 1.0 + 99.0 * rng.uniform();
    }
    for (auto _ : state) benchmark::DoNotOptimize(ineq::estimate_top_share(v, w, 0.99));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TopShareSorted(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    ineq::Rng rng(2);
    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = rng.lognormal(10.0, 1.2);
        w[i] = 1.0 + 99.0 * rng.uniform();
    }
    std::sort(v.begin(), v.end());
    for (auto _ : state) benchmark::DoNotOptimize(ineq::compute_top_share_sorted(v, w, 0.99).p_hat);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_TopShare)->RangeMultiplier(10)->Range(1000, 1000000);
BENCHMARK(BM_TopShareSorted)->RangeMultiplier(10)->Range(1000, 1000000);
