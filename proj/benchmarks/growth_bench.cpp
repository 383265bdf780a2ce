#include <benchmark/benchmark.h>

#include "ineq/envelope.hpp"
#include "ineq/growth.hpp"

namespace {

void BM_SteadyState(benchmark::State& state) {
    const ineq::ModelDefaults d;
    const auto p = d.make(ineq::mu_high_from_eta(0.39, 0.15, d.alpha, d.delta), 0.15);
    const ineq::Grid grid{-5.0, 20.0, static_cast<std::size_t>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(ineq::steady_state(p, grid).mass());
}

void BM_ShockPath(benchmark::State& state) {
    ineq::ShockExperiment ex;
    ex.delta_mu = 0.0785;
    for (auto _ : state) benchmark::DoNotOptimize(ineq::run_shock(0.39, 0.15, ex).shares.back());
}

}  // namespace

BENCHMARK(BM_SteadyState)->Arg(1001)->Arg(2001)->Arg(4001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShockPath)->Unit(benchmark::kMillisecond);
