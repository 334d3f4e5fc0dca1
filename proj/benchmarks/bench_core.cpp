#include "massflow/flow.hpp"
#include "massflow/oper.hpp"
#include "massflow/random_fields.hpp"
#include "massflow/shooting.hpp"
#include "massflow/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace massflow;

static void BM_SpdSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto dom = build_interval(0.0, 1.0, n);
    SpdTridiagFactor fac(dom->stiffness);
    std::vector<double> b(n, 1.0), x(n);
    for (auto _ : state) {
        fac.solve(b.data(), x.data());
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SpdSolve)->Arg(1024)->Arg(16384)->Arg(262144);

static void BM_SolveG(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto dom = build_interval(0.0, 1.0, n);
    FieldSampler sampler(dom, 8, 7);
    auto u = sampler.in_ball(1.0, 50.0);
    OperatorConfig cfg;
    cfg.p = 3.0;
    cfg.mu = 1.0;
    cfg.lambda_bar = 1.0;
    ConstrainedOperator op(dom, cfg);
    std::vector<double> w;
    double omega;
    for (auto _ : state) {
        op.solve_G(u, w, omega);
        benchmark::DoNotOptimize(omega);
    }
}
BENCHMARK(BM_SolveG)->Arg(1024)->Arg(16384);

static void BM_FlowStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto dom = build_interval(0.0, 1.0, n);
    FieldSampler sampler(dom, 8, 7);
    auto u = sampler.in_ball(1.0, 50.0);
    OperatorConfig cfg;
    cfg.p = 3.0;
    cfg.mu = 1.0;
    ConstrainedOperator op(dom, cfg);
    FlowConfig fc;
    double E = energy_of(*dom, u, 1.0, 3.0), dt = 0.01;
    for (auto _ : state) {
        flow_step(*dom, op, fc, u, E, dt);
        benchmark::DoNotOptimize(E);
    }
}
BENCHMARK(BM_FlowStep)->Arg(1024)->Arg(16384);

static void BM_Shoot(benchmark::State& state) {
    for (auto _ : state) {
        ShootResult s = shoot(10.0, 1.0, 7.0, 1);
        benchmark::DoNotOptimize(s.mass);
    }
}
BENCHMARK(BM_Shoot);

static void BM_Eigenpairs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto dom = build_interval(0.0, 1.0, n);
    for (auto _ : state) {
        auto spec = dirichlet_eigenpairs(dom, 6);
        benchmark::DoNotOptimize(spec.lambda.data());
    }
}
BENCHMARK(BM_Eigenpairs)->Arg(2048)->Arg(16384);

BENCHMARK_MAIN();
