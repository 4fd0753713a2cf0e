#include <benchmark/benchmark.h>

#include "nystromkit/approx.hpp"
#include "nystromkit/kernels.hpp"
#include "nystromkit/rng.hpp"
#include "nystromkit/sketch.hpp"

using namespace nystromkit;

static void BM_Discretize(benchmark::State& state) {
    const Kernel kernel = Kernel::squared_exp(0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(discretize(kernel, QuadRule::GaussLegendre, state.range(0)));
}
BENCHMARK(BM_Discretize)->Arg(100)->Arg(400)->Arg(1000);

static void BM_Eig(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    const Matrix W = standard_gaussian(n, n, 1);
    const Matrix E = W * W.transpose();
    for (auto _ : state) {
        SpsdMatrix A(E);  // fresh cache each iteration
        benchmark::DoNotOptimize(A.eig().eigenvalues.sum());
    }
}
BENCHMARK(BM_Eig)->Arg(100)->Arg(400)->Arg(1000);

static void BM_LowRankApprox(benchmark::State& state) {
    const Eigen::Index n = 500, w = state.range(0);
    Vector lam(n);
    for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::pow(1.05, -double(i));
    const SpsdMatrix A(Matrix(lam.asDiagonal()));
    const Matrix Omega = standard_gaussian(n, w, 2);
    for (auto _ : state) benchmark::DoNotOptimize(nystrom_plain(A, Omega).rank());
}
BENCHMARK(BM_LowRankApprox)->Arg(20)->Arg(50)->Arg(100);

static void BM_StabilizedApprox(benchmark::State& state) {
    const Eigen::Index n = 500, w = state.range(0);
    Vector lam(n);
    for (Eigen::Index i = 0; i < n; ++i) lam(i) = std::pow(1.05, -double(i));
    const SpsdMatrix A(Matrix(lam.asDiagonal()));
    const Matrix Omega = standard_gaussian(n, w, 3);
    for (auto _ : state) benchmark::DoNotOptimize(nystrom_stabilized(A, Omega).rank());
}
BENCHMARK(BM_StabilizedApprox)->Arg(20)->Arg(50)->Arg(100);

BENCHMARK_MAIN();
