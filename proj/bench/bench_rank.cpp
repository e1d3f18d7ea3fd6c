#include <benchmark/benchmark.h>

#include <random>

#include "opalg/linalg.hpp"

using namespace opalg;

namespace {

SparseMatrix make_matrix(int n, double density) {
    Field F(5);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(0, 1);
    SparseMatrix M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (u(rng) < density) M.set(i, j, 1 + (i * 7 + j) % 4);
    return M;
}

void BM_rank_dense_serial(benchmark::State& st) {
    Field F(5);
    auto M = make_matrix(static_cast<int>(st.range(0)), 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(rank_dense(M, F, false));
}

void BM_rank_dense_omp(benchmark::State& st) {
    Field F(5);
    auto M = make_matrix(static_cast<int>(st.range(0)), 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(rank_dense(M, F, true));
}

void BM_rank_sparse(benchmark::State& st) {
    Field F(5);
    auto M = make_matrix(static_cast<int>(st.range(0)), 0.01);
    for (auto _ : st) benchmark::DoNotOptimize(rank_sparse(M, F));
}

void BM_rank_reference(benchmark::State& st) {
    Field F(5);
    auto M = make_matrix(static_cast<int>(st.range(0)), 0.01);
    for (auto _ : st) benchmark::DoNotOptimize(rank_reference(M, F));
}

}  // namespace

BENCHMARK(BM_rank_dense_serial)->Arg(256)->Arg(512);
BENCHMARK(BM_rank_dense_omp)->Arg(256)->Arg(512);
BENCHMARK(BM_rank_sparse)->Arg(1000)->Arg(4000);
BENCHMARK(BM_rank_reference)->Arg(1000)->Arg(4000);

BENCHMARK_MAIN();
