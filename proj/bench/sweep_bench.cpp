// Serial vs OpenMP comparison for the parallel sweep entry points.  Run with
// --benchmark_min_time=... as usual; each benchmark appears once per policy.

#include <complex>
#include <vector>

#include <benchmark/benchmark.h>

#include "treeshift/kernels.hpp"
#include "treeshift/parallel.hpp"
#include "treeshift/sweeps.hpp"
#include "treeshift/tree.hpp"

namespace {

using namespace treeshift;

const BergmanTreeKernel& bench_model() {
    static const DirectedTree tree = DirectedTree::two_ray(40);
    static const BergmanTreeKernel kernel(tree, 2);
    return kernel;
}

const std::vector<double>& bench_radii() {
    static const std::vector<double> radii = [] {
        std::vector<double> r;
        for (int i = 0; i < 160; ++i) r.push_back(0.95 * i / 159.0);
        return r;
    }();
    return radii;
}

void bm_condition_sweep(benchmark::State& state, Exec exec) {
    for (auto _ : state) {
        auto rows = condition_sweep(bench_model(), bench_radii(), exec);
        benchmark::DoNotOptimize(rows);
    }
}

void bm_gram_sweep(benchmark::State& state, Exec exec) {
    for (auto _ : state) {
        auto mins = gram_sweep(bench_model(), 20260819ULL, 32, 8, 0.8, exec);
        benchmark::DoNotOptimize(mins);
    }
}

void bm_vn_sweep(benchmark::State& state, Exec exec) {
    for (auto _ : state) {
        auto defects = vn_sweep(bench_model().shift(), 20260819ULL, 64, 8, 512, exec);
        benchmark::DoNotOptimize(defects);
    }
}

void bm_hypo_grid(benchmark::State& state, Exec exec) {
    static const DirectedTree tree = DirectedTree::two_ray(12);
    std::vector<double> s_values;
    std::vector<double> t_values;
    for (int i = 1; i <= 8; ++i) {
        s_values.push_back(0.70710678118654752 * i / 8.0);
        t_values.push_back(i / 9.0);
    }
    for (auto _ : state) {
        auto rows = hyponormality_grid(tree, s_values, t_values, exec);
        benchmark::DoNotOptimize(rows);
    }
}

BENCHMARK_CAPTURE(bm_condition_sweep, serial, Exec::serial);
BENCHMARK_CAPTURE(bm_condition_sweep, openmp, Exec::openmp);
BENCHMARK_CAPTURE(bm_gram_sweep, serial, Exec::serial);
BENCHMARK_CAPTURE(bm_gram_sweep, openmp, Exec::openmp);
BENCHMARK_CAPTURE(bm_vn_sweep, serial, Exec::serial);
BENCHMARK_CAPTURE(bm_vn_sweep, openmp, Exec::openmp);
BENCHMARK_CAPTURE(bm_hypo_grid, serial, Exec::serial);
BENCHMARK_CAPTURE(bm_hypo_grid, openmp, Exec::openmp);

}  // namespace

BENCHMARK_MAIN();
