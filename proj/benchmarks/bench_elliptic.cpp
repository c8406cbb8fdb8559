#include "heun/elliptic.hpp"

#include <benchmark/benchmark.h>

using namespace heun;

static void BM_theta_all(benchmark::State& state) {
    const Complex tau(0.0, 1.0);
    const Complex x(0.31, 0.22);
    for (auto _ : state) benchmark::DoNotOptimize(theta_all(x, tau));
}
BENCHMARK(BM_theta_all);

static void BM_theta_all_reduced(benchmark::State& state) {
    // argument far outside the fundamental strip, exercising the reduction
    const Complex tau(0.0, 1.0);
    const Complex x(7.31, 5.22);
    for (auto _ : state) benchmark::DoNotOptimize(theta_all(x, tau));
}
BENCHMARK(BM_theta_all_reduced);

static void BM_wp(benchmark::State& state) {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Complex z(0.31, 0.22);
    for (auto _ : state) benchmark::DoNotOptimize(wp_family(z, lat, WpKind::wp));
}
BENCHMARK(BM_wp);

static void BM_lattice_constants(benchmark::State& state) {
    const Lattice lat = Lattice::from_tau(Complex(0.2, 0.9));
    for (auto _ : state) benchmark::DoNotOptimize(lattice_constants(lat));
}
BENCHMARK(BM_lattice_constants);

static void BM_wp_inverse(benchmark::State& state) {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Complex a(3.7, 1.1);
    for (auto _ : state) benchmark::DoNotOptimize(wp_inverse(a, lat));
}
BENCHMARK(BM_wp_inverse);
