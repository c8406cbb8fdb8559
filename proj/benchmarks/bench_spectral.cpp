#include "heun/bethe.hpp"
#include "heun/perturbation.hpp"
#include "heun/spectral_curve.hpp"

#include <benchmark/benchmark.h>

using namespace heun;

static void BM_xi_at_energy(benchmark::State& state) {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Couplings c(2, 1, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(xi_at_energy(c, lat, Complex(4.2, 0.3)));
}
BENCHMARK(BM_xi_at_energy);

static void BM_q_polynomial(benchmark::State& state) {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Couplings c(1, 1, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(q_polynomial(c, lat));
}
BENCHMARK(BM_q_polynomial);

static void BM_extract_refine(benchmark::State& state) {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Couplings c(2, 1, 0, 0);
    const auto xi = xi_polynomials(c, lat);
    const auto q = q_polynomial(c, lat);
    for (auto _ : state) {
        BetheState s = extract_bethe_roots(xi, Complex(5.0, 0.3), lat, q);
        benchmark::DoNotOptimize(newton_refine(s, BetheForm::theta, 1e-12));
    }
}
BENCHMARK(BM_extract_refine);

static void BM_trig_bethe_state(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(trig_bethe_state(3, 2, 1));
}
BENCHMARK(BM_trig_bethe_state);

static void BM_rayleigh_schrodinger(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(rayleigh_schrodinger(1, 1, 0, 3));
}
BENCHMARK(BM_rayleigh_schrodinger);
