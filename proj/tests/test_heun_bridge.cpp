#include "heun/heun_bridge.hpp"

#include "heun/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace heun;

TEST_CASE("riemann scheme: exponents and Fuchs relation") {
    const LatticeConstants lc = lattice_constants(Lattice::from_tau(Complex(0.0, 1.0)));

    const auto rs1 = riemann_scheme(Couplings(1, 0, 0, 0), lc);
    CHECK(rs1.exponents[0][0] == Rat(1));        // (l0+1)/2 at infinity
    CHECK(rs1.exponents[0][1] == Rat(-1, 2));    // -l0/2
    for (int i = 1; i <= 3; ++i) {
        CHECK(rs1.exponents[static_cast<std::size_t>(i)][0] == Rat(1, 2));
        CHECK(rs1.exponents[static_cast<std::size_t>(i)][1] == Rat(0));
    }

    const auto rs0 = riemann_scheme(Couplings(0, 0, 0, 0), lc);
    for (int i = 0; i <= 3; ++i) {
        CHECK(rs0.exponents[static_cast<std::size_t>(i)][0] == Rat(1, 2));
        CHECK(rs0.exponents[static_cast<std::size_t>(i)][1] == Rat(0));
    }

    CHECK(riemann_scheme(Couplings(2, 1, 1, 0), lc).fuchs_sum() == Rat(2));
    // exact for every couplings tuple
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b)
            CHECK(riemann_scheme(Couplings(a, b, (a + b) % 3, 1), lc).fuchs_sum() == Rat(2));
}

TEST_CASE("heun parameters: zero-coupling case and Moebius image") {
    const LatticeConstants lc = lattice_constants(Lattice::from_tau(Complex(0.0, 1.0)));
    const Complex E(1.3, -0.4);
    const auto hp = to_heun_parameters(Couplings(0, 0, 0, 0), lc, E);
    CHECK(std::abs(hp.gamma - 0.5) < 1e-14);
    CHECK(std::abs(hp.delta - 0.5) < 1e-14);
    CHECK(std::abs(hp.epsilon - 0.5) < 1e-14);
    CHECK(std::abs(hp.alpha + hp.beta + 1.0 - (hp.gamma + hp.delta + hp.epsilon)) < 1e-12);
    CHECK(std::abs(hp.alpha * hp.beta) < 1e-14);
    // symbolic substitution for l = 0: q = -E / (4 (e2 - e1))
    CHECK(std::abs(hp.q - (-E / (4.0 * (lc.e2 - lc.e1)))) < 1e-12 * std::max(1.0, std::abs(hp.q)));
    CHECK(std::abs(hp.t - (lc.e3 - lc.e1) / (lc.e2 - lc.e1)) < 1e-14 * std::abs(hp.t));
}

TEST_CASE("heun parameters: alpha+beta+1 = gamma+delta+epsilon and E-affinity") {
    const LatticeConstants lc = lattice_constants(Lattice::from_tau(Complex(0.2, 0.9)));
    for (const auto& c : {Couplings(1, 1, 0, 0), Couplings(2, 1, 1, 0), Couplings(0, 2, 1, 3)}) {
        const auto h0 = to_heun_parameters(c, lc, Complex(0.0));
        const auto h1 = to_heun_parameters(c, lc, Complex(2.0, 1.0));
        const auto h2 = to_heun_parameters(c, lc, Complex(-3.0, 0.5));
        CHECK(std::abs(h0.alpha + h0.beta + 1.0 - (h0.gamma + h0.delta + h0.epsilon)) < 1e-12);
        CHECK(std::abs(h0.alpha - h1.alpha) + std::abs(h0.beta - h1.beta) +
                  std::abs(h0.gamma - h1.gamma) + std::abs(h0.t - h1.t) ==
              0.0);
        const Complex s01 = (h1.q - h0.q) / Complex(2.0, 1.0);
        const Complex s02 = (h2.q - h0.q) / Complex(-3.0, 0.5);
        CHECK(std::abs(s01 - s02) < 1e-12 * std::max(1.0, std::abs(s01)));
    }
}

TEST_CASE("heun parameters: degenerate lattice guard") {
    LatticeConstants lc = lattice_constants(Lattice::from_tau(Complex(0.0, 1.0)));
    lc.e2 = lc.e1;
    CHECK_THROWS_AS(to_heun_parameters(Couplings(1, 0, 0, 0), lc, Complex(1.0)), DegenerateLattice);
}

TEST_CASE("round trip: Heun-form solution pulled back solves the elliptic equation") {
    // Integrate the Heun ODE in w along the image of a segment in x, pull the
    // solution back through the index shift, and check the x-space equation by
    // finite differences.
    const Couplings c(1, 1, 0, 0);
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const LatticeConstants lc = lattice_constants(lat);
    const Complex E(1.0);
    const auto hp = to_heun_parameters(c, lc, E);

    // A real segment keeps the w-path clear of {0, 1, t}: here w(x) < 0 on (0, 1/2).
    const Complex x0(0.27);
    auto w_of_x = [&](Complex x) {
        return (wp_family(x, lat, WpKind::wp) - lc.e1) / (lc.e2 - lc.e1);
    };
    auto P = [&](Complex w) {
        return hp.gamma / w + hp.delta / (w - 1.0) + hp.epsilon / (w - hp.t);
    };
    auto Q = [&](Complex w) {
        return (hp.alpha * hp.beta * w - hp.q) / (w * (w - 1.0) * (w - hp.t));
    };
    auto g_of_x = [&](Complex x) {
        auto wos = [&](double s) { return w_of_x(x0 + s * (x - x0)); };
        auto dws = [&](double s) {
            const Complex xs = x0 + s * (x - x0);
            return wp_family(xs, lat, WpKind::wp_prime) * (x - x0) / (lc.e2 - lc.e1);
        };
        return oracles::integrate_second_order(wos, dws, P, Q, Complex(1.0), Complex(0.3, 0.1), 2500).g;
    };
    auto f_of_x = [&](Complex x) {
        // undo the index shift g = prod_i (z - e_i)^{l_i/2} f
        const Complex z = wp_family(x, lat, WpKind::wp);
        const Complex shift = std::pow(z - lc.e1, 0.5 * c[1]) * std::pow(z - lc.e2, 0.5 * c[2]) *
                              std::pow(z - lc.e3, 0.5 * c[3]);
        return g_of_x(x) / shift;
    };
    auto V = [&](Complex x) {
        Complex acc = 0.0;
        for (int i = 0; i < 4; ++i)
            if (c.strength(i) != 0)
                acc += double(c.strength(i)) * wp_family(x + lat.half_period(i), lat, WpKind::wp);
        return acc;
    };
    double worst = 0.0;
    for (double xm : {0.32, 0.35, 0.38}) {
        worst = std::max(worst, oracles::schrodinger_residual(f_of_x, V, E, Complex(xm), 2e-3));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("frobenius series: construction and parity") {
    const Couplings c(2, 1, 0, 0);
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const LatticeConstants lc = lattice_constants(lat);
    const Complex E(0.7, 0.4);

    // a_1 at a zero-coupling singular point from first-order matching:
    // a_1 = (u_0 - E) / 2 with u_0 the constant potential term there.
    {
        const int i = 3;  // l_3 = 0
        auto a = frobenius_series(c, lat, i, FrobeniusExponent::lower, E, 3);
        Complex u0 = 0.0;
        for (int j = 0; j < 4; ++j) {
            if (j == i || c.strength(j) == 0) continue;
            // omega_i + omega_j reduces to the complementary half-period
            const Complex y = lat.half_period(i) + lat.half_period(j);
            u0 += double(c.strength(j)) * wp_family(y, lat, WpKind::wp);
        }
        CHECK(std::abs(a[1] - (u0 - E) / 2.0) < 1e-10 * std::max(1.0, std::abs(a[1])));
    }

    // leading behaviour of the two Frobenius branches: exponents -l_i and l_i+1,
    // both normalized to a_0 = 1
    auto lower = frobenius_series(c, lat, 0, FrobeniusExponent::lower, E, 8);
    auto upper = frobenius_series(c, lat, 0, FrobeniusExponent::upper, E, 8);
    CHECK(lower[0] == Complex(1.0));
    CHECK(upper[0] == Complex(1.0));

    // truncated series solves the equation near x = omega_i
    for (int i = 0; i < 4; ++i) {
        const int N = 16;
        auto a = frobenius_series(c, lat, i, FrobeniusExponent::upper, E, N);
        const int rho = c[i] + 1;
        auto f = [&](Complex x) {
            const Complex s = x - lat.half_period(i);
            Complex acc = 0.0, sp = 1.0;
            for (int k = 0; k <= N; ++k, sp *= s * s) acc += a[static_cast<std::size_t>(k)] * sp;
            return std::pow(s, rho) * acc;
        };
        auto V = [&](Complex x) {
            Complex acc = 0.0;
            for (int j = 0; j < 4; ++j)
                if (c.strength(j) != 0)
                    acc += double(c.strength(j)) * wp_family(x + lat.half_period(j), lat, WpKind::wp);
            return acc;
        };
        const Complex x = lat.half_period(i) + Complex(0.05);
        CHECK(oracles::schrodinger_residual(f, V, E, x, 5e-4) < 1e-8);
    }
    CHECK_THROWS_AS(frobenius_series(c, lat, 0, FrobeniusExponent::lower, E, 500), DomainError);
    (void)lc;
}

TEST_CASE("frobenius series: exact trigonometric recursion matches the floating one") {
    const Couplings c(1, 1, 0, 0);
    const Rat Ehat(7, 3);  // E = (7/3) pi^2
    auto exact = frobenius_series_trig(c, 0, FrobeniusExponent::upper, Ehat, 8);
    const Lattice lat = Lattice::from_nome(Complex(1e-12));
    auto num = frobenius_series(c, lat, 0, FrobeniusExponent::upper, Complex(to_double(Ehat) * pi * pi), 8);
    for (int k = 0; k <= 8; ++k) {
        const double scale = std::pow(pi, 2 * k);
        CHECK(std::abs(num[static_cast<std::size_t>(k)] - to_double(exact[static_cast<std::size_t>(k)]) * scale) <
              1e-6 * std::max(1.0, scale * std::abs(to_double(exact[static_cast<std::size_t>(k)]))));
    }
}
