#include "heun/heun_bridge.hpp"

#include <cmath>

namespace heun {

namespace {

// Klein four-group table of the half-periods: omega_i + omega_j = omega_{xor(i,j)} mod lattice.
constexpr int kHalfPeriodSum[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};

// Taylor coefficients of wp at a half-period: wp(omega_k + s) = sum A_n s^(2n),
// generated from wp'' = 6 wp^2 - g2/2.
template <typename T>
std::vector<T> wp_taylor_at_half(const T& ek, const T& g2, int terms) {
    std::vector<T> A(static_cast<std::size_t>(terms));
    A[0] = ek;
    for (int m = 0; m + 1 < terms; ++m) {
        T conv = T(0);
        for (int j = 0; j <= m; ++j) conv += A[static_cast<std::size_t>(j)] * A[static_cast<std::size_t>(m - j)];
        T rhs = T(6) * conv;
        if (m == 0) rhs -= g2 / T(2);
        A[static_cast<std::size_t>(m + 1)] = rhs / T((2 * m + 2) * (2 * m + 1));
    }
    return A;
}

// Regular part of the Laurent expansion at 0: wp(s) = s^-2 + sum_{n>=1} B_n s^(2n).
template <typename T>
std::vector<T> wp_laurent_at_zero(const T& g2, const T& g3, int terms) {
    std::vector<T> B(static_cast<std::size_t>(terms) + 1, T(0));
    if (terms >= 1) B[1] = g2 / T(20);
    if (terms >= 2) B[2] = g3 / T(28);
    for (int m = 3; m <= terms; ++m) {
        T conv = T(0);
        for (int j = 1; j <= m - 2; ++j) conv += B[static_cast<std::size_t>(j)] * B[static_cast<std::size_t>(m - 1 - j)];
        B[static_cast<std::size_t>(m)] = T(6) * conv / T(2 * m * (2 * m - 1) - 12);
    }
    return B;
}

template <typename T>
std::vector<T> frobenius_impl(const Couplings& c, int i, int rho, const std::array<T, 3>& e,
                              const T& g2, const T& g3, const T& E, int N) {
    if (N < 0 || N > 200) throw DomainError("frobenius_series: require 0 <= N <= 200");
    if (i < 0 || i > 3) throw DomainError("frobenius_series: singular index must be 0..3");

    // Even Taylor coefficients u_m of the potential about omega_i, after
    // removing its l_i(l_i+1)/s^2 singular part.
    std::vector<T> B = wp_laurent_at_zero<T>(g2, g3, N + 1);
    std::vector<T> u(static_cast<std::size_t>(N) + 1, T(0));
    for (int m = 1; m <= N; ++m) u[static_cast<std::size_t>(m)] = T(c.strength(i)) * B[static_cast<std::size_t>(m)];
    for (int j = 0; j < 4; ++j) {
        if (j == i || c[j] == 0) continue;
        int k = kHalfPeriodSum[i][j];  // != 0 because j != i
        std::vector<T> A = wp_taylor_at_half<T>(e[static_cast<std::size_t>(k - 1)], g2, N + 1);
        for (int m = 0; m <= N; ++m) u[static_cast<std::size_t>(m)] += T(c.strength(j)) * A[static_cast<std::size_t>(m)];
    }

    const int Li = c.strength(i);
    std::vector<T> a(static_cast<std::size_t>(N) + 1, T(0));
    a[0] = T(1);
    for (int k = 1; k <= N; ++k) {
        T rhs = E * a[static_cast<std::size_t>(k - 1)];
        for (int m = 0; m <= k - 1; ++m) rhs -= u[static_cast<std::size_t>(m)] * a[static_cast<std::size_t>(k - 1 - m)];
        // Never zero for k >= 1: the exponent gap 2 l_i + 1 is odd while the
        // series steps by 2.
        const T denom = T(Li) - T((rho + 2 * k) * (rho + 2 * k - 1));
        a[static_cast<std::size_t>(k)] = rhs / denom;
    }
    return a;
}

} // namespace

RiemannScheme riemann_scheme(const Couplings& c, const LatticeConstants& lc) {
    RiemannScheme rs;
    rs.points = {lc.e1, lc.e2, lc.e3};
    for (int i = 0; i < 4; ++i) {
        const Rat li = c[i];
        rs.exponents[static_cast<std::size_t>(i)] = {Rat(li + 1) / 2, Rat(-li) / 2};
    }
    return rs;
}

HeunParameters to_heun_parameters(const Couplings& c, const LatticeConstants& lc, Complex E) {
    const Complex e1 = lc.e1, e2 = lc.e2, e3 = lc.e3;
    const double scale = std::max({std::abs(e1), std::abs(e2), std::abs(e3), 1.0});
    if (std::abs(e1 - e2) < 1e-10 * scale || std::abs(e1 - e3) < 1e-10 * scale ||
        std::abs(e2 - e3) < 1e-10 * scale)
        throw DegenerateLattice("to_heun_parameters: branch points e_i coincide");

    const double l0 = c[0], l1 = c[1], l2 = c[2], l3 = c[3];
    HeunParameters hp;
    hp.gamma = 0.5 - l1;
    hp.delta = 0.5 - l2;
    hp.epsilon = 0.5 - l3;
    hp.alpha = 0.5 * (l0 + 1.0 - l1 - l2 - l3);
    hp.beta = -0.5 * (l0 + l1 + l2 + l3);
    hp.t = (e3 - e1) / (e2 - e1);

    // z-free part of the potential after the index shift with exponents -l_i/2.
    const Complex a1 = -0.5 * l1, a2 = -0.5 * l2, a3 = -0.5 * l3;
    const Complex K = 0.25 * E - e1 * (a2 + a3) * (a2 + a3) - e2 * (a1 + a3) * (a1 + a3) -
                      e3 * (a1 + a2) * (a1 + a2);
    hp.q = -(hp.alpha * hp.beta * e1 + K) / (e2 - e1);
    return hp;
}

std::vector<Complex> frobenius_series(const Couplings& c, const Lattice& lat, int i,
                                      FrobeniusExponent which, Complex E, int N) {
    LatticeConstants lc = lattice_constants(lat);
    const int rho = (which == FrobeniusExponent::lower) ? -c[i] : c[i] + 1;
    return frobenius_impl<Complex>(c, i, rho, {lc.e1, lc.e2, lc.e3}, lc.g2, lc.g3, E, N);
}

std::vector<Rat> frobenius_series_trig(const Couplings& c, int i, FrobeniusExponent which,
                                       const Rat& E_over_pi2, int N) {
    const int rho = (which == FrobeniusExponent::lower) ? -c[i] : c[i] + 1;
    const std::array<Rat, 3> e = {Rat(2, 3), Rat(-1, 3), Rat(-1, 3)};
    return frobenius_impl<Rat>(c, i, rho, e, Rat(4, 3), Rat(8, 27), E_over_pi2, N);
}

} // namespace heun
