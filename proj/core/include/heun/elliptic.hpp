#ifndef HEUN_ELLIPTIC_HPP
#define HEUN_ELLIPTIC_HPP

#include "heun/common.hpp"

#include <array>
#include <vector>

namespace heun {

/// Period lattice spanned by (2*omega1, 2*omega3) with Im(omega3/omega1) > 0.
/// The normalized constructors fix omega1 = 1/2, the convention used by all
/// theta-function formulas in this library.
struct Lattice {
    Complex omega1;
    Complex omega3;
    Complex tau;  // omega3 / omega1
    Complex p;    // exp(2 pi i tau), |p| < 1

    static Lattice from_tau(Complex tau);
    static Lattice from_nome(Complex p);
    static Lattice from_half_periods(Complex omega1, Complex omega3);

    Complex omega2() const { return -omega1 - omega3; }
    /// Half-period omega_i for i = 0..3 (omega0 = 0).
    Complex half_period(int i) const;
    bool normalized() const;  // omega1 == 1/2 up to 1e-14
};

/// Derived lattice constants: e_i = wp(omega_i), eta_i = zeta(omega_i) and the
/// modular invariants g2, g3.
struct LatticeConstants {
    Lattice lat;
    Complex e1, e2, e3;
    Complex eta1, eta2, eta3;
    Complex g2, g3;

    Complex e(int i) const { return i == 1 ? e1 : (i == 2 ? e2 : e3); }
    Complex eta(int i) const { return i == 1 ? eta1 : (i == 2 ? eta2 : eta3); }
};

LatticeConstants lattice_constants(const Lattice& lat);

/// theta(x) = 2 sum_{n>=1} (-1)^(n-1) exp(i pi tau (n-1/2)^2) sin((2n-1) pi x)
/// and its first three derivatives in x.
struct ThetaValues {
    Complex t0, t1, t2, t3;  // theta, theta', theta'', theta'''
    Complex d(int order) const;
};

ThetaValues theta_all(Complex x, Complex tau);
Complex theta_eval(Complex x, Complex tau, int order);

enum class WpKind { wp, wp_prime, wp_second, zeta, sigma, cosigma1, cosigma2, cosigma3 };

/// Weierstrass family evaluated through theta series.  Throws PoleAt when z is
/// within 1e-10 (in lattice units) of a pole of the requested kind.
Complex wp_family(Complex z, const Lattice& lat, WpKind kind);

/// One preimage t of a under wp, reduced to the centered fundamental domain.
/// The branch (t vs -t) is NOT fixed here; callers fix it through wp'.
Complex wp_inverse(Complex a, const Lattice& lat);

/// Nome expansion of wp at omega1 = 1/2: wp(x) ~ sum_k c_k p^k with
///   c_0 = pi^2/sin^2(pi x) - pi^2/3,
///   c_k = -8 pi^2 sum_{n | k} n (cos 2 n pi x - 1), k >= 1.
/// With half_shift the expansion is the one of wp(x + 1/2): cos 2 n pi x is
/// replaced by (-1)^n cos 2 n pi x and the leading term by pi^2/cos^2(pi x).
std::vector<Complex> wp_p_expansion(Complex x, int K, bool half_shift = false);

/// Deterministic sample points in the fundamental cell, at least `margin`
/// away (in lattice units) from every half-period lattice point.
std::vector<Complex> fundamental_points(const Lattice& lat, int count, unsigned seed,
                                        double margin = 0.05);

/// Distance from z to the full period lattice / half-period lattice, measured
/// in the normalized frame (lattice units).
double lattice_distance(Complex z, const Lattice& lat);
double half_lattice_distance(Complex z, const Lattice& lat);

} // namespace heun

#endif
