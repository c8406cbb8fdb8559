#ifndef HEUN_TRIG_SPECTRUM_HPP
#define HEUN_TRIG_SPECTRUM_HPP

#include "heun/common.hpp"
#include "heun/rational.hpp"

namespace heun {

/// C_T = (l0(l0+1) + l1(l1+1)) pi^2 / 3.
double trig_ct(int l0, int l1);

/// Eigenmode of the gauge-transformed trigonometric Hamiltonian: psi_m is the
/// terminating hypergeometric 2F1(-m, alpha+m; beta; w) with alpha = l0+l1+2,
/// beta = (2 l0 + 3)/2, as an exact polynomial in w = (1 - cos 2 pi x)/2;
/// constant term 1; eigenvalue pi^2 (2m + l0 + l1 + 2)^2.
struct JacobiMode {
    int l0 = 0, l1 = 0, m = 0;
    double eigenvalue = 0.0;
    RatPoly psi;
};

JacobiMode jacobi_mode(int l0, int l1, int m);

/// Exact image of a w-polynomial under the gauge-transformed trigonometric
/// Hamiltonian, in units of pi^2:
///   H_T / pi^2 = -4 [ w(1-w) d^2/dw^2 + (beta - (alpha+1) w) d/dw ] + (l0+l1+2)^2.
RatPoly apply_trig_hamiltonian(const RatPoly& f, int l0, int l1);

/// Inner product <Phi p, Phi q> on [0,1] with Phi = (sin pi x)^(l0+1) (cos pi x)^(l1+1),
/// for w-polynomials p, q; exact Beta-moment evaluation.
double inner_product(const RatPoly& f, const RatPoly& g, int l0, int l1);
/// The same divided by the common transcendental factor B(l0+3/2, l1+3/2)/pi;
/// exact rational (zero iff the full product is zero).
Rat inner_product_reduced(const RatPoly& f, const RatPoly& g, int l0, int l1);

/// Proportionality constant between the symmetrized trigonometric Bethe
/// function Lambda_T(x) - (-1)^l0 Lambda_T(-x) at c = l0+l1+2+2m and
/// Phi(x) psi_m(x), sampled at 10 points (throws NotProportional if the
/// sampled ratio is not constant to 1e-6).
Complex lambda_sym_ratio(int l0, int l1, int m);

} // namespace heun

#endif
