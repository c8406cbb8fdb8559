#ifndef HEUN_SPECTRAL_CURVE_HPP
#define HEUN_SPECTRAL_CURVE_HPP

#include "heun/couplings.hpp"
#include "heun/elliptic.hpp"
#include "heun/poly.hpp"
#include "heun/rational.hpp"

#include <string>
#include <vector>

namespace heun {

struct BetheState;  // defined in heun/bethe.hpp

/// Even doubly periodic kernel Xi(x,E) expanded over the basis
///   { 1 } u { wp(x + omega_i)^(l_i - j) : i = 0..3, j = 0..l_i-1 }.
/// Slot 0 is the constant c_0; the remaining slots are the b_j^(i) in basis
/// order (i ascending, powers descending).  Either a single-energy coefficient
/// vector or the polynomial form (coefficients as polynomials in E) is held.
struct XiRepresentation {
    Couplings c;
    Lattice lat;
    LatticeConstants lc;

    Complex energy{};              // energy of the per-energy form
    std::vector<Complex> coeff;    // per-energy coefficients (unit norm)

    bool has_polys = false;
    std::vector<Poly> coeff_polys; // polynomial form, c_0 monic of degree g
    int g = -1;                    // deg c_0 in the polynomial form
    std::vector<std::string> diagnostics;

    int basis_size() const { return 1 + c.sum(); }
    /// (i, power) of basis slot b >= 1.
    std::pair<int, int> slot(int b) const;

    std::vector<Complex> coeffs_at(Complex E) const;

    /// Xi, Xi', Xi'' at x for the given coefficient vector.
    std::array<Complex, 3> values(Complex x, const std::vector<Complex>& co) const;
    Complex value(Complex x) const { return values(x, coeff)[0]; }

    /// Residual of the third-order product equation at x, relative to the
    /// magnitude of its largest term.
    double prodde_residual(Complex x, const std::vector<Complex>& co, Complex E) const;
    double prodde_residual(Complex x) const { return prodde_residual(x, coeff, energy); }

    /// Numerator polynomial N(z) with Xi = N(z) / prod_{i>=1} (z - e_i)^{l_i}.
    Poly z_numerator(const std::vector<Complex>& co) const;
};

/// Nullspace kernel at one energy; unit-norm, first nonzero coefficient
/// positive real.  Throws AmbiguousNullspace when the two smallest singular
/// values of the collocation matrix are too close.
XiRepresentation xi_at_energy(const Couplings& c, const Lattice& lat, Complex E,
                              unsigned seed = 0);

/// Polynomial form of the coefficients: interpolation of per-energy kernels in
/// the general case, the z-power recursion for l2 = l3 = 0, l0 >= l1.
/// force_general disables the fast path (used to cross-check the two routes).
XiRepresentation xi_polynomials(const Couplings& c, const Lattice& lat, unsigned seed = 0,
                                bool force_general = false);

/// Monic spectral polynomial Q(E) of degree 2g+1.
struct SpectralPolynomial {
    Poly Q;
    int g = 0;
    std::vector<std::string> diagnostics;
};

/// Value of the right-hand side of the Q(E) formula at one x (x-independent in
/// exact arithmetic), for the given per-energy coefficients.
Complex q_at_energy(const XiRepresentation& xi, const std::vector<Complex>& co, Complex E,
                    Complex x);

SpectralPolynomial q_polynomial(const Couplings& c, const Lattice& lat, unsigned seed = 0);

/// Trigonometric limit of Q, from the closed root list (pi^2 convention):
/// root -C_T and double roots pi^2 n^2 - C_T over the parity-matched integers.
SpectralPolynomial trig_q_polynomial(int l0, int l1);
/// The same roots divided by pi^2, as exact rationals with multiplicities.
std::vector<std::pair<Rat, int>> trig_q_roots_over_pi2(int l0, int l1);

/// Closed-form eigenfunction built from a Bethe state (the sigma-quotient
/// ansatz), up to its fixed normalization constant.
Complex eigenfunction_lambda(Complex x, Complex E, const BetheState& state);

} // namespace heun

#endif
