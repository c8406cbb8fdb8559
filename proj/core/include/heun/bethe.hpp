#ifndef HEUN_BETHE_HPP
#define HEUN_BETHE_HPP

#include "heun/couplings.hpp"
#include "heun/elliptic.hpp"
#include "heun/rational.hpp"
#include "heun/spectral_curve.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace heun {

/// Auxiliary-root state of the sigma-quotient ansatz
///   Lambda(x) = prod_j sigma(x + t_j) / (sigma^l0 sigma1^l1 sigma2^l2 sigma3^l3) exp(c x).
/// csigma is the exponent of that form; the theta-form exponent (the c of the
/// exp(pi i c x) parameterization at omega1 = 1/2) is derived from the first
/// active constraint row.
struct BetheState {
    Couplings cpl;
    Lattice lat;
    std::vector<Complex> t;
    Complex csigma{};
    Complex E{};
    double residual_sigma = 0.0;
    double residual_theta = 0.0;
    std::optional<std::pair<Complex, Complex>> monodromy;

    Complex ctheta() const;
};

enum class BetheForm { sigma, theta };

/// Roots t_j of Xi(.,E) with the branch fixed through wp'(t_j) = 2C(E)/(dXi/dz),
/// C(E) the principal sqrt(-Q(E)); c from the exponential factor of the ansatz.
/// Throws SpectralDegenerate when |Q(E)| is below threshold.
BetheState extract_bethe_roots(const XiRepresentation& xi, Complex E, const Lattice& lat,
                               const SpectralPolynomial& q);

/// Absolute values of the l ansatz equations followed by the active constraint
/// rows (one per nonzero l_i).
std::vector<double> bethe_residual(const BetheState& s, BetheForm form);

Complex bethe_energy(const BetheState& s, BetheForm form);

/// Damped Gauss-Newton on the square subsystem in t (the exponent eliminated
/// through the first active constraint row).  The solution set is a curve
/// parameterized by E, so steps use the minimal-norm pseudo-solve.
BetheState newton_refine(const BetheState& s, BetheForm form, double tol);

/// The l rows of the square subsystem and their analytic Jacobian in t.
std::vector<Complex> bethe_square_rows(const BetheState& s, BetheForm form);
ComplexMatrix bethe_square_jacobian(const BetheState& s, BetheForm form);

/// Bloch multipliers (m1, m3) of Lambda under x -> x + 2 omega_i, from the
/// quasi-periodicity of the sigma quotient, checked against the direct ratio.
std::pair<Complex, Complex> monodromy_multipliers(const BetheState& s);

/// One record of a continuation path in the nome.
struct PathPoint {
    double p = 0.0;
    Complex E{};
    std::vector<Complex> t;
    Complex c_theta{};
    double residual_theta = 0.0;
};

/// Holomorphic continuation of the mode (l0, l1, m) from the exact
/// trigonometric solution at p = 0: at each nome step, solve h(E, p) =
/// pi^2 c_m^2 in E with the roots re-extracted from Xi.  c_m = l0+l1+2+2m.
std::vector<PathPoint> continue_in_p(int l0, int l1, int m, double p_target, int steps,
                                     unsigned seed = 0);

enum class SigmaMethod { recursion, closed_form };

/// Elementary symmetric functions sigma_0..sigma_{l0+l1} of the trigonometric
/// Bethe roots, exact rationals.  closed_form evaluates every applicable case
/// of the explicit product formulas and checks they agree.
std::vector<Rat> trig_sigma_coefficients(int l0, int l1, const Rat& c, SigmaMethod method);

struct TrigBetheState {
    int l0 = 0, l1 = 0, m = 0;
    Rat c;
    std::vector<Rat> sigma;
    std::vector<Complex> T;
    double E = 0.0;  // pi^2 c^2
};

TrigBetheState trig_bethe_state(int l0, int l1, int m);

/// Trigonometric Bethe equation residual rows for a root multiset T and
/// exponent c (the l rows, then the active constraint rows).
std::vector<double> trig_bethe_residual(int l0, int l1, const std::vector<Complex>& T, Complex c);

} // namespace heun

#endif
