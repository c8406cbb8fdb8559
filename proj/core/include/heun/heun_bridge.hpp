#ifndef HEUN_HEUN_BRIDGE_HPP
#define HEUN_HEUN_BRIDGE_HPP

#include "heun/couplings.hpp"
#include "heun/elliptic.hpp"
#include "heun/rational.hpp"

#include <array>
#include <vector>

namespace heun {

/// Riemann scheme of the Heun-type equation in the variable z = wp(x):
/// regular singular points e1, e2, e3, infinity with exponent pairs
/// ((l_i+1)/2, -l_i/2).  Exponents are exact rationals.
struct RiemannScheme {
    std::array<Complex, 3> points;                 // e1, e2, e3 (infinity implicit)
    std::array<std::array<Rat, 2>, 4> exponents;   // index 0 = infinity, 1..3 = e_i

    Rat fuchs_sum() const {
        Rat s = 0;
        for (const auto& pr : exponents) s += pr[0] + pr[1];
        return s;
    }
};

/// Parameters of the standard Heun form
///   g'' + (gamma/w + delta/(w-1) + epsilon/(w-t)) g' + (alpha beta w - q)/(w(w-1)(w-t)) g = 0
/// with alpha + beta + 1 = gamma + delta + epsilon.
struct HeunParameters {
    Complex alpha, beta, gamma, delta, epsilon;
    Complex q;
    Complex t;
};

RiemannScheme riemann_scheme(const Couplings& c, const LatticeConstants& lc);

/// Normalization: Moebius map w = (z - e1)/(e2 - e1) (e1 -> 0, e2 -> 1, e3 -> t)
/// composed with the index shift g = prod_i (z - e_i)^{l_i/2} f, which moves the
/// finite exponent pairs to (0, l_i + 1/2).
HeunParameters to_heun_parameters(const Couplings& c, const LatticeConstants& lc, Complex E);

enum class FrobeniusExponent { lower, upper };  // -l_i or l_i + 1

/// Coefficients a_0..a_N of the even-power Frobenius tail at x = omega_i:
/// f(x) = (x - omega_i)^rho (1 + sum_k a_k (x - omega_i)^{2k}), a_0 = 1.
std::vector<Complex> frobenius_series(const Couplings& c, const Lattice& lat, int i,
                                      FrobeniusExponent which, Complex E, int N);

/// Same recursion in exact rational arithmetic at the trigonometric limit,
/// where e = pi^2 (2/3, -1/3, -1/3); E and the returned a_k are in units of
/// pi^2 and pi^{2k}.
std::vector<Rat> frobenius_series_trig(const Couplings& c, int i, FrobeniusExponent which,
                                       const Rat& E_over_pi2, int N);

} // namespace heun

#endif
