#ifndef HEUN_POLY_HPP
#define HEUN_POLY_HPP

#include "heun/common.hpp"

#include <vector>

namespace heun {

/// Complex polynomial, ascending coefficient order: p(z) = sum c[k] z^k.
using Poly = std::vector<Complex>;

namespace poly {

Complex eval(const Poly& p, Complex z);
Poly derivative(const Poly& p);
Poly add(const Poly& a, const Poly& b);
Poly scale(const Poly& a, Complex s);
Poly mul(const Poly& a, const Poly& b);
Poly pow(const Poly& a, int n);

/// Drop trailing coefficients below rel * max|c_k|.
void trim(Poly& p, double rel = 0.0);
int degree(const Poly& p);

/// Monic product prod (z - r) over the given roots.
Poly from_roots(const std::vector<Complex>& roots);

/// Newton-form interpolation through (xs[i], ys[i]); returns monomial coefficients.
Poly interpolate(const std::vector<Complex>& xs, const std::vector<Complex>& ys);

} // namespace poly

/// All complex roots by simultaneous (Durand-Kerner) iteration from a
/// deterministic initial circle, polished by Newton, sorted by argument then
/// modulus. Intended for the simple-root regime.
std::vector<Complex> all_roots(const Poly& p);

/// Largest pair distance of a greedy nearest-neighbour matching between two
/// equal-size complex multisets (robust against sort order ties).
double multiset_match_error(const std::vector<Complex>& a, const std::vector<Complex>& b);

} // namespace heun

#endif
