#ifndef HEUN_RATIONAL_HPP
#define HEUN_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

namespace heun {

/// Exact rational scalar used wherever an operation is exact by construction
/// (trigonometric recursions, Jacobi modes, change-of-basis matrices).
using Rat = boost::multiprecision::cpp_rational;

/// Polynomial with exact rational coefficients, ascending order.
using RatPoly = std::vector<Rat>;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Rat rat_pow(Rat base, int n) {
    Rat out = 1;
    for (int i = 0; i < n; ++i) out *= base;
    return out;
}

namespace ratpoly {

inline RatPoly add(const RatPoly& a, const RatPoly& b) {
    RatPoly out(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

inline RatPoly scale(const RatPoly& a, const Rat& s) {
    RatPoly out = a;
    for (auto& c : out) c *= s;
    return out;
}

inline RatPoly mul(const RatPoly& a, const RatPoly& b) {
    if (a.empty() || b.empty()) return {};
    RatPoly out(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline RatPoly derivative(const RatPoly& a) {
    if (a.size() <= 1) return {Rat(0)};
    RatPoly out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * Rat(static_cast<long>(i));
    return out;
}

inline void trim(RatPoly& a) {
    while (a.size() > 1 && a.back() == 0) a.pop_back();
}

inline int degree(const RatPoly& a) {
    int d = static_cast<int>(a.size()) - 1;
    while (d > 0 && a[static_cast<std::size_t>(d)] == 0) --d;
    return d;
}

} // namespace ratpoly

} // namespace heun

#endif
