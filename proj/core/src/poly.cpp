#include "heun/poly.hpp"

#include "heun/errors.hpp"

#include <algorithm>
#include <cmath>

namespace heun {

namespace poly {

Complex eval(const Poly& p, Complex z) {
    Complex acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Poly derivative(const Poly& p) {
    if (p.size() <= 1) return {Complex(0.0)};
    Poly out(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] = p[k] * double(k);
    return out;
}

Poly add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), Complex(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Poly scale(const Poly& a, Complex s) {
    Poly out = a;
    for (auto& c : out) c *= s;
    return out;
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, Complex(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly pow(const Poly& a, int n) {
    Poly out{Complex(1.0)};
    for (int i = 0; i < n; ++i) out = mul(out, a);
    return out;
}

void trim(Poly& p, double rel) {
    double mx = 0.0;
    for (auto& c : p) mx = std::max(mx, std::abs(c));
    while (p.size() > 1 && std::abs(p.back()) <= rel * mx) p.pop_back();
}

int degree(const Poly& p) {
    int d = static_cast<int>(p.size()) - 1;
    while (d > 0 && p[static_cast<std::size_t>(d)] == Complex(0.0)) --d;
    return d;
}

Poly from_roots(const std::vector<Complex>& roots) {
    Poly out{Complex(1.0)};
    for (Complex r : roots) out = mul(out, Poly{-r, Complex(1.0)});
    return out;
}

Poly interpolate(const std::vector<Complex>& xs, const std::vector<Complex>& ys) {
    const std::size_t n = xs.size();
    // Newton divided differences.
    std::vector<Complex> dd = ys;
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = n - 1; i >= k; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
    // Expand the Newton form into monomial coefficients.
    Poly out{dd[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        out = mul(out, Poly{-xs[i], Complex(1.0)});
        out = add(out, Poly{dd[i]});
    }
    return out;
}

} // namespace poly

std::vector<Complex> all_roots(const Poly& p_in) {
    Poly p = p_in;
    double mx = 0.0;
    for (auto& c : p) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) throw DomainError("all_roots: zero polynomial");
    // Only true zeros are dropped; the spectral polynomials are monic with a
    // huge coefficient spread, so any relative threshold would eat real roots.
    // Callers trim interpolation noise before rootfinding.
    while (p.size() > 1 && std::abs(p.back()) <= 1e-280) p.pop_back();
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0) return {};
    if (n == 1) return {-p[0] / p[1]};

    // Monic normalization; Fujiwara bound for the initial circle.
    Poly m(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) m[k] = p[k] / p.back();
    double radius = 0.0;
    for (int k = 0; k < n; ++k)
        radius = std::max(radius, std::pow(std::abs(m[static_cast<std::size_t>(k)]), 1.0 / (n - k)));
    radius = 0.5 + 2.0 * radius;

    std::vector<Complex> z(n);
    for (int k = 0; k < n; ++k)
        z[k] = radius * std::exp(iu * (2.0 * pi * (k + 0.35) / n));

    // Aberth-Ehrlich simultaneous iteration (cubic convergence, robust for the
    // tight band-edge pairs of the spectral polynomials).
    const Poly dm = poly::derivative(m);
    for (int iter = 0; iter < 400; ++iter) {
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            const Complex pv = poly::eval(m, z[k]);
            const Complex dv = poly::eval(dm, z[k]);
            Complex step;
            if (std::abs(dv) > 1e-300) {
                const Complex w = pv / dv;
                Complex s = 0.0;
                for (int j = 0; j < n; ++j)
                    if (j != k) s += 1.0 / (z[k] - z[j]);
                step = w / (1.0 - w * s);
            } else {
                Complex denom = 1.0;
                for (int j = 0; j < n; ++j)
                    if (j != k) denom *= (z[k] - z[j]);
                step = pv / denom;
            }
            z[k] -= step;
            worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[k])));
        }
        if (worst < 1e-14) break;
    }

    // Long-double Newton polish (the spectral polynomials combine a huge
    // coefficient spread with tight band-edge pairs) and backward-error
    // acceptance.
    using CLD = std::complex<long double>;
    std::vector<CLD> mld(m.size()), dld(dm.size());
    for (std::size_t k = 0; k < m.size(); ++k) mld[k] = CLD(m[k].real(), m[k].imag());
    for (std::size_t k = 0; k < dm.size(); ++k) dld[k] = CLD(dm[k].real(), dm[k].imag());
    auto eval_ld = [](const std::vector<CLD>& c, CLD x) {
        CLD acc = 0.0L;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    };
    for (auto& r : z) {
        CLD rl(r.real(), r.imag());
        for (int it = 0; it < 6; ++it) {
            CLD d = eval_ld(dld, rl);
            if (std::abs(d) < 1e-300L) break;
            CLD step = eval_ld(mld, rl) / d;
            if (std::abs(step) > 0.5L * (1.0L + std::abs(rl))) break;
            rl -= step;
        }
        r = Complex(static_cast<double>(rl.real()), static_cast<double>(rl.imag()));
    }
    for (const Complex& r : z) {
        double scale = 0.0, zp = 1.0;
        for (std::size_t k = 0; k < m.size(); ++k, zp *= std::abs(r))
            scale = std::max(scale, std::abs(m[k]) * zp);
        if (!(std::abs(poly::eval(m, r)) <= 1e-9 * scale))
            throw NoConvergence("all_roots: simultaneous iteration did not converge");
    }

    std::sort(z.begin(), z.end(), [](Complex a, Complex b) {
        double aa = std::arg(a), ab = std::arg(b);
        if (aa != ab) return aa < ab;
        return std::abs(a) < std::abs(b);
    });
    return z;
}

double multiset_match_error(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) throw DomainError("multiset_match_error: size mismatch");
    const std::size_t n = a.size();
    std::vector<bool> used_a(n, false), used_b(n, false);
    double worst = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
        double best = 1e300;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (used_a[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (used_b[j]) continue;
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_a[bi] = used_b[bj] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace heun
