// Test-only oracles, independent of the library evaluation paths they check.
#ifndef HEUN_TESTS_ORACLES_HPP
#define HEUN_TESTS_ORACLES_HPP

#include "heun/common.hpp"

#include <cmath>
#include <functional>

namespace heun::oracles {

/// wp by the defining lattice double sum, truncated at |m|,|n| <= N.  The
/// square window converges like 1/N^2, so the raw sum is a coarse oracle.
inline Complex wp_lattice_sum(Complex z, Complex omega1, Complex omega3, int N = 60) {
    Complex acc = 1.0 / (z * z);
    for (int m = -N; m <= N; ++m) {
        for (int n = -N; n <= N; ++n) {
            if (m == 0 && n == 0) continue;
            const Complex w = 2.0 * double(m) * omega1 + 2.0 * double(n) * omega3;
            acc += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
        }
    }
    return acc;
}

/// The same double sum pushed through a Richardson chain over window sizes
/// 16/32/64/128 (window error has 1/N^2, 1/N^3, 1/N^4 components); lands near
/// 1e-10 while staying a pure lattice-definition evaluation.
inline Complex wp_lattice_sum_accelerated(Complex z, Complex omega1, Complex omega3) {
    Complex f[4];
    int N = 16;
    for (int i = 0; i < 4; ++i, N *= 2) f[i] = wp_lattice_sum(z, omega1, omega3, N);
    Complex r2[3], r3[2];
    for (int i = 0; i < 3; ++i) r2[i] = (4.0 * f[i + 1] - f[i]) / 3.0;
    for (int i = 0; i < 2; ++i) r3[i] = (8.0 * r2[i + 1] - r2[i]) / 7.0;
    return (16.0 * r3[1] - r3[0]) / 15.0;
}

/// theta by its defining sine series, truncated at nmax terms.
inline Complex theta_series_oracle(Complex x, Complex tau, int nmax = 5) {
    Complex acc = 0.0;
    for (int n = 1; n <= nmax; ++n) {
        const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        acc += 2.0 * sgn * std::exp(iu * pi * tau * (n - 0.5) * (n - 0.5)) *
               std::sin((2.0 * n - 1.0) * pi * x);
    }
    return acc;
}

/// Fourth-order central second difference.
inline Complex fd_second(const std::function<Complex(Complex)>& f, Complex x, double h) {
    return (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) /
           (12.0 * h * h);
}

/// Residual of (-d^2/dx^2 + V - E) f at x by finite differences, scaled by the
/// magnitude of the terms.
inline double schrodinger_residual(const std::function<Complex(Complex)>& f,
                                   const std::function<Complex(Complex)>& V, Complex E, Complex x,
                                   double h = 1e-3) {
    const Complex d2 = fd_second(f, x, h);
    const Complex r = -d2 + (V(x) - E) * f(x);
    const double scale = std::max({1.0, std::abs(d2), std::abs((V(x) - E) * f(x))});
    return std::abs(r) / scale;
}

/// Adaptive Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                      int depth = 24) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
            const double flm = f(lmid), frm = f(rmid);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) +
                   rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double mid = 0.5 * (a + b);
    const double fa = f(a), fm = f(mid), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec(a, b, fa, fm, fb, whole, depth);
}

/// Integrate g'' + P(w) g' + Q(w) g = 0 along the path w(s), s in [0,1], by
/// classic RK4 on (g, dg/dw); returns g(w(1)) and the derivative there.
struct OdeEndpoint {
    Complex g, dgdw;
};
inline OdeEndpoint integrate_second_order(const std::function<Complex(double)>& w_of_s,
                                          const std::function<Complex(double)>& dw_ds,
                                          const std::function<Complex(Complex)>& P,
                                          const std::function<Complex(Complex)>& Q, Complex g0,
                                          Complex dg0, int nsteps = 4000) {
    Complex g = g0, dg = dg0;
    const double hs = 1.0 / nsteps;
    auto rhs = [&](double s, Complex gg, Complex dgg, Complex& out_g, Complex& out_dg) {
        const Complex w = w_of_s(s);
        const Complex wp = dw_ds(s);
        out_g = wp * dgg;
        out_dg = wp * (-P(w) * dgg - Q(w) * gg);
    };
    for (int i = 0; i < nsteps; ++i) {
        const double s = i * hs;
        Complex k1g, k1d, k2g, k2d, k3g, k3d, k4g, k4d;
        rhs(s, g, dg, k1g, k1d);
        rhs(s + 0.5 * hs, g + 0.5 * hs * k1g, dg + 0.5 * hs * k1d, k2g, k2d);
        rhs(s + 0.5 * hs, g + 0.5 * hs * k2g, dg + 0.5 * hs * k2d, k3g, k3d);
        rhs(s + hs, g + hs * k3g, dg + hs * k3d, k4g, k4d);
        g += hs / 6.0 * (k1g + 2.0 * k2g + 2.0 * k3g + k4g);
        dg += hs / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    }
    return {g, dg};
}

} // namespace heun::oracles

#endif
