#include "heun/trig_spectrum.hpp"

#include "heun/bethe.hpp"
#include "heun/errors.hpp"

#include <cmath>

namespace heun {

double trig_ct(int l0, int l1) {
    return (l0 * (l0 + 1) + l1 * (l1 + 1)) * pi * pi / 3.0;
}

JacobiMode jacobi_mode(int l0, int l1, int m) {
    if (m < 0 || m > 200) throw DomainError("jacobi_mode: require 0 <= m <= 200");
    JacobiMode jm;
    jm.l0 = l0;
    jm.l1 = l1;
    jm.m = m;
    const int alpha = l0 + l1 + 2;
    jm.eigenvalue = pi * pi * double(2 * m + alpha) * double(2 * m + alpha);

    jm.psi.assign(static_cast<std::size_t>(m) + 1, Rat(0));
    const Rat beta = Rat(2 * l0 + 3, 2);
    Rat coef = 1;
    jm.psi[0] = coef;
    for (int k = 1; k <= m; ++k) {
        coef *= Rat(-m + k - 1) * Rat(alpha + m + k - 1) / ((beta + k - 1) * k);
        jm.psi[static_cast<std::size_t>(k)] = coef;
    }
    return jm;
}

RatPoly apply_trig_hamiltonian(const RatPoly& f, int l0, int l1) {
    if (ratpoly::degree(f) > 300) throw DomainError("apply_trig_hamiltonian: degree > 300");
    const int alpha = l0 + l1 + 2;
    const Rat beta = Rat(2 * l0 + 3, 2);

    const RatPoly d1 = ratpoly::derivative(f);
    const RatPoly d2 = ratpoly::derivative(d1);
    // w(1-w) f'' + (beta - (alpha+1) w) f'
    RatPoly acc = ratpoly::mul(RatPoly{Rat(0), Rat(1), Rat(-1)}, d2);
    acc = ratpoly::add(acc, ratpoly::mul(RatPoly{beta, Rat(-(alpha + 1))}, d1));
    RatPoly out = ratpoly::scale(acc, Rat(-4));
    out = ratpoly::add(out, ratpoly::scale(f, Rat(alpha) * Rat(alpha)));
    ratpoly::trim(out);
    return out;
}

Rat inner_product_reduced(const RatPoly& f, const RatPoly& g, int l0, int l1) {
    const RatPoly prod = ratpoly::mul(f, g);
    Rat acc = 0;
    Rat rk = 1;  // B(l0+3/2+k, l1+3/2)/B(l0+3/2, l1+3/2)
    for (std::size_t k = 0; k < prod.size(); ++k) {
        if (k > 0) rk *= (Rat(l0) + Rat(1, 2) + Rat(static_cast<long>(k))) /
                         (Rat(l0 + l1 + 2) + Rat(static_cast<long>(k)));
        acc += prod[k] * rk;
    }
    return acc;
}

double inner_product(const RatPoly& f, const RatPoly& g, int l0, int l1) {
    // B(l0+3/2, l1+3/2)/pi
    const double logB = std::lgamma(l0 + 1.5) + std::lgamma(l1 + 1.5) - std::lgamma(l0 + l1 + 3.0);
    return std::exp(logB) / pi * to_double(inner_product_reduced(f, g, l0, l1));
}

Complex lambda_sym_ratio(int l0, int l1, int m) {
    TrigBetheState ts = trig_bethe_state(l0, l1, m);
    JacobiMode jm = jacobi_mode(l0, l1, m);
    const double c = to_double(ts.c);

    std::vector<Complex> t;
    for (Complex Tj : ts.T) t.push_back(std::log(Tj) / (2.0 * pi * iu));

    auto lambda_T = [&](double x) {
        Complex num = 1.0;
        for (Complex tj : t) num *= std::sin(pi * (x + tj));
        const Complex den = std::pow(std::sin(pi * x), l0) * std::pow(std::cos(pi * x), l1);
        return num / den * std::exp(pi * iu * c * x);
    };
    auto phi_psi = [&](double x) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * pi * x));
        double psi = 0.0;
        for (std::size_t k = jm.psi.size(); k-- > 0;) psi = psi * w + to_double(jm.psi[k]);
        return std::pow(std::sin(pi * x), l0 + 1) * std::pow(std::cos(pi * x), l1 + 1) * psi;
    };

    const double sgn = (l0 % 2 == 0) ? 1.0 : -1.0;
    std::vector<Complex> ratios;
    for (int s = 0; s < 40 && static_cast<int>(ratios.size()) < 10; ++s) {
        const double x = 0.04 + 0.42 * (s / 39.0);
        const double denom = phi_psi(x);
        if (std::abs(denom) < 1e-3) continue;
        const Complex sym = lambda_T(x) - sgn * lambda_T(-x);
        ratios.push_back(sym / denom);
    }
    if (ratios.size() < 10) throw NotProportional("lambda_sym_ratio: too few usable sample points");

    Complex mean = 0.0;
    for (Complex r : ratios) mean += r;
    mean /= double(ratios.size());
    double spread = 0.0;
    for (Complex r : ratios) spread = std::max(spread, std::abs(r - mean));
    if (spread > 1e-6 * std::abs(mean))
        throw NotProportional("lambda_sym_ratio: sampled ratio is not constant");
    return mean;
}

} // namespace heun
