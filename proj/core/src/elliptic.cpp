#include "heun/elliptic.hpp"

#include "heun/errors.hpp"

#include <cmath>
#include <random>

namespace heun {

namespace {

constexpr double kTermTol = 1e-18;  // series truncation: |term| < tol * |partial sum|
constexpr int kMaxTerms = 500;
constexpr double kPoleGuard = 1e-10;  // lattice units

Complex nome_from_tau(Complex tau) { return std::exp(2.0 * pi * iu * tau); }

void check_tau(Complex tau) {
    if (!(tau.imag() > 0.0)) throw DomainError("lattice: Im(tau) must be positive");
}

// Lattice coordinates of y with respect to the basis (1, tau).
std::pair<double, double> lattice_coords(Complex y, Complex tau) {
    double beta = y.imag() / tau.imag();
    double alpha = y.real() - beta * tau.real();
    return {alpha, beta};
}

} // namespace

Lattice Lattice::from_tau(Complex tau) {
    check_tau(tau);
    return Lattice{Complex(0.5), 0.5 * tau, tau, nome_from_tau(tau)};
}

Lattice Lattice::from_nome(Complex p) {
    if (!(std::abs(p) < 1.0) || p == Complex(0.0))
        throw DomainError("lattice: nome must satisfy 0 < |p| < 1");
    Complex tau = std::log(p) / (2.0 * pi * iu);
    return from_tau(tau);
}

Lattice Lattice::from_half_periods(Complex omega1, Complex omega3) {
    if (omega1 == Complex(0.0)) throw DomainError("lattice: omega1 must be nonzero");
    Complex tau = omega3 / omega1;
    check_tau(tau);
    return Lattice{omega1, omega3, tau, nome_from_tau(tau)};
}

Complex Lattice::half_period(int i) const {
    switch (i) {
        case 0: return Complex(0.0);
        case 1: return omega1;
        case 2: return omega2();
        case 3: return omega3;
        default: throw DomainError("half_period: index must be 0..3");
    }
}

bool Lattice::normalized() const { return std::abs(2.0 * omega1 - 1.0) < 1e-14; }

Complex ThetaValues::d(int order) const {
    switch (order) {
        case 0: return t0;
        case 1: return t1;
        case 2: return t2;
        case 3: return t3;
        default: throw DomainError("theta: order must be 0..3");
    }
}

ThetaValues theta_all(Complex x, Complex tau) {
    check_tau(tau);
    const Complex q = std::exp(iu * pi * tau);

    // Quasi-periodic reduction x = u + r + m tau keeps the sine series well
    // conditioned: theta(u + m tau + r) = (-1)^(r+m) exp(-i pi m^2 tau) exp(-2 pi i m u) theta(u).
    const long m = std::lround(x.imag() / tau.imag());
    Complex u = x - double(m) * tau;
    const long r = std::lround(u.real());
    u -= double(r);

    const Complex a = pi * u;
    Complex sn = std::sin(a), cn = std::cos(a);
    const Complex s2 = 2.0 * sn * cn, c2 = cn * cn - sn * sn;

    // q^((n-1/2)^2) = q^(1/4) * q^(n(n-1)), accumulated incrementally.
    Complex qf = std::pow(q, 0.25);
    const Complex q2 = q * q;
    Complex qstep = Complex(1.0);  // q^(2(n-1)) at loop entry

    Complex s0 = 0.0, s1 = 0.0, s2sum = 0.0, s3 = 0.0;
    double sign = 1.0;
    int settled = 0;
    for (int n = 1;; ++n) {
        const double f = (2.0 * n - 1.0) * pi;
        const Complex base = 2.0 * sign * qf;
        const Complex add0 = base * sn;
        const Complex add1 = base * f * cn;
        const Complex add2 = -base * f * f * sn;
        const Complex add3 = -base * f * f * f * cn;
        s0 += add0;
        s1 += add1;
        s2sum += add2;
        s3 += add3;

        const double rel = std::max(
            std::max(std::abs(add0) / (std::abs(s0) + 1e-300), std::abs(add1) / (std::abs(s1) + 1e-300)),
            std::max(std::abs(add2) / (std::abs(s2sum) + 1e-300), std::abs(add3) / (std::abs(s3) + 1e-300)));
        if (rel < kTermTol) {
            if (++settled >= 2) break;
        } else {
            settled = 0;
        }
        if (n >= kMaxTerms) throw NonConvergent("theta: series exceeded 500 terms");

        sign = -sign;
        qstep *= q2;
        qf *= qstep;  // advances q^(n(n-1)) to q^((n+1)n)
        const Complex ns = sn * c2 + cn * s2;
        const Complex nc = cn * c2 - sn * s2;
        sn = ns;
        cn = nc;
    }

    if (m == 0 && r == 0) return {s0, s1, s2sum, s3};

    // Undo the reduction: theta(x) = A exp(-2 pi i m u) theta(u), u = x - r - m tau.
    const double parity = ((m + r) % 2 == 0) ? 1.0 : -1.0;
    const Complex w = -2.0 * pi * iu * double(m);
    const Complex A = parity * std::exp(-iu * pi * double(m) * double(m) * tau + w * u);
    ThetaValues out;
    out.t0 = A * s0;
    out.t1 = A * (s1 + w * s0);
    out.t2 = A * (s2sum + 2.0 * w * s1 + w * w * s0);
    out.t3 = A * (s3 + 3.0 * w * s2sum + 3.0 * w * w * s1 + w * w * w * s0);
    return out;
}

Complex theta_eval(Complex x, Complex tau, int order) { return theta_all(x, tau).d(order); }

namespace {

struct NormFrame {
    Complex tau;
    Complex eta1, eta2, eta3;
    Complex theta_prime0;
};

NormFrame norm_frame(const Lattice& lat) {
    NormFrame f;
    f.tau = lat.tau;
    ThetaValues t0 = theta_all(Complex(0.0), lat.tau);
    f.theta_prime0 = t0.t1;
    // x -> 0 expansion of the wp-theta identity: eta1 = -theta'''(0)/(6 theta'(0))
    f.eta1 = -t0.t3 / (6.0 * t0.t1);
    f.eta3 = f.eta1 * lat.tau - iu * pi;  // Legendre relation at omega1 = 1/2
    f.eta2 = -f.eta1 - f.eta3;
    return f;
}

Complex wp_norm(Complex y, Complex tau, Complex eta1) {
    ThetaValues t = theta_all(y, tau);
    Complex u = t.t1 / t.t0;
    return u * u - t.t2 / t.t0 - 2.0 * eta1;
}

Complex wp_prime_norm(Complex y, Complex tau) {
    ThetaValues t = theta_all(y, tau);
    Complex u = t.t1 / t.t0;
    return 3.0 * u * (t.t2 / t.t0) - 2.0 * u * u * u - t.t3 / t.t0;
}

Complex zeta_norm(Complex y, Complex tau, Complex eta1) {
    ThetaValues t = theta_all(y, tau);
    return 2.0 * eta1 * y + t.t1 / t.t0;
}

Complex sigma_norm(Complex y, const NormFrame& f) {
    ThetaValues t = theta_all(y, f.tau);
    return std::exp(f.eta1 * y * y) * t.t0 / f.theta_prime0;
}

Complex cosigma_norm(int i, Complex y, const NormFrame& f) {
    const Complex w = (i == 1) ? Complex(0.5)
                               : (i == 2 ? Complex(-0.5 - 0.5 * f.tau.real(), -0.5 * f.tau.imag())
                                         : 0.5 * f.tau);
    const Complex eta = (i == 1) ? f.eta1 : (i == 2 ? f.eta2 : f.eta3);
    return std::exp(-eta * y) * sigma_norm(y + w, f) / sigma_norm(w, f);
}

std::array<Complex, 3> roots_normalized(const Lattice& lat, Complex eta1) {
    Complex e1 = wp_norm(Complex(0.5), lat.tau, eta1);
    Complex e2 = wp_norm(0.5 + 0.5 * lat.tau, lat.tau, eta1);
    Complex e3 = wp_norm(0.5 * lat.tau, lat.tau, eta1);
    return {e1, e2, e3};
}

} // namespace

double lattice_distance(Complex z, const Lattice& lat) {
    Complex y = z / (2.0 * lat.omega1);
    auto [alpha, beta] = lattice_coords(y, lat.tau);
    Complex nearest = std::round(alpha) + std::round(beta) * lat.tau;
    return std::abs(y - nearest);
}

double half_lattice_distance(Complex z, const Lattice& lat) {
    Complex y = 2.0 * z / (2.0 * lat.omega1);
    auto [alpha, beta] = lattice_coords(y, lat.tau);
    Complex nearest = std::round(alpha) + std::round(beta) * lat.tau;
    return 0.5 * std::abs(y - nearest);
}

LatticeConstants lattice_constants(const Lattice& lat) {
    if (std::abs(lat.p) >= 0.99)
        throw NonConvergent("lattice_constants: |p| >= 0.99, theta series too slow");
    NormFrame f = norm_frame(lat);
    auto e = roots_normalized(lat, f.eta1);

    const Complex lam = 2.0 * lat.omega1;
    LatticeConstants lc;
    lc.lat = lat;
    lc.e1 = e[0] / (lam * lam);
    lc.e2 = e[1] / (lam * lam);
    lc.e3 = e[2] / (lam * lam);
    lc.eta1 = f.eta1 / lam;
    lc.eta2 = f.eta2 / lam;
    lc.eta3 = f.eta3 / lam;
    lc.g2 = -4.0 * (lc.e1 * lc.e2 + lc.e1 * lc.e3 + lc.e2 * lc.e3);
    lc.g3 = 4.0 * lc.e1 * lc.e2 * lc.e3;
    return lc;
}

Complex wp_family(Complex z, const Lattice& lat, WpKind kind) {
    const Complex lam = 2.0 * lat.omega1;
    const Complex y = z / lam;

    const bool pole_bearing = (kind == WpKind::wp || kind == WpKind::wp_prime ||
                               kind == WpKind::wp_second || kind == WpKind::zeta);
    if (pole_bearing && lattice_distance(z, lat) < kPoleGuard)
        throw PoleAt("wp_family: argument within 1e-10 of a lattice point");

    NormFrame f = norm_frame(lat);
    switch (kind) {
        case WpKind::wp:
            return wp_norm(y, lat.tau, f.eta1) / (lam * lam);
        case WpKind::wp_prime:
            return wp_prime_norm(y, lat.tau) / (lam * lam * lam);
        case WpKind::wp_second: {
            Complex wp = wp_norm(y, lat.tau, f.eta1) / (lam * lam);
            auto e = roots_normalized(lat, f.eta1);
            Complex e1 = e[0] / (lam * lam), e2 = e[1] / (lam * lam), e3 = e[2] / (lam * lam);
            Complex g2 = -4.0 * (e1 * e2 + e1 * e3 + e2 * e3);
            return 6.0 * wp * wp - 0.5 * g2;
        }
        case WpKind::zeta:
            return zeta_norm(y, lat.tau, f.eta1) / lam;
        case WpKind::sigma:
            return lam * sigma_norm(y, f);
        case WpKind::cosigma1:
            return cosigma_norm(1, y, f);
        case WpKind::cosigma2:
            return cosigma_norm(2, y, f);
        case WpKind::cosigma3:
            return cosigma_norm(3, y, f);
    }
    throw DomainError("wp_family: unknown kind");
}

Complex wp_inverse(Complex a, const Lattice& lat) {
    const Complex lam = 2.0 * lat.omega1;
    const Complex an = a * lam * lam;  // target in the normalized frame
    NormFrame f = norm_frame(lat);
    auto e = roots_normalized(lat, f.eta1);
    for (Complex ei : e)
        if (std::abs(an - ei) <= 1e-9 * (1.0 + std::abs(ei)))
            throw DomainError("wp_inverse: value at a branch point e_i");

    const Complex tau = lat.tau;
    const double tol = 1e-11;

    // Seeds on a 12x12 grid of the half fundamental domain; wp is 2-to-1 on the
    // full cell, so the half cell captures one preimage of every value.
    struct Seed {
        Complex y;
        double score;
    };
    std::vector<Seed> seeds;
    seeds.reserve(144);
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            Complex y = (i + 0.5) / 12.0 + ((j + 0.5) / 24.0) * tau;
            Complex v = wp_norm(y, tau, f.eta1);
            seeds.push_back({y, std::abs(v - an)});
        }
    }
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const Seed& s, const Seed& t) { return s.score < t.score; });

    for (const Seed& s : seeds) {
        Complex t = s.y;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
            // Keep Newton away from the poles/branch points of wp.
            auto [alpha, beta] = lattice_coords(t, tau);
            Complex nearest = std::round(2.0 * alpha) / 2.0 + (std::round(2.0 * beta) / 2.0) * tau;
            if (std::abs(t - nearest) < 1e-6) t += 0.013 + 0.007 * tau;

            Complex v = wp_norm(t, tau, f.eta1) - an;
            if (std::abs(v) <= tol * (1.0 + std::abs(an))) {
                ok = true;
                break;
            }
            Complex d = wp_prime_norm(t, tau);
            if (std::abs(d) < 1e-280) break;
            Complex step = v / d;
            double cap = 0.25 * std::min(1.0, std::abs(tau));
            if (std::abs(step) > cap) step *= cap / std::abs(step);
            t -= step;
        }
        if (!ok) continue;
        // Reduce to the centered fundamental domain.
        auto [alpha, beta] = lattice_coords(t, tau);
        t -= std::round(alpha) + std::round(beta) * tau;
        return lam * t;
    }
    throw NoConvergence("wp_inverse: Newton failed from every grid seed");
}

std::vector<Complex> wp_p_expansion(Complex x, int K, bool half_shift) {
    const Complex arg = half_shift ? x + 0.5 : x;
    const Complex near = std::round(arg.real());
    if (std::abs(arg - near) < 1e-12 && std::abs(arg.imag()) < 1e-12)
        throw DomainError("wp_p_expansion: x at a pole of the expansion");

    std::vector<Complex> c(static_cast<std::size_t>(K) + 1);
    const Complex s = std::sin(pi * arg);
    c[0] = pi * pi / (s * s) - pi * pi / 3.0;
    for (int k = 1; k <= K; ++k) {
        Complex acc = 0.0;
        for (int n = 1; n <= k; ++n) {
            if (k % n != 0) continue;
            Complex cosv = std::cos(2.0 * n * pi * x);
            if (half_shift && (n % 2 != 0)) cosv = -cosv;
            acc += double(n) * (cosv - 1.0);
        }
        c[static_cast<std::size_t>(k)] = -8.0 * pi * pi * acc;
    }
    return c;
}

std::vector<Complex> fundamental_points(const Lattice& lat, int count, unsigned seed,
                                        double margin) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        double alpha = unif(rng), beta = unif(rng);
        Complex y = alpha + beta * lat.tau;
        Complex z = 2.0 * lat.omega1 * y;
        if (half_lattice_distance(z, lat) < margin) continue;
        out.push_back(z);
    }
    return out;
}

} // namespace heun
