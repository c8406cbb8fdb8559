#include "heun/invariant_space.hpp"

#include "heun/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace heun {

namespace {

int dimension_case_split(const Couplings& c) {
    const auto k = c.sorted_desc();
    const int s = k[0] + k[1] + k[2] + k[3];
    if (s % 2 == 0) {
        if (k[0] + k[3] >= k[1] + k[2]) return 2 * k[0] + 1;
        return k[0] + k[1] + k[2] - k[3] + 1;
    }
    if (k[0] >= k[1] + k[2] + k[3] + 1) return 2 * k[0] + 1;
    return k[0] + k[1] + k[2] + k[3] + 2;
}

std::vector<ParityClass> enumerate_classes(const Couplings& c) {
    std::vector<ParityClass> out;
    for (int mask = 0; mask < 16; ++mask) {
        ParityClass pc;
        int prod = 1;
        for (int i = 0; i < 4; ++i) {
            pc.epsilon[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? -1 : 1;
            prod *= pc.epsilon[static_cast<std::size_t>(i)];
        }
        if (prod != 1) continue;
        int sum = 0;
        for (int i = 0; i < 4; ++i) {
            // alpha_i in {-l_i, l_i+1}; exactly one has the parity required by
            // epsilon_i (even for +1, odd for -1) since the gap 2l_i+1 is odd.
            const int li = c[i];
            const bool want_odd = pc.epsilon[static_cast<std::size_t>(i)] == -1;
            const int lower = -li, upper = li + 1;
            const int ai = (std::abs(lower) % 2 == (want_odd ? 1 : 0)) ? lower : upper;
            pc.alpha[static_cast<std::size_t>(i)] = ai;
            sum += ai;
        }
        pc.d = -sum / 2;
        out.push_back(pc);
    }
    return out;
}

using EMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using EVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

// Collocation solve for one parity block: H phi_n = sum_m M(m,n) phi_m.
ComplexMatrix block_matrix(const Couplings& c, const ParityClass& pc, const Lattice& lat,
                           unsigned seed) {
    const int dim = pc.dim();
    ComplexMatrix out(dim, dim);
    if (dim == 0) return out;

    for (unsigned attempt = 0; attempt < 6; ++attempt) {
        const int npts = dim + 4;
        auto pts = fundamental_points(lat, 4 * npts, seed + 101 * attempt, 0.05);
        // Keep points where the basis is well scaled (away from zeros of wp
        // used in the wp'/wp logarithmic derivative).
        std::vector<Complex> use;
        for (Complex x : pts) {
            if (static_cast<int>(use.size()) == npts) break;
            try {
                Complex w = wp_family(x, lat, WpKind::wp);
                Complex wps = wp_family(x, lat, WpKind::wp_prime);
                if (std::abs(w) < 1e-3 || std::abs(wps) < 1e-3) continue;
            } catch (const PoleAt&) {
                continue;
            }
            use.push_back(x);
        }
        if (static_cast<int>(use.size()) < npts) continue;

        EMatrix Phi(npts, dim);
        EMatrix Rhs(npts, dim);
        for (int s = 0; s < npts; ++s) {
            for (int n = 0; n < dim; ++n) {
                Phi(s, n) = basis_value(pc.alpha, n, use[static_cast<std::size_t>(s)], lat);
                Rhs(s, n) = basis_H_value(c, pc.alpha, n, use[static_cast<std::size_t>(s)], lat);
            }
        }
        Eigen::JacobiSVD<EMatrix> svd(Phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double cond = svd.singularValues()(0) / svd.singularValues()(dim - 1);
        if (!(cond < 1e10)) {
            if (attempt == 5) throw IllConditioned("hamiltonian_matrix: collocation cond > 1e10");
            continue;
        }
        EMatrix M = svd.solve(Rhs);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out.at(i, j) = M(i, j);
        return out;
    }
    throw IllConditioned("hamiltonian_matrix: could not find usable collocation points");
}

} // namespace

int invariant_dimension(const Couplings& c) {
    const int by_cases = dimension_case_split(c);
    int by_classes = 0;
    for (const auto& pc : enumerate_classes(c)) by_classes += pc.dim();
    if (by_cases != by_classes)
        throw Error("invariant_dimension: case split and parity enumeration disagree");
    return by_cases;
}

InvariantSpace parity_basis(const Couplings& c) {
    InvariantSpace sp;
    sp.c = c;
    for (const auto& pc : enumerate_classes(c))
        if (pc.d >= 0) sp.classes.push_back(pc);
    return sp;
}

Complex basis_value(const std::array<int, 4>& alpha, int n, Complex x, const Lattice& lat) {
    Complex v = 1.0;
    const Complex sig = wp_family(x, lat, WpKind::sigma);
    for (int i = 1; i <= 3; ++i) {
        const int ai = alpha[static_cast<std::size_t>(i)];
        if (ai == 0) continue;
        const WpKind kind = i == 1 ? WpKind::cosigma1 : (i == 2 ? WpKind::cosigma2 : WpKind::cosigma3);
        v *= std::pow(wp_family(x, lat, kind) / sig, ai);
    }
    if (n > 0) v *= std::pow(wp_family(x, lat, WpKind::wp), n);
    return v;
}

Complex basis_H_value(const Couplings& c, const std::array<int, 4>& alpha, int n, Complex x,
                      const Lattice& lat) {
    // phi'' = phi (G^2 + G') with G = sum_i alpha_i (zeta(x+omega_i) - eta_i - zeta(x)) + n wp'/wp.
    LatticeConstants lc = lattice_constants(lat);
    const Complex zx = wp_family(x, lat, WpKind::zeta);
    const Complex wpx = wp_family(x, lat, WpKind::wp);
    const Complex wppx = wp_family(x, lat, WpKind::wp_prime);

    Complex G = 0.0, Gp = 0.0;
    for (int i = 1; i <= 3; ++i) {
        const int ai = alpha[static_cast<std::size_t>(i)];
        if (ai == 0) continue;
        const Complex xs = x + lat.half_period(i);
        G += double(ai) * (wp_family(xs, lat, WpKind::zeta) - lc.eta(i) - zx);
        Gp += double(ai) * (wpx - wp_family(xs, lat, WpKind::wp));
    }
    if (n > 0) {
        const Complex wpp2 = 6.0 * wpx * wpx - 0.5 * lc.g2;
        G += double(n) * wppx / wpx;
        Gp += double(n) * (wpp2 * wpx - wppx * wppx) / (wpx * wpx);
    }

    Complex V = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (c.strength(i) == 0) continue;
        V += double(c.strength(i)) * wp_family(x + lat.half_period(i), lat, WpKind::wp);
    }
    const Complex phi = basis_value(alpha, n, x, lat);
    return phi * (V - (G * G + Gp));
}

ComplexMatrix hamiltonian_matrix(const InvariantSpace& space, const Lattice& lat, unsigned seed) {
    const int dim = space.total_dimension();
    if (dim < 1) throw DomainError("hamiltonian_matrix: empty invariant space");
    ComplexMatrix out(dim, dim);
    int off = 0;
    for (const auto& pc : space.classes) {
        ComplexMatrix blk = block_matrix(space.c, pc, lat, seed);
        for (int i = 0; i < blk.rows; ++i)
            for (int j = 0; j < blk.cols; ++j) out.at(off + i, off + j) = blk.at(i, j);
        off += blk.rows;
    }
    return out;
}

std::vector<Complex> matrix_eigenvalues(const ComplexMatrix& m) {
    EMatrix A(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) A(i, j) = m.at(i, j);
    Eigen::ComplexEigenSolver<EMatrix> es(A, false);
    std::vector<Complex> ev(static_cast<std::size_t>(m.rows));
    for (int i = 0; i < m.rows; ++i) ev[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return ev;
}

std::vector<Complex> hamiltonian_eigenvalues(const InvariantSpace& space, const Lattice& lat,
                                             unsigned seed) {
    std::vector<Complex> all;
    for (const auto& pc : space.classes) {
        ComplexMatrix blk = block_matrix(space.c, pc, lat, seed);
        auto ev = matrix_eigenvalues(blk);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    return all;
}

std::array<Poly, 4> twisted_char_polys(int l0, int l1, const LatticeConstants& lc) {
    if (l0 < 0 || l1 < 0) throw DomainError("twisted_char_polys: couplings must be >= 0");
    if (l0 < l1) std::swap(l0, l1);  // the sector analysis assumes l0 >= l1; the spectrum is symmetric

    // Exponent tuples (alpha1, alpha2, alpha3) in half-integer units (doubled to
    // stay integral): alpha1 in {-l1/2, (l1+1)/2}, alpha2/alpha3 in {0, 1/2}.
    struct Tuple {
        double a1, a2, a3;
    };
    std::array<Tuple, 4> tuples;
    if ((l0 + l1) % 2 == 0) {
        tuples = {Tuple{-0.5 * l1, 0.0, 0.0}, Tuple{-0.5 * l1, 0.5, 0.5},
                  Tuple{0.5 * (l1 + 1), 0.5, 0.0}, Tuple{0.5 * (l1 + 1), 0.0, 0.5}};
    } else {
        tuples = {Tuple{-0.5 * l1, 0.5, 0.0}, Tuple{-0.5 * l1, 0.0, 0.5},
                  Tuple{0.5 * (l1 + 1), 0.0, 0.0}, Tuple{0.5 * (l1 + 1), 0.5, 0.5}};
    }

    std::array<Poly, 4> out;
    for (std::size_t ti = 0; ti < 4; ++ti) {
        const double a1 = tuples[ti].a1, a2 = tuples[ti].a2, a3 = tuples[ti].a3;
        const double g1 = a1 + a2 + a3 - 0.5 * l0;
        const double g2 = a1 + a2 + a3 + 0.5 * (l0 + 1);
        // Exactly one of g1, g2 is an integer; it must be <= 0 for the series
        // to terminate.
        double gt;
        if (std::abs(g1 - std::round(g1)) < 1e-9) gt = std::round(g1);
        else gt = std::round(g2);
        const int rmax = 1 - static_cast<int>(gt);
        if (rmax < 0) throw Error("twisted_char_polys: non-terminating exponent tuple");

        // q is affine in E: q = E/4 - e1(a2+a3)^2 - e2(a1+a3)^2 - e3(a1+a2)^2 + e2 g1 g2.
        const Poly q = {-lc.e1 * (a2 + a3) * (a2 + a3) - lc.e2 * (a1 + a3) * (a1 + a3) -
                            lc.e3 * (a1 + a2) * (a1 + a2) + lc.e2 * g1 * g2,
                        Complex(0.25)};
        const Complex d21 = lc.e2 - lc.e1, d23 = lc.e2 - lc.e3;

        std::vector<Poly> cr(static_cast<std::size_t>(rmax) + 1);
        cr[0] = {Complex(1.0)};
        if (rmax >= 1) cr[1] = poly::scale(q, -1.0 / (d21 * d23 * (2.0 * a2 + 0.5)));
        for (int r = 1; r + 1 <= rmax; ++r) {
            Poly acc = poly::scale(cr[static_cast<std::size_t>(r - 1)], (r - 1.0 + g1) * (r - 1.0 + g2));
            const Complex lin = ((2.0 * a2 + 2.0 * a3 + r) * d21 + (2.0 * a2 + 2.0 * a1 + r) * d23) * double(r);
            acc = poly::add(acc, poly::mul(poly::add(q, Poly{lin}), cr[static_cast<std::size_t>(r)]));
            const Complex denom = d21 * d23 * double(r + 1) * (r + 2.0 * a2 + 0.5);
            cr[static_cast<std::size_t>(r + 1)] = poly::scale(acc, -1.0 / denom);
        }
        out[ti] = cr[static_cast<std::size_t>(rmax)];
    }
    return out;
}

} // namespace heun
