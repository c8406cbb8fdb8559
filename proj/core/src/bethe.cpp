#include "heun/bethe.hpp"

#include "heun/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace heun {

namespace {

using EMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using EVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

Complex theta_logd(Complex u, Complex tau) {
    ThetaValues t = theta_all(u, tau);
    return t.t1 / t.t0;
}

Complex theta_2nd_ratio(Complex u, Complex tau) {
    ThetaValues t = theta_all(u, tau);
    return t.t2 / t.t0;
}

// d/du of theta'/theta.
Complex theta_logd_deriv(Complex u, Complex tau) {
    ThetaValues t = theta_all(u, tau);
    Complex r = t.t1 / t.t0;
    return t.t2 / t.t0 - r * r;
}

void require_normalized(const Lattice& lat, const char* who) {
    if (!lat.normalized())
        throw DomainError(std::string(who) + ": theta form requires the omega1 = 1/2 lattice");
}

// Offsets of the theta-form denominators/equations: 0, 1/2, (1+tau)/2, tau/2.
Complex theta_offset(int i, const Lattice& lat) {
    switch (i) {
        case 0: return Complex(0.0);
        case 1: return Complex(0.5);
        case 2: return 0.5 + 0.5 * lat.tau;
        default: return 0.5 * lat.tau;
    }
}

int first_active(const Couplings& c) {
    for (int i = 0; i < 4; ++i)
        if (c[i] != 0) return i;
    return -1;
}

// Theta-form exponent solved from constraint row a.
Complex ctheta_from_row(const Couplings& c, const Lattice& lat, const std::vector<Complex>& t,
                        int a) {
    Complex sum = 0.0;
    for (Complex tj : t) sum += theta_logd(tj - theta_offset(a, lat), lat.tau);
    const double shift = (a <= 1) ? double(c[2] + c[3]) : -double(c[0] + c[1]);
    return -shift - sum / (pi * iu);
}

Complex zeta_at(Complex u, const Lattice& lat) { return wp_family(u, lat, WpKind::zeta); }
Complex wp_at(Complex u, const Lattice& lat) { return wp_family(u, lat, WpKind::wp); }

// Sigma-form exponent recovered from the theta form by matching logarithmic
// derivatives of the two ansatz shapes at a generic point.
Complex csigma_from_theta(const Couplings& c, const Lattice& lat, const std::vector<Complex>& t,
                          Complex ctheta) {
    require_normalized(lat, "csigma_from_theta");
    LatticeConstants lc = lattice_constants(lat);
    auto pts = fundamental_points(lat, 24, 9127u, 0.1);
    for (Complex x0 : pts) {
        bool ok = true;
        for (Complex tj : t)
            if (lattice_distance(x0 + tj, lat) < 1e-3) ok = false;
        for (int i = 0; i < 4; ++i)
            if (c[i] != 0 && lattice_distance(x0 + theta_offset(i, lat), lat) < 1e-3) ok = false;
        if (!ok) continue;

        Complex dtheta = pi * iu * ctheta;
        for (Complex tj : t) dtheta += theta_logd(x0 + tj, lat.tau);
        for (int i = 0; i < 4; ++i)
            if (c[i] != 0) dtheta -= double(c[i]) * theta_logd(x0 + theta_offset(i, lat), lat.tau);

        Complex dsigma = 0.0;
        for (Complex tj : t) dsigma += zeta_at(x0 + tj, lat);
        if (c[0] != 0) dsigma -= double(c[0]) * zeta_at(x0, lat);
        for (int i = 1; i <= 3; ++i)
            if (c[i] != 0)
                dsigma -= double(c[i]) * (zeta_at(x0 + lat.half_period(i), lat) - lc.eta(i));

        return dtheta - dsigma;
    }
    throw Error("csigma_from_theta: no usable sample point");
}

double mod_distance(Complex a, Complex b, const Lattice& lat) {
    return lattice_distance(a - b, lat);
}

Complex nearest_rep(Complex t, Complex ref, const Lattice& lat) {
    Complex y = (t - ref) / (2.0 * lat.omega1);
    double beta = y.imag() / lat.tau.imag();
    double alpha = y.real() - beta * lat.tau.real();
    Complex shift = std::round(alpha) + std::round(beta) * lat.tau;
    return t - 2.0 * lat.omega1 * shift;
}

Complex center_rep(Complex t, const Lattice& lat) { return nearest_rep(t, Complex(0.0), lat); }

std::vector<double> residual_sigma_rows(const BetheState& s) {
    const Couplings& c = s.cpl;
    const Lattice& lat = s.lat;
    LatticeConstants lc = lattice_constants(lat);
    const int l = static_cast<int>(s.t.size());
    std::vector<double> out;
    for (int j = 0; j < l; ++j) {
        Complex row = s.csigma;
        for (int k = 0; k < l; ++k)
            if (k != j) row += zeta_at(s.t[static_cast<std::size_t>(k)] - s.t[static_cast<std::size_t>(j)], lat);
        if (c[0] != 0) row -= double(c[0]) * zeta_at(-s.t[static_cast<std::size_t>(j)], lat);
        for (int i = 1; i <= 3; ++i)
            if (c[i] != 0)
                row -= double(c[i]) *
                       (zeta_at(lat.half_period(i) - s.t[static_cast<std::size_t>(j)], lat) - lc.eta(i));
        out.push_back(std::abs(row));
    }
    if (c[0] != 0) {
        Complex row = s.csigma;
        for (Complex tj : s.t) row += zeta_at(tj, lat);
        out.push_back(std::abs(row));
    }
    for (int i = 1; i <= 3; ++i) {
        if (c[i] == 0) continue;
        Complex row = s.csigma + double(c.sum()) * lc.eta(i);
        for (Complex tj : s.t) row += zeta_at(tj - lat.half_period(i), lat);
        out.push_back(std::abs(row));
    }
    return out;
}

std::vector<double> residual_theta_rows(const BetheState& s) {
    require_normalized(s.lat, "bethe_residual");
    const Couplings& c = s.cpl;
    const Complex tau = s.lat.tau;
    const int l = static_cast<int>(s.t.size());
    const Complex cpi = s.ctheta() * pi * iu;

    std::vector<double> out;
    for (int j = 0; j < l; ++j) {
        Complex row = cpi;
        for (int k = 0; k < l; ++k)
            if (k != j)
                row += theta_logd(s.t[static_cast<std::size_t>(k)] - s.t[static_cast<std::size_t>(j)], tau);
        for (int i = 0; i < 4; ++i)
            if (c[i] != 0)
                row += double(c[i]) * theta_logd(s.t[static_cast<std::size_t>(j)] - theta_offset(i, s.lat), tau);
        out.push_back(std::abs(row));
    }
    for (int i = 0; i < 4; ++i) {
        if (c[i] == 0) continue;
        const double shift = (i <= 1) ? double(c[2] + c[3]) : -double(c[0] + c[1]);
        Complex row = cpi + pi * iu * shift;
        for (Complex tj : s.t) row += theta_logd(tj - theta_offset(i, s.lat), tau);
        out.push_back(std::abs(row));
    }
    return out;
}

double max_residual(const std::vector<double>& rows) {
    double m = 0.0;
    for (double r : rows) m = std::max(m, r);
    return m;
}

// Core extraction once C(E) consistent with the coefficient normalization is
// known.  prev (optional) pins root pairing and lattice representatives along
// a continuation path.
BetheState extract_core(const XiRepresentation& xi, Complex E, const std::vector<Complex>& co,
                        Complex Cval, const Lattice& lat, const std::vector<Complex>* prev) {
    const Couplings& c = xi.c;
    const int l = c.sum();

    BetheState s;
    s.cpl = c;
    s.lat = lat;
    s.E = E;

    Poly N = xi.z_numerator(co);
    poly::trim(N, 1e-11);
    if (poly::degree(N) != l)
        throw SpectralDegenerate("extract_bethe_roots: numerator degree dropped below l");

    if (l == 0) {
        s.csigma = Cval / N[0];
        s.residual_sigma = 0.0;
        s.residual_theta = 0.0;
        return s;
    }

    const Poly Np = poly::derivative(N);
    const std::array<Complex, 3> e = {xi.lc.e1, xi.lc.e2, xi.lc.e3};
    auto roots = all_roots(N);

    std::vector<Complex> cand;
    for (Complex aj : roots) {
        Complex t = wp_inverse(aj, lat);
        Complex denom = 1.0;
        for (int i = 1; i <= 3; ++i)
            for (int k = 0; k < c[i]; ++k) denom *= (aj - e[static_cast<std::size_t>(i - 1)]);
        const Complex dxidz = poly::eval(Np, aj) / denom;
        const Complex target = 2.0 * Cval / dxidz;
        const Complex wpp = wp_family(t, lat, WpKind::wp_prime);
        if (std::abs(-wpp - target) < std::abs(wpp - target)) t = -t;
        cand.push_back(center_rep(t, lat));
    }

    if (prev && static_cast<int>(prev->size()) == l) {
        // The principal sqrt branch of C can flip along a path; that flips all
        // t_j at once and leaves the state equivalent, so undo it for continuity.
        double keep = 0.0, flip = 0.0;
        for (int j = 0; j < l; ++j) {
            double bk = 1e18, bf = 1e18;
            for (Complex tc : cand) {
                bk = std::min(bk, mod_distance(tc, (*prev)[static_cast<std::size_t>(j)], lat));
                bf = std::min(bf, mod_distance(-tc, (*prev)[static_cast<std::size_t>(j)], lat));
            }
            keep += bk;
            flip += bf;
        }
        if (flip < keep)
            for (auto& tc : cand) tc = -tc;

        std::vector<bool> used(cand.size(), false);
        std::vector<Complex> matched(static_cast<std::size_t>(l));
        for (int j = 0; j < l; ++j) {
            int best = -1;
            double bd = 1e18;
            for (int k = 0; k < l; ++k) {
                if (used[static_cast<std::size_t>(k)]) continue;
                double d = mod_distance(cand[static_cast<std::size_t>(k)], (*prev)[static_cast<std::size_t>(j)], lat);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            used[static_cast<std::size_t>(best)] = true;
            matched[static_cast<std::size_t>(j)] =
                nearest_rep(cand[static_cast<std::size_t>(best)], (*prev)[static_cast<std::size_t>(j)], lat);
        }
        cand = matched;
    }
    s.t = cand;

    Complex zsum = 0.0;
    for (Complex tj : s.t) zsum += zeta_at(tj, lat);
    s.csigma = -zsum;
    if (c[0] == 0) s.csigma += Cval / N.back();

    s.residual_sigma = max_residual(residual_sigma_rows(s));
    s.residual_theta = lat.normalized() ? max_residual(residual_theta_rows(s)) : -1.0;
    return s;
}

} // namespace

Complex BetheState::ctheta() const {
    const int a = first_active(cpl);
    if (a < 0) return csigma / (pi * iu);
    require_normalized(lat, "BetheState::ctheta");
    return ctheta_from_row(cpl, lat, t, a);
}

BetheState extract_bethe_roots(const XiRepresentation& xi, Complex E, const Lattice& lat,
                               const SpectralPolynomial& q) {
    const Complex qE = poly::eval(q.Q, E);
    const double scale = std::pow(std::max(1.0, std::abs(E)), poly::degree(q.Q));
    if (std::abs(qE) <= 1e-8 * scale)
        throw SpectralDegenerate("extract_bethe_roots: E is (numerically) a root of Q");

    const auto co = xi.coeffs_at(E);
    // C consistent with this normalization of Xi (the monic-Q value differs by
    // the square of the rescaling, which cancels in the branch rule).
    auto pts = fundamental_points(lat, 4, 421u, 0.1);
    const Complex Cval = std::sqrt(-q_at_energy(xi, co, E, pts[0]));
    return extract_core(xi, E, co, Cval, lat, nullptr);
}

std::vector<double> bethe_residual(const BetheState& s, BetheForm form) {
    return form == BetheForm::sigma ? residual_sigma_rows(s) : residual_theta_rows(s);
}

namespace {
Complex bethe_energy_one(const BetheState& s, BetheForm form);
}

Complex bethe_energy(const BetheState& s, BetheForm form) {
    const Complex E = bethe_energy_one(s, form);
    // For a converged state on the normalized lattice the two formulas must
    // agree; a gap signals an inconsistent (t, c) combination.
    if (s.lat.normalized() && s.residual_sigma >= 0.0 && s.residual_sigma <= 1e-8 &&
        s.residual_theta >= 0.0 && s.residual_theta <= 1e-8) {
        const Complex other = bethe_energy_one(s, form == BetheForm::sigma ? BetheForm::theta
                                                                           : BetheForm::sigma);
        if (std::abs(E - other) > 1e-7 * (1.0 + std::abs(E)))
            throw InconsistentState("bethe_energy: sigma and theta formulas disagree");
    }
    return E;
}

namespace {

Complex bethe_energy_one(const BetheState& s, BetheForm form) {
    const Couplings& c = s.cpl;
    const Lattice& lat = s.lat;
    LatticeConstants lc = lattice_constants(lat);
    const int l = static_cast<int>(s.t.size());

    Complex E;
    if (form == BetheForm::sigma) {
        const Complex cc = s.csigma;
        E = -cc * cc + double(c[0] * c[1] + c[2] * c[3]) * lc.e1 +
            double(c[0] * c[2] + c[1] * c[3]) * lc.e2 + double(c[0] * c[3] + c[1] * c[2]) * lc.e3;
        for (int i = 1; i <= 3; ++i)
            if (c[i] != 0)
                E -= double(c[i]) * lc.eta(i) * (2.0 * cc + double(c.sum()) * lc.eta(i));
        for (int j = 0; j < l; ++j)
            for (int i = 0; i < 4; ++i) {
                if (c[i] == 0) continue;
                const Complex u = s.t[static_cast<std::size_t>(j)] - lat.half_period(i);
                const Complex z = zeta_at(u, lat);
                E -= double(c[i]) * (wp_at(u, lat) - z * z);
            }
        for (int j = 0; j < l; ++j)
            for (int k = j + 1; k < l; ++k) {
                const Complex u = s.t[static_cast<std::size_t>(j)] - s.t[static_cast<std::size_t>(k)];
                const Complex z = zeta_at(u, lat);
                E += wp_at(u, lat) - z * z;
            }
    } else {
        require_normalized(lat, "bethe_energy");
        const Complex ct = s.ctheta();
        const Complex tau = lat.tau;
        E = pi * pi * (ct * ct + double((c[0] + c[1]) * (c[2] + c[3]))) +
            double(c.sum() * (c.sum() + 1)) * lc.eta1 + double(c[0] * c[1] + c[2] * c[3]) * lc.e1 +
            double(c[0] * c[2] + c[1] * c[3]) * lc.e2 + double(c[0] * c[3] + c[1] * c[2]) * lc.e3;
        for (int j = 0; j < l; ++j)
            for (int k = j + 1; k < l; ++k)
                E -= theta_2nd_ratio(s.t[static_cast<std::size_t>(j)] - s.t[static_cast<std::size_t>(k)], tau);
        for (int j = 0; j < l; ++j)
            for (int i = 0; i < 4; ++i)
                if (c[i] != 0)
                    E += double(c[i]) *
                         theta_2nd_ratio(s.t[static_cast<std::size_t>(j)] - theta_offset(i, lat), tau);
    }
    return E;
}

} // namespace

namespace {

EVector square_rows_impl(const Couplings& c, const Lattice& lat, const LatticeConstants& lc,
                         const std::vector<Complex>& t, BetheForm form) {
    const int l = static_cast<int>(t.size());
    const Complex tau = lat.tau;
    const int a = first_active(c);
    EVector F(l);
    if (form == BetheForm::theta) {
        const Complex cpi = pi * iu * ctheta_from_row(c, lat, t, a);
        for (int j = 0; j < l; ++j) {
            Complex row = cpi;
            for (int k = 0; k < l; ++k)
                if (k != j) row += theta_logd(t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(j)], tau);
            for (int i = 0; i < 4; ++i)
                if (c[i] != 0)
                    row += double(c[i]) * theta_logd(t[static_cast<std::size_t>(j)] - theta_offset(i, lat), tau);
            F(j) = row;
        }
    } else {
        Complex cs;
        if (a == 0) {
            cs = 0.0;
            for (Complex tk : t) cs -= zeta_at(tk, lat);
        } else {
            cs = -double(c.sum()) * lc.eta(a);
            for (Complex tk : t) cs -= zeta_at(tk - lat.half_period(a), lat);
        }
        for (int j = 0; j < l; ++j) {
            Complex row = cs;
            for (int k = 0; k < l; ++k)
                if (k != j) row += zeta_at(t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(j)], lat);
            if (c[0] != 0) row -= double(c[0]) * zeta_at(-t[static_cast<std::size_t>(j)], lat);
            for (int i = 1; i <= 3; ++i)
                if (c[i] != 0)
                    row -= double(c[i]) *
                           (zeta_at(lat.half_period(i) - t[static_cast<std::size_t>(j)], lat) - lc.eta(i));
            F(j) = row;
        }
    }
    return F;
}

EMatrix square_jac_impl(const Couplings& c, const Lattice& lat, const std::vector<Complex>& t,
                        BetheForm form) {
    const int l = static_cast<int>(t.size());
    const Complex tau = lat.tau;
    const int a = first_active(c);
    EMatrix J(l, l);
    for (int j = 0; j < l; ++j) {
        for (int m = 0; m < l; ++m) {
            Complex v = 0.0;
            if (form == BetheForm::theta) {
                v -= theta_logd_deriv(t[static_cast<std::size_t>(m)] - theta_offset(a, lat), tau);
                if (m != j) {
                    v += theta_logd_deriv(t[static_cast<std::size_t>(m)] - t[static_cast<std::size_t>(j)], tau);
                } else {
                    for (int k = 0; k < l; ++k)
                        if (k != j)
                            v -= theta_logd_deriv(t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(j)], tau);
                    for (int i = 0; i < 4; ++i)
                        if (c[i] != 0)
                            v += double(c[i]) *
                                 theta_logd_deriv(t[static_cast<std::size_t>(j)] - theta_offset(i, lat), tau);
                }
            } else {
                v += (a == 0) ? wp_at(t[static_cast<std::size_t>(m)], lat)
                              : wp_at(t[static_cast<std::size_t>(m)] - lat.half_period(a), lat);
                if (m != j) {
                    v -= wp_at(t[static_cast<std::size_t>(m)] - t[static_cast<std::size_t>(j)], lat);
                } else {
                    for (int k = 0; k < l; ++k)
                        if (k != j)
                            v += wp_at(t[static_cast<std::size_t>(k)] - t[static_cast<std::size_t>(j)], lat);
                    if (c[0] != 0) v -= double(c[0]) * wp_at(t[static_cast<std::size_t>(j)], lat);
                    for (int i = 1; i <= 3; ++i)
                        if (c[i] != 0)
                            v -= double(c[i]) * wp_at(lat.half_period(i) - t[static_cast<std::size_t>(j)], lat);
                }
            }
            J(j, m) = v;
        }
    }
    return J;
}

} // namespace

std::vector<Complex> bethe_square_rows(const BetheState& s, BetheForm form) {
    if (form == BetheForm::theta) require_normalized(s.lat, "bethe_square_rows");
    const LatticeConstants lc = lattice_constants(s.lat);
    EVector F = square_rows_impl(s.cpl, s.lat, lc, s.t, form);
    std::vector<Complex> out(static_cast<std::size_t>(F.size()));
    for (int i = 0; i < F.size(); ++i) out[static_cast<std::size_t>(i)] = F(i);
    return out;
}

ComplexMatrix bethe_square_jacobian(const BetheState& s, BetheForm form) {
    if (form == BetheForm::theta) require_normalized(s.lat, "bethe_square_jacobian");
    EMatrix J = square_jac_impl(s.cpl, s.lat, s.t, form);
    ComplexMatrix out(static_cast<int>(J.rows()), static_cast<int>(J.cols()));
    for (int i = 0; i < J.rows(); ++i)
        for (int j = 0; j < J.cols(); ++j) out.at(i, j) = J(i, j);
    return out;
}

BetheState newton_refine(const BetheState& s, BetheForm form, double tol) {
    const int l = static_cast<int>(s.t.size());
    if (form == BetheForm::theta) require_normalized(s.lat, "newton_refine");
    if (l == 0) return s;

    const Couplings& c = s.cpl;
    const Lattice& lat = s.lat;
    LatticeConstants lc = lattice_constants(lat);
    const int a = first_active(c);

    auto eval_F = [&](const std::vector<Complex>& t) { return square_rows_impl(c, lat, lc, t, form); };
    auto eval_J = [&](const std::vector<Complex>& t) { return square_jac_impl(c, lat, t, form); };

    std::vector<Complex> t = s.t;
    EVector F = eval_F(t);
    double res = F.cwiseAbs().maxCoeff();
    int iter = 0;
    while (res > tol) {
        if (++iter > 50) throw MaxIterations("newton_refine: 50 iterations exceeded");
        EMatrix J = eval_J(t);
        if (!J.allFinite()) throw SingularJacobian("newton_refine: non-finite Jacobian");

        // The BAE solution set is a curve in t (parameterized by the energy),
        // so the Jacobian has a null direction there; take the minimal-norm step.
        Eigen::JacobiSVD<EMatrix> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        EVector sv = svd.singularValues();
        const double smax = std::abs(sv(0));
        if (!(smax > 0.0)) {
            // Identically zero system (the Lame case with one root): nothing to do.
            break;
        }
        EVector uhF = svd.matrixU().adjoint() * F;
        EVector y(l);
        for (int i = 0; i < l; ++i) {
            const double si = std::abs(sv(i));
            y(i) = (si > 1e-12 * smax) ? uhF(i) / sv(i) : Complex(0.0);
        }
        EVector step = -(svd.matrixV() * y);

        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 8; ++back, lambda *= 0.5) {
            std::vector<Complex> tn = t;
            for (int j = 0; j < l; ++j) tn[static_cast<std::size_t>(j)] += lambda * step(j);
            EVector Fn;
            try {
                Fn = eval_F(tn);
            } catch (const Error&) {
                continue;
            }
            const double rn = Fn.cwiseAbs().maxCoeff();
            if (rn < res) {
                t = tn;
                F = Fn;
                res = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (res <= 1e3 * tol) break;  // stuck at the numerical floor
            throw SingularJacobian("newton_refine: no descent direction");
        }
    }

    BetheState out = s;
    out.t = t;
    if (form == BetheForm::theta) {
        out.csigma = csigma_from_theta(c, lat, t, ctheta_from_row(c, lat, t, a));
    } else {
        if (a == 0) {
            Complex cs = 0.0;
            for (Complex tk : t) cs -= zeta_at(tk, lat);
            out.csigma = cs;
        } else if (a > 0) {
            Complex cs = -double(c.sum()) * lc.eta(a);
            for (Complex tk : t) cs -= zeta_at(tk - lat.half_period(a), lat);
            out.csigma = cs;
        }
    }
    out.E = bethe_energy(out, form);
    out.residual_sigma = max_residual(residual_sigma_rows(out));
    out.residual_theta = lat.normalized() ? max_residual(residual_theta_rows(out)) : -1.0;
    return out;
}

std::pair<Complex, Complex> monodromy_multipliers(const BetheState& s) {
    const Couplings& c = s.cpl;
    const Lattice& lat = s.lat;
    LatticeConstants lc = lattice_constants(lat);

    Complex tsum = 0.0;
    for (Complex tj : s.t) tsum += tj;

    auto closed = [&](int k) {
        const Complex wk = lat.half_period(k);
        const Complex ek = lc.eta(k);
        Complex expo = 2.0 * ek * tsum + 2.0 * s.csigma * wk;
        for (int i = 1; i <= 3; ++i)
            if (c[i] != 0)
                expo += 2.0 * double(c[i]) * (wk * lc.eta(i) - ek * lat.half_period(i));
        return std::exp(expo);
    };
    const Complex m1 = closed(1);
    const Complex m3 = closed(3);

    // Verify against the direct ratio Lambda(x + 2 omega_k) / Lambda(x).
    auto pts = fundamental_points(lat, 16, 55u, 0.12);
    for (Complex x0 : pts) {
        bool ok = true;
        for (int i = 0; i < 4; ++i)
            if (c[i] != 0 && lattice_distance(x0 - lat.half_period(i), lat) < 1e-2) ok = false;
        for (Complex tj : s.t)
            if (lattice_distance(x0 + tj, lat) < 1e-2 ||
                lattice_distance(x0 + 2.0 * lat.omega1 + tj, lat) < 1e-2 ||
                lattice_distance(x0 + 2.0 * lat.omega3 + tj, lat) < 1e-2)
                ok = false;
        if (!ok) continue;
        const Complex base = eigenfunction_lambda(x0, s.E, s);
        const Complex r1 = eigenfunction_lambda(x0 + 2.0 * lat.omega1, s.E, s) / base;
        const Complex r3 = eigenfunction_lambda(x0 + 2.0 * lat.omega3, s.E, s) / base;
        if (std::abs(r1 - m1) > 1e-8 * std::abs(m1) || std::abs(r3 - m3) > 1e-8 * std::abs(m3))
            throw Error("monodromy_multipliers: closed form disagrees with the direct ratio");
        return {m1, m3};
    }
    throw Error("monodromy_multipliers: no usable verification point");
}

Complex eigenfunction_lambda(Complex x, Complex E, const BetheState& state) {
    if (std::abs(E - state.E) > 1e-8 * (1.0 + std::abs(state.E)))
        throw DomainError("eigenfunction_lambda: energy does not match the state");
    const Couplings& c = state.cpl;
    const Lattice& lat = state.lat;

    for (int i = 0; i < 4; ++i)
        if (c[i] != 0 && lattice_distance(x - lat.half_period(i), lat) < 1e-8)
            throw PoleAt("eigenfunction_lambda: x at a pole of the ansatz");

    Complex num = 1.0, den = 1.0;
    for (Complex tj : state.t) {
        num *= wp_family(x + tj, lat, WpKind::sigma);
        den *= wp_family(tj, lat, WpKind::sigma);
    }
    if (c[0] != 0) den *= std::pow(wp_family(x, lat, WpKind::sigma), c[0]);
    const WpKind cos_kind[3] = {WpKind::cosigma1, WpKind::cosigma2, WpKind::cosigma3};
    for (int i = 1; i <= 3; ++i)
        if (c[i] != 0) den *= std::pow(wp_family(x, lat, cos_kind[i - 1]), c[i]);
    return num / den * std::exp(state.csigma * x);
}

std::vector<Rat> trig_sigma_coefficients(int l0, int l1, const Rat& c, SigmaMethod method) {
    if (l0 < 0 || l1 < 0) throw DomainError("trig_sigma_coefficients: couplings must be >= 0");
    const int l = l0 + l1;

    if (method == SigmaMethod::recursion) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1, Rat(0));
        s[0] = 1;
        if (l >= 1) {
            if (c + 1 == 0) throw DenominatorZero("sigma recursion: c = -1");
            s[1] = Rat(l0 - l1) * (c - l) / (c + 1);
        }
        for (int i = 2; i <= l; ++i) {
            const Rat den = Rat(i) * (Rat(i) + c);
            if (den == 0) throw DenominatorZero("sigma recursion: vanishing denominator");
            s[static_cast<std::size_t>(i)] =
                Rat(l0 - l1) * (c + 2 * i - 2 - l) / den * s[static_cast<std::size_t>(i - 1)] +
                Rat(i - 2 - l) * (c + i - 2 - l) / den * s[static_cast<std::size_t>(i - 2)];
        }
        return s;
    }

    // Closed forms: product formulas with the Pochhammer continuation of empty
    // ranges (prod_{j=a}^{b} f = 1 / prod_{j=b+1}^{a-1} f when b < a - 1).
    auto gprod = [](auto f, int a, int b) -> Rat {
        Rat out = 1;
        if (b >= a) {
            for (int j = a; j <= b; ++j) out *= f(j);
            return out;
        }
        if (b == a - 1) return out;
        Rat den = 1;
        for (int j = b + 1; j <= a - 1; ++j) den *= f(j);
        if (den == 0) throw DenominatorZero("sigma closed form: empty-range continuation");
        return 1 / den;
    };
    auto factorial = [](int n) {
        Rat out = 1;
        for (int j = 2; j <= n; ++j) out *= j;
        return out;
    };

    std::vector<std::vector<Rat>> results;

    auto guard_div = [](const Rat& den) {
        if (den == 0) throw DenominatorZero("sigma closed form: vanishing denominator");
        return den;
    };

    if (l1 == 0) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1);
        for (int m = 0; m <= l; ++m) {
            Rat v = 1;
            for (int j = 0; j <= m - 1; ++j)
                v *= Rat(l0 - j) * (c + j - l0) / guard_div(Rat(j + 1) * (c + j + 1));
            s[static_cast<std::size_t>(m)] = v;
        }
        results.push_back(std::move(s));
    }
    if (l1 == 1) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1);
        s[0] = 1;
        for (int m = 1; m <= l; ++m) {
            Rat v = gprod([&](int j) { return Rat(l0 - j); }, 0, m - 2) *
                    gprod([&](int j) { return c + j - l0; }, 1, m - 2);
            Rat den = factorial(m);
            for (int j = 0; j <= m - 1; ++j) den *= (c + j + 1);
            v /= guard_div(den);
            v *= (c - l0 - 1) *
                 (Rat(l0 - 2 * m + 1) * c - Rat(l0) * l0 - l0 + 2 * m * l0 + 2 * m - 2 * m * m);
            s[static_cast<std::size_t>(m)] = v;
        }
        results.push_back(std::move(s));
    }
    if (l1 == 2) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1);
        s[0] = 1;
        for (int m = 1; m <= l; ++m) {
            Rat v = gprod([&](int j) { return Rat(l0 - j); }, 0, m - 3) *
                    gprod([&](int j) { return c + j - l0; }, 2, m - 3);
            Rat den = factorial(m);
            for (int j = 0; j <= m - 1; ++j) den *= (c + j + 1);
            v /= guard_div(den);
            const Rat L = l0, M = m;
            const Rat q2 = L * L - (4 * M - 3) * L + 4 * M * M - 8 * M + 2;
            const Rat q1 = 2 * (-L * L * L + (4 * M - 3) * L * L - (6 * M * M - 10 * M + 2) * L +
                                4 * M * M * M - 12 * M * M + 8 * M);
            const Rat q0 = L * L * L * L - (4 * M - 3) * L * L * L + (8 * M * M - 12 * M + 1) * L * L -
                           (8 * M * M * M - 20 * M * M + 8 * M + 3) * L + 4 * M * M * M * M -
                           16 * M * M * M + 16 * M * M - 2;
            v *= (c - l0) * (c - l0 - 2) * (c * c * q2 + c * q1 + q0);
            s[static_cast<std::size_t>(m)] = v;
        }
        results.push_back(std::move(s));
    }
    if (l1 == l0) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1, Rat(0));
        s[0] = 1;
        for (int m = 1; 2 * m <= l; ++m) {
            Rat v = 1;
            for (int j = 0; j <= m - 1; ++j)
                v *= Rat(j - l0) * (c + 2 * j - 2 * l0) / guard_div(Rat(j + 1) * (c + 2 * j + 2));
            s[static_cast<std::size_t>(2 * m)] = v;
        }
        results.push_back(std::move(s));
    }
    if (l1 == l0 - 1) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1, Rat(0));
        s[0] = 1;
        for (int m = 1; 2 * m - 1 <= l; ++m) {
            Rat num = gprod([&](int j) { return Rat(j - l0); }, 1, m - 1);
            for (int j = 0; j <= m - 1; ++j) num *= (c + 2 * j + 1 - 2 * l0);
            Rat den = factorial(m - 1);
            for (int j = 0; j <= m - 1; ++j) den *= (c + 2 * j + 1);
            s[static_cast<std::size_t>(2 * m - 1)] = num / guard_div(den);
        }
        for (int m = 1; 2 * m <= l; ++m) {
            Rat num = gprod([&](int j) { return Rat(j - l0); }, 1, m);
            for (int j = 0; j <= m - 1; ++j) num *= (c + 2 * j + 1 - 2 * l0);
            Rat den = factorial(m);
            for (int j = 0; j <= m - 1; ++j) den *= (c + 2 * j + 1);
            s[static_cast<std::size_t>(2 * m)] = num / guard_div(den);
        }
        results.push_back(std::move(s));
    }
    if (l1 == l0 - 2) {
        std::vector<Rat> s(static_cast<std::size_t>(l) + 1, Rat(0));
        s[0] = 1;
        for (int m = 1; 2 * m - 1 <= l; ++m) {
            Rat num = 2 * gprod([&](int j) { return Rat(j - l0); }, 2, m);
            for (int j = 0; j <= m - 1; ++j) num *= (c + 2 * j + 2 - 2 * l0);
            Rat den = factorial(m - 1) * (c + 1);
            for (int j = 0; j <= m - 2; ++j) den *= (c + 2 * j + 2);
            s[static_cast<std::size_t>(2 * m - 1)] = num / guard_div(den);
        }
        for (int m = 1; 2 * m <= l; ++m) {
            Rat num = gprod([&](int j) { return Rat(j - l0); }, 2, m);
            for (int j = 0; j <= m - 1; ++j) num *= (c + 2 * j + 2 - 2 * l0);
            Rat den = factorial(m) * (c + 1);
            for (int j = 0; j <= m - 1; ++j) den *= (c + 2 * j + 2);
            s[static_cast<std::size_t>(2 * m)] =
                -num / guard_div(den) *
                (c * Rat(l0 - 2 * m - 1) + Rat(4 * m + 1) * l0 - Rat(2 * m + 1) * (2 * m + 1));
        }
        results.push_back(std::move(s));
    }

    if (results.empty())
        throw DomainError("trig_sigma_coefficients: no closed form applies to (l0, l1)");
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r] != results[0])
            throw Error("trig_sigma_coefficients: applicable closed forms disagree");
    return results[0];
}

std::vector<double> trig_bethe_residual(int l0, int l1, const std::vector<Complex>& T, Complex c) {
    const int l = static_cast<int>(T.size());
    std::vector<double> out;
    for (int j = 0; j < l; ++j) {
        Complex row = c;
        for (int k = 0; k < l; ++k)
            if (k != j)
                row += (T[static_cast<std::size_t>(k)] + T[static_cast<std::size_t>(j)]) /
                       (T[static_cast<std::size_t>(k)] - T[static_cast<std::size_t>(j)]);
        row += double(l0) * (T[static_cast<std::size_t>(j)] + 1.0) / (T[static_cast<std::size_t>(j)] - 1.0);
        row += double(l1) * (T[static_cast<std::size_t>(j)] - 1.0) / (T[static_cast<std::size_t>(j)] + 1.0);
        out.push_back(std::abs(row));
    }
    if (l0 != 0) {
        Complex row = c;
        for (Complex Tj : T) row += (Tj + 1.0) / (Tj - 1.0);
        out.push_back(std::abs(row));
    }
    if (l1 != 0) {
        Complex row = c;
        for (Complex Tj : T) row += (Tj - 1.0) / (Tj + 1.0);
        out.push_back(std::abs(row));
    }
    return out;
}

TrigBetheState trig_bethe_state(int l0, int l1, int m) {
    if (m < 0) throw DomainError("trig_bethe_state: m must be >= 0");
    TrigBetheState ts;
    ts.l0 = l0;
    ts.l1 = l1;
    ts.m = m;
    ts.c = Rat(l0 + l1 + 2 + 2 * m);
    ts.sigma = trig_sigma_coefficients(l0, l1, ts.c, SigmaMethod::recursion);
    ts.E = pi * pi * to_double(ts.c) * to_double(ts.c);

    // Q_T(pi^2 c^2 - C_T) != 0, checked exactly on the rational roots.
    const Rat shifted = ts.c * ts.c - Rat(l0 * (l0 + 1) + l1 * (l1 + 1), 3);
    for (const auto& [root, mult] : trig_q_roots_over_pi2(l0, l1))
        if (shifted == root)
            throw DomainError("trig_bethe_state: c hits a root of the trigonometric Q");

    const int l = l0 + l1;
    if (l == 0) return ts;

    if (ts.sigma[static_cast<std::size_t>(l)] == 0)
        throw RootCollision("trig_bethe_state: vanishing top symmetric function");
    Poly gen(static_cast<std::size_t>(l) + 1);
    for (int j = 0; j <= l; ++j)
        gen[static_cast<std::size_t>(j)] = ((j % 2 == 0) ? 1.0 : -1.0) * to_double(ts.sigma[static_cast<std::size_t>(j)]);
    auto X = all_roots(gen);
    for (Complex x : X) ts.T.push_back(1.0 / x);
    std::sort(ts.T.begin(), ts.T.end(), [](Complex a, Complex b) {
        double aa = std::arg(a), ab = std::arg(b);
        if (aa != ab) return aa < ab;
        return std::abs(a) < std::abs(b);
    });

    for (int j = 0; j < l; ++j) {
        const Complex Tj = ts.T[static_cast<std::size_t>(j)];
        if (std::abs(Tj) < 1e-8 || std::abs(Tj - 1.0) < 1e-8 || std::abs(Tj + 1.0) < 1e-8)
            throw RootCollision("trig_bethe_state: root at an excluded point 0, +-1");
        for (int k = j + 1; k < l; ++k)
            if (std::abs(Tj - ts.T[static_cast<std::size_t>(k)]) < 1e-8)
                throw RootCollision("trig_bethe_state: coincident Bethe roots");
    }

    const double worst = max_residual(trig_bethe_residual(l0, l1, ts.T, to_double(ts.c)));
    if (worst > 1e-10 * (1.0 + to_double(ts.c)))
        throw ResidualTooLarge("trig_bethe_state: Bethe residual above 1e-10");
    return ts;
}

std::vector<PathPoint> continue_in_p(int l0, int l1, int m, double p_target, int steps,
                                     unsigned seed) {
    if (p_target < 0.0 || p_target > 0.05)
        throw DomainError("continue_in_p: require 0 <= p <= 0.05");
    if (steps < 1) throw DomainError("continue_in_p: steps must be >= 1");
    const Couplings cpl(l0, l1, 0, 0);
    const int cm = l0 + l1 + 2 + 2 * m;
    const double CT = (l0 * (l0 + 1) + l1 * (l1 + 1)) * pi * pi / 3.0;
    const double target = pi * pi * double(cm) * double(cm);

    TrigBetheState ts = trig_bethe_state(l0, l1, m);
    std::vector<Complex> t0;
    for (Complex Tj : ts.T) {
        Complex tj = std::log(Tj) / (2.0 * pi * iu);
        tj -= std::round(tj.real());
        t0.push_back(tj);
    }

    std::vector<PathPoint> path;
    path.push_back({0.0, Complex(target - CT), t0, Complex(double(cm)), 0.0});
    if (p_target == 0.0) return path;

    const int l = l0 + l1;

    auto h_eval = [&](Complex E, const Lattice& lat, const LatticeConstants& lc,
                      const std::vector<Complex>& prev) {
        XiRepresentation xi = xi_at_energy(cpl, lat, E, seed);
        auto pts = fundamental_points(lat, 2, 421u, 0.1);
        const Complex Cval = std::sqrt(-q_at_energy(xi, xi.coeff, E, pts[0]));
        BetheState st = extract_core(xi, E, xi.coeff, Cval, lat, &prev);
        Complex h = E - double((l0 + l1) * (l0 + l1 + 1)) * lc.eta1 - double(l0 * l1) * lc.e1;
        for (int j = 0; j < l; ++j)
            for (int k = j + 1; k < l; ++k)
                h += theta_2nd_ratio(st.t[static_cast<std::size_t>(j)] - st.t[static_cast<std::size_t>(k)], lat.tau);
        for (int j = 0; j < l; ++j) {
            if (l0 != 0) h -= double(l0) * theta_2nd_ratio(st.t[static_cast<std::size_t>(j)], lat.tau);
            if (l1 != 0) h -= double(l1) * theta_2nd_ratio(st.t[static_cast<std::size_t>(j)] - 0.5, lat.tau);
        }
        return std::make_pair(h, st);
    };

    for (int attempt = 0;; ++attempt) {
        if (attempt > 3) throw PathLost("continue_in_p: grid refinement exhausted");
        const int n = steps << attempt;
        std::vector<double> grid(static_cast<std::size_t>(n));
        const double p_first = std::max(p_target * std::pow(0.5, n - 1), 1e-9);
        for (int i = 0; i < n; ++i)
            grid[static_cast<std::size_t>(i)] =
                (n == 1) ? p_target
                         : p_first * std::pow(p_target / p_first, double(i) / double(n - 1));

        std::vector<PathPoint> trial(path.begin(), path.begin() + 1);
        bool lost = false;
        Complex E = trial[0].E;
        std::vector<Complex> prev_t = t0;
        Complex slope = 0.0;
        double prev_p = 0.0;

        for (double p : grid) {
            const Lattice lat = Lattice::from_nome(Complex(p));
            const LatticeConstants lc = lattice_constants(lat);
            Complex Eguess = E + slope * (p - prev_p);
            try {
                BetheState st;
                bool converged = false;
                for (int it = 0; it < 25; ++it) {
                    auto [h, stx] = h_eval(Eguess, lat, lc, prev_t);
                    const Complex f = h - target;
                    if (std::abs(f) <= 1e-10 * (1.0 + std::abs(target))) {
                        st = stx;
                        converged = true;
                        break;
                    }
                    const double dE = 1e-6 * (1.0 + std::abs(Eguess));
                    auto [hp, st1] = h_eval(Eguess + dE, lat, lc, prev_t);
                    auto [hm, st2] = h_eval(Eguess - dE, lat, lc, prev_t);
                    const Complex deriv = (hp - hm) / (2.0 * dE);
                    if (std::abs(deriv) < 1e-12) break;
                    Eguess -= f / deriv;
                    if (!std::isfinite(Eguess.real()) || !std::isfinite(Eguess.imag())) break;
                }
                if (!converged) throw PathLost("continue_in_p: energy Newton stalled");

                // Want the +c_m family; a global flip of the roots negates c.
                Complex ct = ctheta_from_row(cpl, lat, st.t, first_active(cpl));
                if (std::abs(ct + double(cm)) < std::abs(ct - double(cm))) {
                    for (auto& tj : st.t) tj = -tj;
                    ct = ctheta_from_row(cpl, lat, st.t, first_active(cpl));
                }
                for (int j = 0; j < l; ++j)
                    for (int k = j + 1; k < l; ++k)
                        if (std::abs(st.t[static_cast<std::size_t>(j)] - st.t[static_cast<std::size_t>(k)]) < 1e-8)
                            throw PathLost("continue_in_p: roots collided");

                st.csigma = csigma_from_theta(cpl, lat, st.t, ct);
                BetheState refined = newton_refine(st, BetheForm::theta, 1e-12);

                if (p > prev_p) slope = (Eguess - E) / (p - prev_p);
                E = Eguess;
                prev_p = p;
                prev_t = refined.t;
                trial.push_back({p, Eguess, refined.t, refined.ctheta(), refined.residual_theta});
            } catch (const Error&) {
                lost = true;
                break;
            }
        }
        if (!lost) return trial;
    }
}

} // namespace heun
