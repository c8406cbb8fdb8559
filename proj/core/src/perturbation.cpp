#include "heun/perturbation.hpp"

#include "heun/bethe.hpp"
#include "heun/errors.hpp"

#include <cmath>

namespace heun {

FourierPotential potential_fourier(const Couplings& c, int K) {
    if (c[2] != 0 || c[3] != 0)
        throw DomainError("potential_fourier: nome expansion requires l2 = l3 = 0");
    if (K < 0 || K > 50) throw DomainError("potential_fourier: require 0 <= K <= 50");

    FourierPotential pot;
    pot.K = K;
    pot.l0 = c[0];
    pot.l1 = c[1];
    const long long L0 = c.strength(0), L1 = c.strength(1);
    pot.harmonics.resize(static_cast<std::size_t>(K));
    pot.constant.assign(static_cast<std::size_t>(K), 0);
    for (int k = 1; k <= K; ++k) {
        for (int n = 1; n <= k; ++n) {
            if (k % n != 0) continue;
            const long long amp = -8LL * n * (L0 + ((n % 2 == 0) ? L1 : -L1));
            if (amp != 0) pot.harmonics[static_cast<std::size_t>(k - 1)].push_back({n, amp});
            pot.constant[static_cast<std::size_t>(k - 1)] += 8LL * n * (L0 + L1);
        }
    }
    return pot;
}

namespace {

// Chebyshev T_n(1 - 2w) as an exact w-polynomial: cos 2n pi x in terms of w.
RatPoly cos_harmonic_poly(int n) {
    RatPoly tprev{Rat(1)};
    if (n == 0) return tprev;
    RatPoly tcur{Rat(1), Rat(-2)};
    for (int k = 2; k <= n; ++k) {
        RatPoly tnext = ratpoly::mul(RatPoly{Rat(2), Rat(-4)}, tcur);
        tnext = ratpoly::add(tnext, ratpoly::scale(tprev, Rat(-1)));
        tprev = std::move(tcur);
        tcur = std::move(tnext);
    }
    return tcur;
}

// Expand a w-polynomial over psi_0..psi_D by back substitution on degrees.
std::vector<Rat> expand_in_psi(RatPoly f, const std::vector<RatPoly>& psi) {
    const int D = static_cast<int>(psi.size()) - 1;
    std::vector<Rat> out(static_cast<std::size_t>(D) + 1, Rat(0));
    ratpoly::trim(f);
    for (int d = ratpoly::degree(f); d >= 0; --d) {
        const Rat fd = (d < static_cast<int>(f.size())) ? f[static_cast<std::size_t>(d)] : Rat(0);
        if (fd == 0) continue;
        if (d > D) throw CutoffTooSmall("potential_matrix_elements: band leaks past the cutoff");
        const Rat lead = psi[static_cast<std::size_t>(d)][static_cast<std::size_t>(d)];
        const Rat coef = fd / lead;
        out[static_cast<std::size_t>(d)] = coef;
        for (std::size_t j = 0; j < psi[static_cast<std::size_t>(d)].size(); ++j) {
            if (j >= f.size()) break;
            f[j] -= coef * psi[static_cast<std::size_t>(d)][j];
        }
    }
    return out;
}

} // namespace

PotentialTable potential_matrix_elements(const FourierPotential& pot, int l0, int l1, int M) {
    const int K = pot.K;
    int max_harm = 0;
    for (const auto& hs : pot.harmonics)
        for (const auto& h : hs) max_harm = std::max(max_harm, h.n);
    if (M < K + max_harm)
        throw CutoffTooSmall("potential_matrix_elements: require M >= K + highest harmonic");

    std::vector<RatPoly> psi(static_cast<std::size_t>(M) + 1);
    for (int mm = 0; mm <= M; ++mm) psi[static_cast<std::size_t>(mm)] = jacobi_mode(l0, l1, mm).psi;

    PotentialTable table;
    table.M = M;
    table.K = K;
    table.V.assign(static_cast<std::size_t>(K),
                   std::vector<std::vector<double>>(static_cast<std::size_t>(M) + 1,
                                                    std::vector<double>(static_cast<std::size_t>(M) + 1, 0.0)));
    for (int k = 1; k <= K; ++k) {
        // V_k / pi^2 as an exact w-polynomial.
        RatPoly vk{Rat(static_cast<long long>(pot.constant[static_cast<std::size_t>(k - 1)]))};
        for (const auto& h : pot.harmonics[static_cast<std::size_t>(k - 1)])
            vk = ratpoly::add(vk, ratpoly::scale(cos_harmonic_poly(h.n), Rat(h.cos_amp)));
        ratpoly::trim(vk);
        const int band = ratpoly::degree(vk);

        for (int m = 0; m <= M; ++m) {
            if (m + band > M) {
                // Columns within the usable window must stay inside the cutoff;
                // higher columns are only consumed below the band edge.
                if (m <= M - band) throw CutoffTooSmall("potential_matrix_elements: band leak");
                continue;
            }
            RatPoly prod = ratpoly::mul(vk, psi[static_cast<std::size_t>(m)]);
            auto col = expand_in_psi(std::move(prod), psi);
            for (int mp = 0; mp <= M; ++mp)
                table.V[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(mp)][static_cast<std::size_t>(m)] =
                    pi * pi * to_double(col[static_cast<std::size_t>(mp)]);
        }
    }
    return table;
}

double PerturbSeries::eval(double p) const {
    double acc = E0;
    double pk = 1.0;
    for (double ek : Ecoef) {
        pk *= p;
        acc += ek * pk;
    }
    return acc;
}

PerturbSeries rayleigh_schrodinger(int l0, int l1, int m, int K, int M) {
    if (m < 0 || K < 0) throw DomainError("rayleigh_schrodinger: require m, K >= 0");
    if (M < 0) M = m + K * K + 2;  // exact band: order k reaches at most m + sum of harmonics

    const Couplings c(l0, l1, 0, 0);
    const FourierPotential pot = potential_fourier(c, K);
    const PotentialTable table = potential_matrix_elements(pot, l0, l1, M);

    PerturbSeries ps;
    ps.l0 = l0;
    ps.l1 = l1;
    ps.m = m;
    ps.K = K;
    ps.M = M;
    const int alpha = l0 + l1 + 2;
    auto mode_energy = [&](int mm) { return pi * pi * double(2 * mm + alpha) * double(2 * mm + alpha); };
    ps.E0 = mode_energy(m) - trig_ct(l0, l1);

    ps.mode_norms.resize(static_cast<std::size_t>(M) + 1);
    for (int mm = 0; mm <= M; ++mm) {
        const RatPoly& pm = jacobi_mode(l0, l1, mm).psi;
        ps.mode_norms[static_cast<std::size_t>(mm)] = to_double(inner_product_reduced(pm, pm, l0, l1));
    }

    ps.orders.assign(static_cast<std::size_t>(K) + 1, std::vector<double>(static_cast<std::size_t>(M) + 1, 0.0));
    ps.orders[0][static_cast<std::size_t>(m)] = 1.0;
    ps.Ecoef.assign(static_cast<std::size_t>(K), 0.0);

    auto apply_V = [&](int j, const std::vector<double>& v) {
        std::vector<double> out(static_cast<std::size_t>(M) + 1, 0.0);
        const auto& Vj = table.V[static_cast<std::size_t>(j - 1)];
        for (int mp = 0; mp <= M; ++mp) {
            double acc = 0.0;
            for (int mm = std::max(0, mp - j); mm <= std::min(M, mp + j); ++mm)
                acc += Vj[static_cast<std::size_t>(mp)][static_cast<std::size_t>(mm)] * v[static_cast<std::size_t>(mm)];
            out[static_cast<std::size_t>(mp)] = acc;
        }
        return out;
    };

    for (int k = 1; k <= K; ++k) {
        // rhs = sum_{j=1}^{k} (E^(j) I - V_j) v^(k-j), with E^(k) not yet known
        // (its v^(0) contribution is separated out through the m-row).
        std::vector<double> rhs(static_cast<std::size_t>(M) + 1, 0.0);
        for (int j = 1; j <= k; ++j) {
            const auto Vv = apply_V(j, ps.orders[static_cast<std::size_t>(k - j)]);
            for (int mp = 0; mp <= M; ++mp) rhs[static_cast<std::size_t>(mp)] -= Vv[static_cast<std::size_t>(mp)];
            if (j < k) {
                const double Ej = ps.Ecoef[static_cast<std::size_t>(j - 1)];
                for (int mp = 0; mp <= M; ++mp)
                    rhs[static_cast<std::size_t>(mp)] +=
                        Ej * ps.orders[static_cast<std::size_t>(k - j)][static_cast<std::size_t>(mp)];
            }
        }
        // m-row: 0 = E^(k) + rhs_m  =>  E^(k) = -rhs_m.
        const double Ek = -rhs[static_cast<std::size_t>(m)];
        ps.Ecoef[static_cast<std::size_t>(k - 1)] = Ek;
        rhs[static_cast<std::size_t>(m)] += Ek;

        auto& vk = ps.orders[static_cast<std::size_t>(k)];
        for (int mp = 0; mp <= M; ++mp) {
            if (mp == m) continue;
            vk[static_cast<std::size_t>(mp)] =
                rhs[static_cast<std::size_t>(mp)] / (mode_energy(mp) - mode_energy(m));
        }
        // Norm condition <v(p), v(p)> = <v, v> at order k.
        double par = 0.0;
        for (int j = 1; j <= k - 1; ++j)
            for (int mp = 0; mp <= M; ++mp)
                par += ps.orders[static_cast<std::size_t>(j)][static_cast<std::size_t>(mp)] *
                       ps.orders[static_cast<std::size_t>(k - j)][static_cast<std::size_t>(mp)] *
                       ps.mode_norms[static_cast<std::size_t>(mp)];
        vk[static_cast<std::size_t>(m)] = -0.5 * par / ps.mode_norms[static_cast<std::size_t>(m)];
    }
    return ps;
}

double perturb_order_residual(const PerturbSeries& ps, const PotentialTable& table, int k) {
    if (k < 1 || k > ps.K) throw DomainError("perturb_order_residual: order out of range");
    const int M = ps.M;
    const int alpha = ps.l0 + ps.l1 + 2;
    auto mode_energy = [&](int mm) { return pi * pi * double(2 * mm + alpha) * double(2 * mm + alpha); };

    std::vector<double> lhs(static_cast<std::size_t>(M) + 1, 0.0);
    for (int mp = 0; mp <= M; ++mp)
        lhs[static_cast<std::size_t>(mp)] = (mode_energy(mp) - mode_energy(ps.m)) *
                                            ps.orders[static_cast<std::size_t>(k)][static_cast<std::size_t>(mp)];
    double scale = pi * pi;
    std::vector<double> rhs(static_cast<std::size_t>(M) + 1, 0.0);
    for (int j = 1; j <= k; ++j) {
        const double Ej = ps.Ecoef[static_cast<std::size_t>(j - 1)];
        const auto& Vj = table.V[static_cast<std::size_t>(j - 1)];
        for (int mp = 0; mp <= M; ++mp) {
            double acc = Ej * ps.orders[static_cast<std::size_t>(k - j)][static_cast<std::size_t>(mp)];
            for (int mm = 0; mm <= M; ++mm)
                acc -= Vj[static_cast<std::size_t>(mp)][static_cast<std::size_t>(mm)] *
                       ps.orders[static_cast<std::size_t>(k - j)][static_cast<std::size_t>(mm)];
            rhs[static_cast<std::size_t>(mp)] += acc;
            scale = std::max(scale, std::abs(acc));
        }
    }
    double worst = 0.0;
    for (int mp = 0; mp <= M; ++mp)
        worst = std::max(worst, std::abs(lhs[static_cast<std::size_t>(mp)] - rhs[static_cast<std::size_t>(mp)]));
    return worst / scale;
}

SlopeResult compare_series_vs_continuation(int l0, int l1, int m, int K,
                                           const std::vector<double>& p_grid, unsigned seed) {
    for (double p : p_grid)
        if (!(p > 0.0) || p > 0.05)
            throw DomainError("compare_series_vs_continuation: grid must lie in (0, 0.05]");

    const PerturbSeries ps = rayleigh_schrodinger(l0, l1, m, K);
    SlopeResult out;
    out.p = p_grid;

    for (double p : p_grid) {
        const auto path = continue_in_p(l0, l1, m, p, 8, seed);
        const double Ec = path.back().E.real();
        out.err.push_back(std::abs(ps.eval(p) - Ec));
    }

    double mx = 0.0;
    for (double e : out.err) mx = std::max(mx, e);
    if (mx == 0.0) {
        out.identically_zero = true;
        out.slope = std::numeric_limits<double>::infinity();
        return out;
    }
    // log-log least squares
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(p_grid.size());
    for (int i = 0; i < n; ++i) {
        const double x = std::log(out.p[static_cast<std::size_t>(i)]);
        const double y = std::log(std::max(out.err[static_cast<std::size_t>(i)], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

} // namespace heun
