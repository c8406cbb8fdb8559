#include "heun/bethe.hpp"

#include "heun/errors.hpp"
#include "heun/perturbation.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace heun;

namespace {

BetheState make_state(const Couplings& c, const Lattice& lat, Complex E, unsigned seed = 0) {
    auto xi = xi_polynomials(c, lat, seed);
    auto q = q_polynomial(c, lat, seed);
    return extract_bethe_roots(xi, E, lat, q);
}

} // namespace

TEST_CASE("extraction: Lame n = 1 closed form") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Complex E(1.7, 0.0);
    BetheState s = make_state(Couplings(1, 0, 0, 0), lat, E);
    REQUIRE(s.t.size() == 1);
    // a_1 = -E and t_1 = wp^{-1}(-E)
    CHECK(std::abs(wp_family(s.t[0], lat, WpKind::wp) + E) < 1e-9 * (1.0 + std::abs(E)));
    // c = -zeta(t_1)
    CHECK(std::abs(s.csigma + wp_family(s.t[0], lat, WpKind::zeta)) < 1e-10);
    // E = -wp(t_1) from the energy formula
    CHECK(std::abs(bethe_energy(s, BetheForm::sigma) - E) < 1e-9 * (1.0 + std::abs(E)));
}

TEST_CASE("extraction: residuals and the degenerate guard") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Couplings c(2, 1, 0, 0);
    auto xi = xi_polynomials(c, lat);
    auto q = q_polynomial(c, lat);

    BetheState s = extract_bethe_roots(xi, Complex(5.0, 0.3), lat, q);
    CHECK(s.residual_sigma <= 1e-10);
    CHECK(s.residual_theta <= 1e-9);

    // E at a root of Q: the Bethe form breaks down
    auto roots = all_roots(q.Q);
    CHECK_THROWS_AS(extract_bethe_roots(xi, roots[0], lat, q), SpectralDegenerate);
}

TEST_CASE("residual rows: solution property and sensitivity") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    BetheState s = make_state(Couplings(1, 1, 0, 0), lat, Complex(3.1, 0.4));

    for (double r : bethe_residual(s, BetheForm::sigma)) CHECK(r <= 1e-10);
    for (double r : bethe_residual(s, BetheForm::theta)) CHECK(r <= 1e-10);

    BetheState bad = s;
    bad.t[0] += 1e-4;
    double worst = 0.0;
    for (double r : bethe_residual(bad, BetheForm::sigma)) worst = std::max(worst, r);
    CHECK(worst > 1e-6);
}

TEST_CASE("energy: two formulas agree and reproduce the extraction energy") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const Complex E0(4.2, 0.5);
    BetheState s = make_state(Couplings(2, 1, 0, 0), lat, E0);
    const Complex Es = bethe_energy(s, BetheForm::sigma);
    const Complex Et = bethe_energy(s, BetheForm::theta);
    CHECK(std::abs(Es - E0) <= 1e-8 * (1.0 + std::abs(E0)));
    CHECK(std::abs(Es - Et) <= 1e-8 * (1.0 + std::abs(E0)));

    // free case: E = -c^2
    BetheState free;
    free.cpl = Couplings(0, 0, 0, 0);
    free.lat = lat;
    free.csigma = Complex(0.3, 1.1);
    CHECK(std::abs(bethe_energy(free, BetheForm::sigma) + free.csigma * free.csigma) < 1e-14);
}

TEST_CASE("newton refinement: fixed point, basin, Jacobian") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    BetheState s = make_state(Couplings(1, 1, 0, 0), lat, Complex(3.1, 0.4));

    BetheState again = newton_refine(s, BetheForm::theta, 1e-12);
    for (std::size_t j = 0; j < s.t.size(); ++j) CHECK(std::abs(again.t[j] - s.t[j]) < 1e-9);

    BetheState kicked = s;
    for (auto& tj : kicked.t) tj += Complex(1e-4, -0.7e-4);
    BetheState back = newton_refine(kicked, BetheForm::theta, 1e-12);
    CHECK(back.residual_theta <= 1e-12);
    CHECK(back.residual_sigma <= 1e-9);

    // analytic Jacobian of the square subsystem vs finite differences
    const auto J = bethe_square_jacobian(s, BetheForm::theta);
    const double h = 1e-6;
    for (int m = 0; m < J.cols; ++m) {
        BetheState sp = s, sm = s;
        sp.t[static_cast<std::size_t>(m)] += h;
        sm.t[static_cast<std::size_t>(m)] -= h;
        const auto Fp = bethe_square_rows(sp, BetheForm::theta);
        const auto Fm = bethe_square_rows(sm, BetheForm::theta);
        for (int j = 0; j < J.rows; ++j) {
            const Complex fd = (Fp[static_cast<std::size_t>(j)] - Fm[static_cast<std::size_t>(j)]) / (2.0 * h);
            CHECK(std::abs(fd - J.at(j, m)) < 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }

    // sigma-form refinement converges too
    BetheState kick2 = s;
    kick2.t[1] += Complex(-0.6e-4, 0.4e-4);
    BetheState back2 = newton_refine(kick2, BetheForm::sigma, 1e-12);
    CHECK(back2.residual_sigma <= 1e-12);
}

TEST_CASE("monodromy multipliers") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    BetheState s = make_state(Couplings(1, 0, 0, 0), lat, Complex(1.7));
    auto [m1, m3] = monodromy_multipliers(s);  // internally checked against the ratio

    // reflected eigenfunction has inverse multipliers
    BetheState refl = s;
    for (auto& tj : refl.t) tj = -tj;
    refl.csigma = -s.csigma;
    auto [r1, r3] = monodromy_multipliers(refl);
    CHECK(std::abs(m1 * r1 - 1.0) < 1e-8);
    CHECK(std::abs(m3 * r3 - 1.0) < 1e-8);

    // away from the spectrum the multipliers are nontrivial
    CHECK(std::abs(m1 * m1 - 1.0) + std::abs(m3 * m3 - 1.0) > 1e-6);

    BetheState s2 = make_state(Couplings(2, 1, 0, 0), lat, Complex(5.0, 0.3));
    auto [a1, a3] = monodromy_multipliers(s2);
    CHECK(std::isfinite(a1.real()));
    CHECK(std::isfinite(a3.real()));
}

TEST_CASE("sigma recursion and closed forms") {
    CHECK(trig_sigma_coefficients(1, 0, Rat(3), SigmaMethod::recursion)[1] == Rat(1, 2));
    CHECK(trig_sigma_coefficients(1, 0, Rat(3), SigmaMethod::closed_form)[1] == Rat(1, 2));

    // l1 = l0: all odd sigma vanish
    for (int l0 : {1, 2, 3}) {
        auto s = trig_sigma_coefficients(l0, l0, Rat(2 * l0 + 4), SigmaMethod::recursion);
        for (std::size_t j = 1; j < s.size(); j += 2) CHECK(s[j] == 0);
    }

    // recursion equals every applicable closed form, exactly
    for (int l0 = 0; l0 <= 6; ++l0)
        for (int l1 = 0; l1 <= l0; ++l1) {
            const bool covered = (l1 <= 2) || (l0 - l1 <= 2);
            if (!covered) continue;
            for (const Rat& c : {Rat(l0 + l1 + 2), Rat(19, 3), Rat(23, 2)}) {
                auto rec = trig_sigma_coefficients(l0, l1, c, SigmaMethod::recursion);
                auto cf = trig_sigma_coefficients(l0, l1, c, SigmaMethod::closed_form);
                CHECK(rec == cf);
            }
        }

    CHECK_THROWS_AS(trig_sigma_coefficients(2, 1, Rat(-1), SigmaMethod::recursion), DenominatorZero);
}

TEST_CASE("trigonometric Bethe state") {
    {
        auto ts = trig_bethe_state(1, 0, 0);
        CHECK(ts.c == Rat(3));
        REQUIRE(ts.T.size() == 1);
        CHECK(std::abs(ts.T[0] - 0.5) < 1e-12);
        // residual of the first equation: 3 + (3/2)/(-1/2) = 0
        auto rows = trig_bethe_residual(1, 0, ts.T, Complex(3.0));
        for (double r : rows) CHECK(r < 1e-12);
        CHECK(std::abs(ts.E - 9.0 * pi * pi) < 1e-10);
    }
    {
        // equal couplings: roots come in +- pairs
        auto ts = trig_bethe_state(2, 2, 1);
        REQUIRE(ts.T.size() == 4);
        for (Complex Tj : ts.T) {
            double best = 1e18;
            for (Complex Tk : ts.T) best = std::min(best, std::abs(Tj + Tk));
            CHECK(best < 1e-10);
        }
    }
    {
        auto ts = trig_bethe_state(0, 0, 2);
        CHECK(ts.T.empty());
        CHECK(ts.c == Rat(6));
    }
    {
        auto ts = trig_bethe_state(3, 2, 1);
        auto rows = trig_bethe_residual(3, 2, ts.T, Complex(to_double(ts.c)));
        for (double r : rows) CHECK(r <= 1e-10 * (1.0 + to_double(ts.c)));
    }
}

TEST_CASE("continuation in the nome") {
    {
        auto path = continue_in_p(1, 1, 0, 0.0, 4);
        REQUIRE(path.size() == 1);
        const double expect = pi * pi * 16.0 - (2.0 + 2.0) * pi * pi / 3.0;
        CHECK(std::abs(path[0].E.real() - expect) < 1e-12);
        CHECK(std::abs(path[0].E.imag()) < 1e-12);
    }
    {
        auto path = continue_in_p(1, 1, 0, 1e-4, 6);
        REQUIRE(path.size() >= 2);
        const double E0 = path.front().E.real();
        const double Ep = path.back().E.real();
        // first-order agreement with the perturbation coefficient
        const auto ps = rayleigh_schrodinger(1, 1, 0, 1);
        const double predicted = ps.Ecoef[0] * 1e-4;
        CHECK(std::abs((Ep - E0) - predicted) <= 1e-3 * std::abs(predicted));
        for (const auto& pt : path)
            if (pt.p > 0.0) CHECK(pt.residual_theta <= 1e-10);
    }
    CHECK_THROWS_AS(continue_in_p(1, 1, 0, 0.2, 4), DomainError);
}

TEST_CASE("continuation meets the trigonometric roots at small nome") {
    auto path = continue_in_p(2, 1, 0, 1e-6, 4);
    auto ts = trig_bethe_state(2, 1, 0);
    const auto& last = path.back();
    REQUIRE(last.t.size() == ts.T.size());
    for (const Complex& tj : last.t) {
        const Complex s2 = std::sin(pi * tj) * std::sin(pi * tj);
        double best = 1e18;
        for (Complex Tk : ts.T) {
            const Complex tt = std::log(Tk) / (2.0 * pi * iu);
            best = std::min(best, std::abs(s2 - std::sin(pi * tt) * std::sin(pi * tt)));
        }
        CHECK(best < 1e-4);
    }
}
