#include "heun/trig_spectrum.hpp"

#include "heun/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace heun;

namespace {

RatPoly one_minus_2w_pow(int m) {  // (cos 2 pi x)^m as a w-polynomial
    RatPoly out{Rat(1)};
    for (int k = 0; k < m; ++k) out = ratpoly::mul(out, RatPoly{Rat(1), Rat(-2)});
    return out;
}

} // namespace

TEST_CASE("jacobi modes: low orders in closed form") {
    {
        auto jm = jacobi_mode(2, 1, 0);
        REQUIRE(jm.psi.size() == 1);
        CHECK(jm.psi[0] == Rat(1));
        CHECK(jm.eigenvalue == doctest::Approx(pi * pi * 25.0));
    }
    {
        const int l0 = 2, l1 = 1, alpha = l0 + l1 + 2;
        auto jm = jacobi_mode(l0, l1, 1);
        REQUIRE(jm.psi.size() == 2);
        CHECK(jm.psi[0] == Rat(1));
        CHECK(jm.psi[1] == -Rat(alpha + 1) / Rat(2 * l0 + 3, 2));
    }
    CHECK_THROWS_AS(jacobi_mode(1, 1, 500), DomainError);
}

TEST_CASE("trig hamiltonian: eigenmodes and triangular action") {
    // H_T(1) = pi^2 (l0+l1+2)^2
    {
        auto h = apply_trig_hamiltonian(RatPoly{Rat(1)}, 1, 0);
        REQUIRE(ratpoly::degree(h) == 0);
        CHECK(h[0] == Rat(9));
    }
    // exact eigenmode property up to m = 10
    for (auto [l0, l1] : {std::pair{1, 0}, {2, 1}, {0, 3}}) {
        const int alpha = l0 + l1 + 2;
        for (int m = 0; m <= 10; ++m) {
            auto jm = jacobi_mode(l0, l1, m);
            auto h = apply_trig_hamiltonian(jm.psi, l0, l1);
            auto expect = ratpoly::scale(jm.psi, Rat((2 * m + alpha)) * Rat((2 * m + alpha)));
            ratpoly::trim(expect);
            CHECK(h == expect);
        }
    }
    // triangular action on (cos 2 pi x)^m: the remainder is of lower order,
    // with subleading coefficient 4 m (l0 - l1)
    for (auto [l0, l1] : {std::pair{2, 1}, {1, 3}}) {
        const int alpha = l0 + l1 + 2;
        for (int m = 1; m <= 6; ++m) {
            auto h = apply_trig_hamiltonian(one_minus_2w_pow(m), l0, l1);
            auto diag = ratpoly::scale(one_minus_2w_pow(m), Rat((2 * m + alpha)) * Rat((2 * m + alpha)));
            auto rest = ratpoly::add(h, ratpoly::scale(diag, Rat(-1)));
            ratpoly::trim(rest);
            CHECK(ratpoly::degree(rest) <= m - 1);
            // coefficient of (cos 2 pi x)^(m-1): w-leading coefficient over (-2)^(m-1)
            if (static_cast<int>(rest.size()) >= m) {
                const Rat lead = rest[static_cast<std::size_t>(m - 1)];
                CHECK(lead == Rat(4 * m * (l0 - l1)) * rat_pow(Rat(-2), m - 1));
            }
        }
    }
    // lower triangular in the w-monomial basis with diagonal (2d+alpha)^2
    {
        const int l0 = 1, l1 = 1, alpha = l0 + l1 + 2;
        for (int d = 0; d <= 8; ++d) {
            RatPoly wd(static_cast<std::size_t>(d) + 1, Rat(0));
            wd[static_cast<std::size_t>(d)] = 1;
            auto h = apply_trig_hamiltonian(wd, l0, l1);
            CHECK(ratpoly::degree(h) <= d);
            CHECK(h[static_cast<std::size_t>(d)] == Rat((2 * d + alpha)) * Rat((2 * d + alpha)));
        }
    }
}

TEST_CASE("inner product: orthogonality, positivity, quadrature oracle") {
    for (auto [l0, l1] : {std::pair{1, 0}, {2, 1}}) {
        std::vector<JacobiMode> modes;
        for (int m = 0; m <= 6; ++m) modes.push_back(jacobi_mode(l0, l1, m));

        CHECK(std::abs(inner_product(modes[0].psi, modes[1].psi, l0, l1)) == 0.0);
        for (int m = 0; m <= 6; ++m) CHECK(inner_product(modes[static_cast<std::size_t>(m)].psi, modes[static_cast<std::size_t>(m)].psi, l0, l1) > 0.0);
        for (int m = 0; m <= 6; ++m)
            for (int mp = 0; mp <= 6; ++mp) {
                if (m == mp) continue;
                CHECK(inner_product_reduced(modes[static_cast<std::size_t>(m)].psi, modes[static_cast<std::size_t>(mp)].psi, l0, l1) == 0);
                CHECK(std::abs(inner_product(modes[static_cast<std::size_t>(m)].psi, modes[static_cast<std::size_t>(mp)].psi, l0, l1)) < 1e-12);
            }

        // adaptive quadrature of the actual trigonometric integrand
        for (auto [ma, mb] : {std::pair{0, 0}, {1, 1}, {0, 2}, {2, 3}}) {
            auto integrand = [&, ma = ma, mb = mb](double x) {
                auto eval = [&](const RatPoly& p) {
                    const double w = 0.5 * (1.0 - std::cos(2.0 * pi * x));
                    double acc = 0.0;
                    for (std::size_t k = p.size(); k-- > 0;) acc = acc * w + to_double(p[k]);
                    return acc;
                };
                const double phi2 = std::pow(std::sin(pi * x), 2 * (l0 + 1)) *
                                    std::pow(std::cos(pi * x), 2 * (l1 + 1));
                return phi2 * eval(modes[static_cast<std::size_t>(ma)].psi) * eval(modes[static_cast<std::size_t>(mb)].psi);
            };
            const double quad = oracles::simpson(integrand, 0.0, 1.0, 1e-13);
            const double exact = inner_product(modes[static_cast<std::size_t>(ma)].psi, modes[static_cast<std::size_t>(mb)].psi, l0, l1);
            CHECK(std::abs(quad - exact) < 1e-10 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("symmetrized Bethe function is proportional to the Jacobi mode") {
    {
        const Complex r = lambda_sym_ratio(0, 0, 1);
        CHECK(std::abs(r) > 0.0);
    }
    {
        const Complex r = lambda_sym_ratio(1, 0, 0);
        CHECK(std::isfinite(r.real()));
    }
    {
        const Complex r = lambda_sym_ratio(2, 1, 1);
        CHECK(std::isfinite(r.real()));
    }
    {
        const Complex r = lambda_sym_ratio(1, 1, 2);
        CHECK(std::isfinite(r.real()));
    }
}
