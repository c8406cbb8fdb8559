#include "heun/perturbation.hpp"

#include "heun/bethe.hpp"
#include "heun/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace heun;

TEST_CASE("fourier potential") {
    {
        // V_1 = -8 pi^2 [ l0(l0+1)(cos - 1) + l1(l1+1)(-cos - 1) ]
        const auto pot = potential_fourier(Couplings(2, 1, 0, 0), 3);
        REQUIRE(pot.harmonics.size() == 3);
        REQUIRE(pot.harmonics[0].size() == 1);
        CHECK(pot.harmonics[0][0].n == 1);
        CHECK(pot.harmonics[0][0].cos_amp == -8 * (6 - 2));
        CHECK(pot.constant[0] == 8 * (6 + 2));
        // V_2 carries harmonics n in {1, 2} only
        std::vector<int> ns;
        for (const auto& h : pot.harmonics[1]) ns.push_back(h.n);
        CHECK(ns == std::vector<int>{1, 2});
        // V_3: divisors of 3
        ns.clear();
        for (const auto& h : pot.harmonics[2]) ns.push_back(h.n);
        CHECK(ns == std::vector<int>{1, 3});
    }
    {
        const auto pot = potential_fourier(Couplings(0, 0, 0, 0), 4);
        for (const auto& hs : pot.harmonics) CHECK(hs.empty());
        for (long long cst : pot.constant) CHECK(cst == 0);
    }
    CHECK_THROWS_AS(potential_fourier(Couplings(1, 0, 1, 0), 2), DomainError);

    // consistency with the wp nome expansion: V_k(x) equals the p^k coefficient
    // of l0(l0+1) wp(x) + l1(l1+1) wp(x+1/2)
    {
        const int l0 = 2, l1 = 1;
        const auto pot = potential_fourier(Couplings(l0, l1, 0, 0), 4);
        const Complex x(0.23);
        auto c0 = wp_p_expansion(x, 4);
        auto c1 = wp_p_expansion(x, 4, true);
        for (int k = 1; k <= 4; ++k) {
            const Complex expect = double(l0 * (l0 + 1)) * c0[static_cast<std::size_t>(k)] +
                                   double(l1 * (l1 + 1)) * c1[static_cast<std::size_t>(k)];
            Complex got(double(pot.constant[static_cast<std::size_t>(k - 1)]), 0.0);
            for (const auto& h : pot.harmonics[static_cast<std::size_t>(k - 1)])
                got += double(h.cos_amp) * std::cos(2.0 * h.n * pi * x);
            got *= pi * pi;
            CHECK(std::abs(got - expect) < 1e-10 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("potential matrix elements") {
    const int l0 = 1, l1 = 1, K = 3, M = 8;
    const auto pot = potential_fourier(Couplings(l0, l1, 0, 0), K);
    const auto table = potential_matrix_elements(pot, l0, l1, M);

    // band structure: zero beyond |m - m'| > k
    for (int k = 1; k <= K; ++k)
        for (int m = 0; m + k <= M; ++m)
            for (int mp = 0; mp <= M; ++mp)
                if (std::abs(m - mp) > k)
                    CHECK(table.V[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(mp)][static_cast<std::size_t>(m)] == 0.0);

    // diagonal element of V_1 at m = 0 against quadrature
    {
        const auto psi0 = jacobi_mode(l0, l1, 0).psi;
        auto integrand = [&](double x) {
            const double phi2 = std::pow(std::sin(pi * x), 2 * (l0 + 1)) *
                                std::pow(std::cos(pi * x), 2 * (l1 + 1));
            double v1 = double(pot.constant[0]);
            for (const auto& h : pot.harmonics[0]) v1 += double(h.cos_amp) * std::cos(2.0 * h.n * pi * x);
            v1 *= pi * pi;
            return phi2 * v1;  // psi_0 = 1
        };
        const double num = oracles::simpson(integrand, 0.0, 1.0, 1e-13);
        const double den = inner_product(psi0, psi0, l0, l1);
        CHECK(std::abs(table.V[0][0][0] - num / den) < 1e-10 * std::max(1.0, std::abs(num / den)));
    }

    // zero potential gives the zero table
    {
        const auto z = potential_matrix_elements(potential_fourier(Couplings(0, 0, 0, 0), 2), 0, 0, 6);
        for (const auto& mat : z.V)
            for (const auto& row : mat)
                for (double v : row) CHECK(v == 0.0);
    }

    CHECK_THROWS_AS(potential_matrix_elements(pot, l0, l1, 2), CutoffTooSmall);
}

TEST_CASE("rayleigh-schrodinger recursion") {
    const int l0 = 1, l1 = 1;
    {
        // first-order coefficient is the diagonal matrix element of V_1
        const auto ps = rayleigh_schrodinger(l0, l1, 0, 1);
        const auto table = potential_matrix_elements(potential_fourier(Couplings(l0, l1, 0, 0), 1), l0, l1, ps.M);
        CHECK(std::abs(ps.Ecoef[0] - table.V[0][0][0]) < 1e-12 * std::max(1.0, std::abs(ps.Ecoef[0])));
    }
    {
        // enlarging the cutoff beyond the band leaves the coefficients unchanged
        const auto a = rayleigh_schrodinger(l0, l1, 1, 3);
        const auto b = rayleigh_schrodinger(l0, l1, 1, 3, a.M + 5);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(a.Ecoef[static_cast<std::size_t>(k)] - b.Ecoef[static_cast<std::size_t>(k)]) <=
                  1e-12 * std::max(1.0, std::abs(a.Ecoef[static_cast<std::size_t>(k)])));
    }
    {
        // order-by-order residual of the perturbation equations
        const auto ps = rayleigh_schrodinger(2, 1, 1, 4);
        const auto table = potential_matrix_elements(potential_fourier(Couplings(2, 1, 0, 0), 4), 2, 1, ps.M);
        for (int k = 1; k <= 4; ++k) CHECK(perturb_order_residual(ps, table, k) <= 1e-10);
    }
    {
        // norm condition holds order by order
        const auto ps = rayleigh_schrodinger(l0, l1, 0, 3);
        for (int k = 1; k <= 3; ++k) {
            double acc = 0.0;
            for (int j = 0; j <= k; ++j)
                for (int mp = 0; mp <= ps.M; ++mp)
                    acc += ps.orders[static_cast<std::size_t>(j)][static_cast<std::size_t>(mp)] *
                           ps.orders[static_cast<std::size_t>(k - j)][static_cast<std::size_t>(mp)] *
                           ps.mode_norms[static_cast<std::size_t>(mp)];
            CHECK(std::abs(acc) < 1e-12);
        }
    }
    {
        // free case: empty potential, all coefficients zero
        const auto ps = rayleigh_schrodinger(0, 0, 2, 3);
        for (double e : ps.Ecoef) CHECK(e == 0.0);
    }
}

TEST_CASE("series against continuation at low order") {
    // K = 0: error O(p); the slope certifies the leading correction
    auto res = compare_series_vs_continuation(1, 1, 0, 0, {1e-3, 3e-3, 1e-2});
    CHECK(res.slope >= 1.0);

    auto res0 = compare_series_vs_continuation(0, 0, 1, 2, {1e-3, 1e-2});
    CHECK(res0.identically_zero);
}
