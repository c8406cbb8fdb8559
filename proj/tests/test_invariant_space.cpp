#include "heun/invariant_space.hpp"

#include "heun/errors.hpp"
#include "heun/spectral_curve.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace heun;

TEST_CASE("invariant dimension: case values") {
    CHECK(invariant_dimension(Couplings(1, 0, 0, 0)) == 3);
    CHECK(invariant_dimension(Couplings(0, 0, 0, 0)) == 1);
    CHECK(invariant_dimension(Couplings(1, 1, 1, 0)) == 5);
    CHECK(invariant_dimension(Couplings(1, 1, 1, 1)) == 3);
    CHECK(invariant_dimension(Couplings(1, 1, 0, 0)) == 3);
}

TEST_CASE("invariant dimension: case split equals parity enumeration, sum l <= 8") {
    for (int s = 0; s <= 8; ++s)
        for (int a = 0; a <= s; ++a)
            for (int b = 0; a + b <= s; ++b)
                for (int cc = 0; a + b + cc <= s; ++cc) {
                    const Couplings c(a, b, cc, s - a - b - cc);
                    int total = 0;
                    for (const auto& pc : parity_basis(c).classes) total += pc.dim();
                    CHECK(total == invariant_dimension(c));
                }
}

TEST_CASE("parity basis: class structure") {
    {
        const auto sp = parity_basis(Couplings(0, 0, 0, 0));
        REQUIRE(sp.classes.size() == 1);
        CHECK(sp.classes[0].epsilon == std::array<int, 4>{1, 1, 1, 1});
        CHECK(sp.classes[0].alpha == std::array<int, 4>{0, 0, 0, 0});
        CHECK(sp.classes[0].d == 0);
    }
    {
        // enumeration of the admissible alpha choices gives three sectors of
        // dimension one
        const auto sp = parity_basis(Couplings(1, 0, 0, 0));
        std::vector<int> dims;
        for (const auto& pc : sp.classes) dims.push_back(pc.dim());
        std::sort(dims.begin(), dims.end());
        CHECK(dims == std::vector<int>{1, 1, 1});
        for (const auto& pc : sp.classes) {
            int prod = 1;
            for (int e : pc.epsilon) prod *= e;
            CHECK(prod == 1);
            for (int i = 0; i < 4; ++i) {
                const int ai = pc.alpha[static_cast<std::size_t>(i)];
                const int par = (1 - pc.epsilon[static_cast<std::size_t>(i)]) / 2;
                CHECK((ai + par) % 2 == 0);
            }
        }
    }
    {
        // (1,1,0,0): one sector of dimension two plus one of dimension one
        const auto sp = parity_basis(Couplings(1, 1, 0, 0));
        std::vector<int> dims;
        for (const auto& pc : sp.classes) dims.push_back(pc.dim());
        std::sort(dims.begin(), dims.end());
        CHECK(dims == std::vector<int>{1, 2});
        CHECK(sp.total_dimension() == 3);
    }
}

TEST_CASE("hamiltonian matrix: zero couplings and the n = 1 Lame block") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    {
        const auto sp = parity_basis(Couplings(0, 0, 0, 0));
        const auto M = hamiltonian_matrix(sp, lat);
        REQUIRE(M.rows == 1);
        CHECK(std::abs(M.at(0, 0)) < 1e-12);
    }
    {
        // eigenvalues {-e1, -e2, -e3}: the band edges of the n = 1 Lame operator,
        // equal to the roots of Q(E) = (E+e1)(E+e2)(E+e3)
        const LatticeConstants lc = lattice_constants(lat);
        auto eig = hamiltonian_eigenvalues(parity_basis(Couplings(1, 0, 0, 0)), lat);
        std::vector<Complex> expect = {-lc.e1, -lc.e2, -lc.e3};
        auto by_re = [](Complex a, Complex b) { return a.real() < b.real(); };
        std::sort(eig.begin(), eig.end(), by_re);
        std::sort(expect.begin(), expect.end(), by_re);
        REQUIRE(eig.size() == 3);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(eig[static_cast<std::size_t>(i)] - expect[static_cast<std::size_t>(i)]) < 1e-9);
    }
    {
        const auto sp = parity_basis(Couplings(2, 1, 0, 0));
        const auto M = hamiltonian_matrix(sp, lat);
        CHECK(M.rows == invariant_dimension(Couplings(2, 1, 0, 0)));
    }
}

TEST_CASE("hamiltonian matrix: eigenvalues real and distinct on rectangular lattices") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 0.8));
    for (const auto& c : {Couplings(2, 0, 0, 0), Couplings(2, 1, 0, 0), Couplings(3, 2, 0, 0)}) {
        auto eig = hamiltonian_eigenvalues(parity_basis(c), lat);
        for (std::size_t i = 0; i < eig.size(); ++i) {
            CHECK(std::abs(eig[i].imag()) < 1e-8 * std::max(1.0, std::abs(eig[i])));
            for (std::size_t j = i + 1; j < eig.size(); ++j)
                CHECK(std::abs(eig[i] - eig[j]) > 1e-6);
        }
    }
}

TEST_CASE("twisted characteristic polynomials") {
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const LatticeConstants lc = lattice_constants(lat);

    {
        auto polys = twisted_char_polys(1, 0, lc);
        int degsum = 0;
        for (const auto& p : polys) degsum += poly::degree(p);
        CHECK(degsum == 3);
    }

    // real distinct roots when (e2-e1)(e2-e3) < 0 (rectangular lattice)
    {
        CHECK(((lc.e2 - lc.e1) * (lc.e2 - lc.e3)).real() < 0.0);
        auto polys = twisted_char_polys(1, 0, lc);
        for (const auto& p : polys) {
            if (poly::degree(p) == 0) continue;
            for (Complex r : all_roots(p)) CHECK(std::abs(r.imag()) < 1e-10 * std::max(1.0, std::abs(r)));
        }
    }

    // product of the four polynomials is proportional to the characteristic
    // polynomial of the Hamiltonian matrix
    for (auto [l0, l1] : {std::pair{1, 0}, {2, 1}}) {
        auto polys = twisted_char_polys(l0, l1, lc);
        Poly prod{Complex(1.0)};
        for (const auto& p : polys) prod = poly::mul(prod, p);
        poly::trim(prod, 1e-13);
        prod = poly::scale(prod, 1.0 / prod.back());

        auto eig = hamiltonian_eigenvalues(parity_basis(Couplings(l0, l1, 0, 0)), lat);
        Poly chi = poly::from_roots(eig);
        REQUIRE(poly::degree(prod) == poly::degree(chi));
        for (std::size_t k = 0; k < chi.size(); ++k)
            CHECK(std::abs(prod[k] - chi[k]) <= 1e-8 * std::max(1.0, std::abs(chi[k])));
    }

    // degrees for the even and odd sector splits
    {
        auto polys = twisted_char_polys(2, 2, lc);
        std::vector<int> degs;
        for (const auto& p : polys) degs.push_back(poly::degree(p));
        std::sort(degs.begin(), degs.end());
        CHECK(degs == std::vector<int>{0, 0, 2, 3});  // sums to 2 l0 + 1
        auto polys2 = twisted_char_polys(2, 1, lc);
        int degsum = 0;
        for (const auto& p : polys2) degsum += poly::degree(p);
        CHECK(degsum == 5);
    }
}

TEST_CASE("parity block structure probed over the full basis") {
    // Solve the collocation system over the union of all sector bases and
    // check that cross-sector couplings vanish.
    const Couplings c(1, 1, 0, 0);
    const Lattice lat = Lattice::from_tau(Complex(0.0, 1.0));
    const auto sp = parity_basis(c);

    struct Fn {
        std::array<int, 4> alpha;
        int n;
        std::size_t cls;
    };
    std::vector<Fn> fns;
    for (std::size_t k = 0; k < sp.classes.size(); ++k)
        for (int n = 0; n <= sp.classes[k].d; ++n) fns.push_back({sp.classes[k].alpha, n, k});
    const int dim = static_cast<int>(fns.size());
    REQUIRE(dim == 3);

    auto pts = fundamental_points(lat, 40, 5u, 0.08);
    std::vector<Complex> use;
    for (Complex x : pts) {
        if (static_cast<int>(use.size()) == dim) break;
        if (std::abs(wp_family(x, lat, WpKind::wp)) < 1e-2) continue;
        use.push_back(x);
    }
    // 3x3 solve per column
    double leakage = 0.0;
    for (int col = 0; col < dim; ++col) {
        // Cramer on the 3x3 system Phi * m = Hphi_col
        Complex A[3][3], b[3];
        for (int r = 0; r < 3; ++r) {
            for (int j = 0; j < 3; ++j)
                A[r][j] = basis_value(fns[static_cast<std::size_t>(j)].alpha, fns[static_cast<std::size_t>(j)].n, use[static_cast<std::size_t>(r)], lat);
            b[r] = basis_H_value(c, fns[static_cast<std::size_t>(col)].alpha, fns[static_cast<std::size_t>(col)].n, use[static_cast<std::size_t>(r)], lat);
        }
        auto det3 = [](Complex m[3][3]) {
            return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        };
        const Complex D = det3(A);
        for (int row = 0; row < 3; ++row) {
            Complex Ai[3][3];
            for (int r = 0; r < 3; ++r)
                for (int j = 0; j < 3; ++j) Ai[r][j] = (j == row) ? b[r] : A[r][j];
            const Complex sol = det3(Ai) / D;
            if (fns[static_cast<std::size_t>(row)].cls != fns[static_cast<std::size_t>(col)].cls)
                leakage = std::max(leakage, std::abs(sol));
        }
    }
    CHECK(leakage < 1e-10);
}
