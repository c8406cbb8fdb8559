#ifndef HEUN_INVARIANT_SPACE_HPP
#define HEUN_INVARIANT_SPACE_HPP

#include "heun/couplings.hpp"
#include "heun/elliptic.hpp"
#include "heun/poly.hpp"

#include <array>
#include <vector>

namespace heun {

/// One sign sector of the decomposition of the space of doubly-periodic-up-to-
/// sign functions.  epsilon_i = +-1 with product +1; alpha_i is the exponent
/// at omega_i (one of -l_i, l_i+1) whose parity matches the sector; the sector
/// carries a basis (sigma1/sigma)^a1 (sigma2/sigma)^a2 (sigma3/sigma)^a3 wp^n,
/// n = 0..d, when d = -(a0+a1+a2+a3)/2 >= 0.
struct ParityClass {
    std::array<int, 4> epsilon;
    std::array<int, 4> alpha;
    int d = -1;

    int dim() const { return d >= 0 ? d + 1 : 0; }
};

struct InvariantSpace {
    Couplings c;
    std::vector<ParityClass> classes;  // only the sectors with d >= 0

    int total_dimension() const {
        int n = 0;
        for (const auto& pc : classes) n += pc.dim();
        return n;
    }
};

/// Dimension of the maximal finite-dimensional invariant subspace, computed
/// both from the k-sorted case split and from the parity-class enumeration
/// (the two must agree).
int invariant_dimension(const Couplings& c);

InvariantSpace parity_basis(const Couplings& c);

/// Value of the sector basis function (sigma1/sigma)^a1 ... wp(x)^n and of its
/// image under H = -d^2/dx^2 + sum_i l_i(l_i+1) wp(x + omega_i).
Complex basis_value(const std::array<int, 4>& alpha, int n, Complex x, const Lattice& lat);
Complex basis_H_value(const Couplings& c, const std::array<int, 4>& alpha, int n, Complex x,
                      const Lattice& lat);

/// Matrix of H on the invariant space, block-diagonal in the parity sectors,
/// each block filled by collocation at dim+4 sample points.
ComplexMatrix hamiltonian_matrix(const InvariantSpace& space, const Lattice& lat,
                                 unsigned seed = 0);

/// Eigenvalues per parity block (concatenated in block order, sorted within
/// each block by real then imaginary part).
std::vector<Complex> hamiltonian_eigenvalues(const InvariantSpace& space, const Lattice& lat,
                                             unsigned seed = 0);
std::vector<Complex> matrix_eigenvalues(const ComplexMatrix& m);

/// Characteristic polynomials c^(1..4)(E) of the four exponent tuples of the
/// l2 = l3 = 0 sector analysis, obtained from the power-series recursion
/// about z = e2.  Their degrees sum to 2 max(l0,l1) + 1.
std::array<Poly, 4> twisted_char_polys(int l0, int l1, const LatticeConstants& lc);

} // namespace heun

#endif
