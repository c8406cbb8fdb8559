#ifndef HEUN_PERTURBATION_HPP
#define HEUN_PERTURBATION_HPP

#include "heun/couplings.hpp"
#include "heun/rational.hpp"
#include "heun/trig_spectrum.hpp"

#include <vector>

namespace heun {

/// Nome expansion of the potential for l2 = l3 = 0:
///   H = H_T - C_T + sum_k V_k(x) p^k,
///   V_k(x) = -8 pi^2 sum_{n | k} n [ l0(l0+1)(cos 2n pi x - 1)
///                                  + l1(l1+1)((-1)^n cos 2n pi x - 1) ].
/// Amplitudes are exact integers in units of pi^2.
struct FourierPotential {
    int K = 0;
    int l0 = 0, l1 = 0;
    struct Harmonic {
        int n;
        long long cos_amp;  // coefficient of cos 2n pi x, in units of pi^2
    };
    std::vector<std::vector<Harmonic>> harmonics;  // index k-1
    std::vector<long long> constant;               // constant term of V_k, units of pi^2
};

FourierPotential potential_fourier(const Couplings& c, int K);

/// Banded matrices of the V_k acting on the modes Phi psi_0..Phi psi_M:
/// V_k Phi psi_m = sum_{m'} table[k-1][m'][m] Phi psi_{m'}; band |m - m'| <= k.
/// Entries are exact-rational-computed, stored as doubles (including pi^2).
struct PotentialTable {
    int M = 0, K = 0;
    std::vector<std::vector<std::vector<double>>> V;  // V[k-1][mprime][m]
};

PotentialTable potential_matrix_elements(const FourierPotential& pot, int l0, int l1, int M);

/// Rayleigh-Schrodinger series of mode m to order K.
struct PerturbSeries {
    int l0 = 0, l1 = 0, m = 0, K = 0, M = 0;
    double E0 = 0.0;                          // pi^2(2m+l0+l1+2)^2 - C_T
    std::vector<double> Ecoef;                // Ecoef[k-1] = order-k energy coefficient
    std::vector<std::vector<double>> orders;  // orders[k][mprime], k = 0..K
    std::vector<double> mode_norms;           // reduced norms of Phi psi_mprime

    double eval(double p) const;
};

/// Order-k step: (H_T - E_m) v^(k) = sum_j (E^(j) - V_j) v^(k-j); off-diagonal
/// rows divided by the eigenvalue gaps, the m-row fixing E^(k), the norm
/// condition fixing the m-component of v^(k).
PerturbSeries rayleigh_schrodinger(int l0, int l1, int m, int K, int M = -1);

/// Max-norm residual of the order-k perturbation equation, re-substituted.
double perturb_order_residual(const PerturbSeries& ps, const PotentialTable& table, int k);

struct SlopeResult {
    std::vector<double> p;
    std::vector<double> err;
    double slope = 0.0;       // log-log least squares
    bool identically_zero = false;
};

/// |E_series^(<=K)(p) - E_m(p)| on a p-grid against the nome continuation, with
/// the fitted log-log slope (>= K + 0.5 certifies order-K agreement).
SlopeResult compare_series_vs_continuation(int l0, int l1, int m, int K,
                                           const std::vector<double>& p_grid, unsigned seed = 0);

} // namespace heun

#endif
