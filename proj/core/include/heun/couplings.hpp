#ifndef HEUN_COUPLINGS_HPP
#define HEUN_COUPLINGS_HPP

#include "heun/errors.hpp"

#include <algorithm>
#include <array>

namespace heun {

/// The four non-negative integer coupling constants l_0..l_3 attached to the
/// half-periods, their sum l, and the non-increasing rearrangement k_0 >= ... >= k_3.
struct Couplings {
    std::array<int, 4> l{0, 0, 0, 0};

    Couplings() = default;
    Couplings(int l0, int l1, int l2, int l3) : l{l0, l1, l2, l3} {
        for (int v : l)
            if (v < 0) throw DomainError("couplings must be non-negative integers");
    }

    int operator[](int i) const { return l[static_cast<std::size_t>(i)]; }
    int sum() const { return l[0] + l[1] + l[2] + l[3]; }
    /// Strength of the potential term at omega_i: l_i (l_i + 1).
    int strength(int i) const { return l[static_cast<std::size_t>(i)] * (l[static_cast<std::size_t>(i)] + 1); }

    std::array<int, 4> sorted_desc() const {
        std::array<int, 4> k = l;
        std::sort(k.begin(), k.end(), std::greater<int>());
        return k;
    }
};

} // namespace heun

#endif
