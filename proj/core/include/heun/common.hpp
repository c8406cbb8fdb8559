#ifndef HEUN_COMMON_HPP
#define HEUN_COMMON_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace heun {

using Complex = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline const Complex iu{0.0, 1.0};

/// Dense complex matrix in row-major storage, small dimensions only.
struct ComplexMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Complex> data;

    ComplexMatrix() = default;
    ComplexMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}

    Complex& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const Complex& at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

} // namespace heun

#endif
