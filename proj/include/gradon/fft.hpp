#pragma once

#include <complex>
#include <vector>

#include "gradon/grid.hpp"

namespace gradon {

/// In-place n-dimensional complex DFT over a grid's shape (row-major,
/// matching ScalarField layout). Unnormalized forward; inverse divides
/// by the sample count so inverse(forward(x)) == x.
void fft_forward(const GridLayout& g, std::vector<std::complex<double>>& data);
void fft_inverse(const GridLayout& g, std::vector<std::complex<double>>& data);

/// Signed integer frequency for DFT bin m of an N-point axis.
inline int fft_freq(int m, int N) { return m < (N + 1) / 2 ? m : m - N; }

/// Physical wavenumber of bin m: 2*pi*mtilde / (N*h).
inline double fft_wavenumber(int m, int N, double h) {
  return 2.0 * kPi * fft_freq(m, N) / (N * h);
}

}  // namespace gradon
