#include "gradon/fft.hpp"

#include <fftw3.h>

namespace gradon {

namespace {

void run_dft(const GridLayout& g, std::vector<std::complex<double>>& data, int sign) {
  if (data.size() != g.size()) throw NumericalError("fft: size mismatch");
  int rank = g.n;
  int dims[3] = {g.shape[0], g.shape[1], g.shape[2]};
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  // FFTW_ESTIMATE keeps planning deterministic and leaves the input intact.
  fftw_plan plan = fftw_plan_dft(rank, dims, ptr, ptr, sign, FFTW_ESTIMATE);
  if (!plan) throw NumericalError("fft: planner failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace

void fft_forward(const GridLayout& g, std::vector<std::complex<double>>& data) {
  run_dft(g, data, FFTW_FORWARD);
}

void fft_inverse(const GridLayout& g, std::vector<std::complex<double>>& data) {
  run_dft(g, data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

}  // namespace gradon
