#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gradon/transform.hpp"

namespace gradon {

/// Leading symbol of the normal map R^T R: evaluates
///   p(x, xi) = (2 pi)^{1-n} (W(x,x,theta(xi^)) + W(x,x,theta(-xi^))) / |xi|^{n-1}
/// with W(x,y,theta) = w(x,theta) J(x,theta) w(y,theta) J(y,theta) and
/// theta(xi^) the sphere parameter whose normalized covector d_x phi/|d_x phi|
/// equals xi^ (weights are real here, so conjugation drops out).
struct PrincipalSymbol {
  DefiningFunction df;
  Weight w;
  int max_newton_iters = 50;

  double auxiliary(const Vec& x, const Vec& y, const Vec& theta) const;

  /// Solves d_x phi(x, theta)/|d_x phi| = xi_hat over the sphere by Newton
  /// iteration seeded from the nearest coarse sample. Failure to converge
  /// signals a surjectivity breakdown near x.
  Vec resolve_theta(const Vec& x, const Vec& xi_hat) const;

  double operator()(const Vec& x, const Vec& xi) const;
};

/// Explicit matrix of the discrete normal map on a small grid, assembled
/// as B^T Omega B from the forward matrix so it is symmetric by
/// construction. matrix maps value vectors to value vectors, matching
/// apply_normal.
struct DenseNormal {
  GridLayout grid;
  Eigen::MatrixXd matrix;

  ScalarField apply(const ScalarField& f) const;
  double symmetry_defect() const;
};

inline constexpr int kDenseCellCap = 24;

ScalarField apply_normal(const RadonSystem& sys, const ScalarField& f);

/// Brute-force oracle; grids above kDenseCellCap cells per axis are refused.
DenseNormal assemble_dense(const RadonSystem& sys);

/// Oscillatory probe of the normal map: windowed plane waves
/// cos(lambda x . xi_hat) * chi(x) measure the Fourier multiplier of N near
/// lambda xi_hat via |<N e, e>| / <e, e>. The symbol normalizes the kernel
/// as an oscillatory integral without the (2 pi)^{-n} quantization factor,
/// so the quotient is divided by (2 pi)^n before comparing with
/// p(x0, lambda xi_hat). Each stationary direction produces a sinogram
/// oscillation at s-frequency lambda / J(x0, theta); the triangular delta
/// profile attenuates that once in the forward pass and once in the
/// transpose, giving a sinc^4 transfer per branch. The aux-weighted branch
/// average is reported and divided out in the corrected columns.
struct SymbolProbe {
  Vec x0, xi_hat;
  std::vector<double> lambdas;
  std::vector<double> measured;
  std::vector<double> ratio;
  std::vector<double> transfer;
  std::vector<double> measured_corrected;
  std::vector<double> ratio_corrected;
  double exponent_raw = 0.0;
  double exponent_corrected = 0.0;
};

SymbolProbe probe_symbol(const RadonSystem& sys, const Vec& x0,
                         const Vec& xi_hat, const std::vector<double>& lambdas,
                         double window_radius);

void write_probe_csv(const std::string& path, const SymbolProbe& probe);

}  // namespace gradon
