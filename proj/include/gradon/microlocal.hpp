#pragma once

#include <complex>
#include <string>
#include <vector>

#include "gradon/transform.hpp"

namespace gradon {

/// FBI-type transform of f at the base point x0 in direction xi_hat:
///
///   F(lambda) = sum_y e^{i lambda (x0 - y) . xi_hat} e^{-lambda |x0 - y|^2 / 2}
///               chi(y) f(y) h^n
///
/// The phase vanishes at y = x0 and its x-gradient there is lambda * xi_hat,
/// and the Gaussian factor dominates |x0 - y|^2, so analytic-regular behavior
/// of f at (x0, xi_hat) shows up as rapid decay of |F| in lambda. chi is a
/// fixed radial bump centered at x0: identically 1 within half the distance
/// from x0 to the nearest grid face and tapering smoothly to 0 at that
/// distance, which keeps the integrand supported inside the padded box.
///
/// Requires lambda * h <= pi/2 (the oscillation stays resolvable on the grid)
/// and x0 at least a few cells away from every grid face; both raise
/// ConfigError.
std::complex<double> fbi(const ScalarField& f, const Vec& x0, const Vec& xi_hat,
                         double lambda);

/// Decay of |F(lambda)| along one probe direction, with the two candidate
/// models fitted on log axes over the lambda ladder:
///   exponential  |F| ~ A e^{-lambda * exp_rate}   (log|F| linear in lambda)
///   polynomial   |F| ~ A lambda^{-poly_exponent}  (log|F| linear in log lambda)
/// Whichever model leaves the smaller residual wins. A polynomial win marks
/// the direction wavefront-suspect; this is model selection over finitely
/// many lambda, a consistency score rather than a proof.
struct DirectionDecay {
  Vec xi_hat;
  std::vector<double> magnitudes;  // |F| per ladder entry
  double exp_rate = 0.0;           // decay rate of the exponential model
  double poly_exponent = 0.0;      // exponent of the polynomial model
  double exp_sse = 0.0;            // log-axis residual of the exponential fit
  double poly_sse = 0.0;           // log-axis residual of the polynomial fit
  bool wavefront_suspect = false;

  /// Positive when the polynomial model fits better (suspect direction).
  double score() const { return exp_sse - poly_sse; }
};

struct FbiScan {
  Vec x0;
  std::vector<double> ladder;
  std::vector<DirectionDecay> directions;
};

/// Runs fbi over every (direction, lambda) pair and classifies each
/// direction as analytic-regular or wavefront-suspect. The ladder needs at
/// least four strictly increasing values, all within the Nyquist bound
/// lambda * h <= pi/2 (ConfigError otherwise). Throws NumericalError when
/// every magnitude along a direction underflows (below 1e-300) and no fit
/// is possible.
FbiScan decay_scan(const ScalarField& f, const Vec& x0,
                   const std::vector<Vec>& directions,
                   const std::vector<double>& ladder);

/// One row per (direction, lambda):
/// direction,lambda,magnitude,exp_rate,poly_exponent,verdict
/// with the direction's components joined by ';' and the verdict spelled
/// "analytic-regular" or "wavefront-suspect".
void write_scan_csv(const std::string& path, const FbiScan& scan);

/// Conormal consistency probe at one sinogram location (s0, theta0).
///
/// Sample points are grid cells of the interior box M crossed by the level
/// set {phi(., theta0) = s0}; at each, a decay scan runs along the conormal
/// direction d_x phi / |d_x phi|. The sinogram side computes a kink
/// indicator of R_w f in s near (s0, theta0): the largest second difference
/// over a narrow window divided by the largest first difference over a
/// wider one. For smooth data the quotient shrinks like ds over the feature
/// width; a slope break or square-root kink keeps it order one. Values at
/// or above kink_threshold count as non-smooth.
///
/// A wavefront-suspect conormal direction should only occur together with a
/// non-smooth sinogram; `consistent` records that no sample violates this.
struct ConormalReport {
  double s0 = 0.0;
  Vec theta0;
  std::vector<Vec> samples;        // probed points of the level set in M
  std::vector<bool> suspect;       // per-sample decay verdict
  std::vector<double> scores;      // per-sample model-selection score
  double kink = 0.0;               // sinogram kink indicator near (s0, theta0)
  double kink_threshold = 0.0;
  bool sinogram_smooth = true;

  bool any_suspect() const {
    for (bool s : suspect)
      if (s) return true;
    return false;
  }
  /// No sample is wavefront-suspect while the sinogram is smooth.
  bool consistent() const { return !(any_suspect() && sinogram_smooth); }
};

/// Probes the correlation "wavefront-suspect conormal implies non-smooth
/// sinogram" for the system's transform at (s0, theta0). Samples whose
/// window sees no mass at all count as regular: the zero-data hypothesis
/// holds vacuously there. Throws NumericalError when the level set misses
/// every interior grid cell.
ConormalReport conormal_probe(const RadonSystem& sys, const ScalarField& f,
                              double s0, const Vec& theta0,
                              const std::vector<double>& ladder);

}  // namespace gradon
