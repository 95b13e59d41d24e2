#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gradon/core.hpp"
#include "gradon/grid.hpp"

namespace gradon {

/// Unit direction on S^{n-1}.
struct Direction {
  Vec u;
  int dim() const { return u.n; }
  /// Polar angle in [0, 2*pi); only meaningful for n = 2.
  double angle() const;
};

/// n = 2: uniform angles starting at (1,0). n = 3: Fibonacci sphere.
std::vector<Direction> sample_directions(int n, int count);

/// Quadrature weight per sampled direction: |S^{n-1}| / count.
double direction_quadrature_weight(int n, int count);

/// Nominal angular spacing of the sample set (2*pi/count on S^1,
/// sqrt(4*pi/count) on S^2).
double direction_spacing(int n, int count);

enum class DefiningKind { Euclidean, Perturbed, UserSupplied };

/// Phase function phi(x, theta), positive homogeneous of degree one in
/// theta, with closed-form first derivatives and the mixed Hessian
/// d2 phi / dx^i dtheta^j. Level sets {x : phi(x,theta) = s} are the
/// integration surfaces.
struct DefiningFunction {
  int n = 2;
  DefiningKind kind = DefiningKind::UserSupplied;
  std::string id = "user";
  std::function<double(const Vec&, const Vec&)> eval;
  std::function<Vec(const Vec&, const Vec&)> grad_x;
  std::function<Vec(const Vec&, const Vec&)> grad_theta;
  std::function<Mat(const Vec&, const Vec&)> mixed_hessian;
};

/// Smooth nonvanishing weight w(x, theta). Real-valued here: a complex
/// weight would force complex sinograms, which the file formats and
/// phantoms do not use.
struct Weight {
  int n = 2;
  std::string id = "constant";
  std::function<double(const Vec&, const Vec&)> eval;
  double min_abs_witness = 0.0;

  /// Samples |w| over box x directions; records the witness and throws
  /// ConfigError if w vanishes or changes sign on the samples.
  void validate(const Box& box, int n_x, int n_theta);
};

Weight make_constant_weight(int n, double value = 1.0);
/// w(x) = base + amplitude * exp(-|x - center|^2 / (2 sigma^2)).
Weight make_gaussian_modulated_weight(int n, double base, double amplitude,
                                      double sigma, const Vec& center);

/// Compactly supported C-infinity bump
///   a(x) = amplitude * exp(-r^2 / (1 - r^2)),  r = |x - center| / radius,
/// identically zero for r >= 1, with a closed-form gradient.
struct BumpFunction {
  int n = 2;
  Vec center = Vec::zero(2);
  double radius = 0.5;
  double amplitude = 1.0;

  double operator()(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  /// Max of |gradient| sampled over the support box.
  double max_gradient_norm() const;
};

/// phi(x, theta) = x . theta.
DefiningFunction make_euclidean(int n);

/// phi_eps(x, theta) = x . theta + eps * a(x) * |theta|. Throws if eps is
/// large enough that the mixed-Hessian determinant 1 + eps grad a . theta^
/// becomes nonpositive (the family leaves the admissible class).
DefiningFunction make_perturbed(const BumpFunction& a, double eps);

/// Test fixture: phi = x . theta + c(x1) |theta| with c strong enough that
/// x -> d_theta phi collides at distinct points (injectivity failure).
/// Any such fold in this family necessarily drives the mixed-Hessian
/// determinant nonpositive as well, so the defining checks fail with it.
DefiningFunction make_folded(int n = 2);

struct ConditionCheck {
  bool ok = false;
  double worst = 0.0;
  Vec x;
  Vec theta;
};

/// Verdicts from sampling the defining-function conditions and the global
/// Bolker condition. check_defining fills only the defining part;
/// check_bolker fills everything. Deterministic for a fixed configuration.
struct BolkerReport {
  // defining conditions
  ConditionCheck homogeneity;       // worst relative homogeneity defect
  ConditionCheck gradient_nonzero;  // worst = min |d_x phi|
  ConditionCheck hessian_positive;  // worst = min det mixed Hessian
  ConditionCheck derivative_consistency;  // finite-difference mismatch (advisory)

  // Bolker: x -> d_theta phi injective per theta
  bool injectivity_ok = false;
  double injectivity_margin = 0.0;  // min |d_theta phi(x1)-d_theta phi(x2)| / |x1-x2|
  Vec witness_x1, witness_x2, witness_theta;
  double witness_gap = 0.0;

  // Bolker: theta -> d_x phi / |d_x phi| surjective per x.
  // The condition concerns x in M; the gap over the padded box is
  // measured too and reported alongside.
  bool surjectivity_ok = false;
  double surjectivity_worst_gap = 0.0;
  double surjectivity_worst_gap_padded = 0.0;
  double surjectivity_threshold = 0.0;

  int n_x = 0;
  int n_theta = 0;
  double grid_spacing = 0.0;

  bool defining_ok() const {
    return homogeneity.ok && gradient_nonzero.ok && hessian_positive.ok;
  }
  bool bolker_ok() const { return injectivity_ok && surjectivity_ok; }
  bool all_ok() const { return defining_ok() && bolker_ok(); }
};

/// Samples homogeneity (lambda in {0.5, 2}), min |d_x phi|, min mixed-
/// Hessian determinant over an n_x^n node grid times n_theta directions,
/// plus a finite-difference consistency spot check of the derivatives.
BolkerReport check_defining(const DefiningFunction& df, const Box& box,
                            int n_x, int n_theta);

/// Full report: defining conditions plus the quantitative injectivity
/// margin (pair scan, threshold 1e-6 on the separation ratio) and the
/// covector covering gap (threshold 2x the direction spacing). If padded
/// is given, the covering gap is additionally measured over it.
BolkerReport check_bolker(const DefiningFunction& df, const Box& box,
                          int n_x, int n_theta,
                          const Box* padded = nullptr);

}  // namespace gradon
