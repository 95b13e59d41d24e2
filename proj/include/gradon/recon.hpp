#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gradon/normal.hpp"

namespace gradon {

/// Sobolev smoothness order for norms on the padded box.
struct SobolevOrder {
  double m = 0.0;
  explicit SobolevOrder(double order);
};

/// C-infinity collar that is 1 in the interior and falls to 0 at the box
/// boundary. The box carries a 25% padding ring by convention; the roll-off
/// occupies the outer half of that ring, so fields supported in the inner
/// box pass through unchanged.
double boundary_rolloff(const GridLayout& grid, const Vec& x);

/// ( sum_k (1 + |k|^2)^m |f_hat(k)|^2 )^{1/2} via the DFT on the periodic
/// box. With roll_off the field is first tapered to vanish at the boundary;
/// the bare periodic variant is the torus test path.
double sobolev_norm(const ScalarField& f, SobolevOrder order, bool roll_off = true);

/// Frozen-coefficient inverse-symbol filter: the Fourier multiplier
/// 1 / ((2pi)^n p(x_c, xi)) with x_c the domain center and (2pi)^n the
/// quantization constant of the operator's kernel representation. |xi| is
/// floored at the first nonzero lattice mode, so the zero mode is scaled,
/// not annihilated, and capped at half the grid Nyquist, past which the
/// discrete operator's smoothed-delta transfer has rolled off anyway. Not an
/// exact inverse of the normal map; intended as a CG preconditioner.
class SymbolPreconditioner {
 public:
  SymbolPreconditioner(const GridLayout& grid, const PrincipalSymbol& symbol);

  ScalarField apply(const ScalarField& g) const;
  const GridLayout& grid() const { return grid_; }

 private:
  GridLayout grid_;
  std::vector<double> multiplier_;
};

ScalarField precondition(const ScalarField& g, const PrincipalSymbol& symbol);

struct CgResult {
  ScalarField solution;
  std::vector<double> residuals;  // relative residual per iteration
  std::vector<double> energies;   // quadratic functional, decreases monotonically
  int iterations = 0;
  bool converged = false;
  bool stagnated = false;
};

/// Preconditioned conjugate gradient on N f = R^T g over fields supported in
/// the inner box (a mask projector is applied around every operator and
/// preconditioner call). Stops at relative residual <= tol or after max_iter
/// sweeps, whichever comes first; a stall of the residual over a long window
/// sets the stagnated flag, which signals a collapsing injectivity margin.
CgResult cg_normal_solve(const RadonSystem& sys, const Sinogram& g, double tol,
                         int max_iter, bool use_preconditioner = true);

struct StabilityReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double c_est = 0.0;  // 1 / sigma_min
  bool noninjective = false;
  double sobolev_order = 0.0;
  int grid_cells = 0;
  int n_theta = 0;
  std::string df_id;
  std::string weight_id;
};

/// Smallest singular value of f -> N f as a map from L^2 of the inner box to
/// the order-(n-1) Sobolev norm on the padded box, via dense assembly and
/// inverse power iteration; c_est = 1/sigma_min is the stability constant.
/// The seed drives the power-iteration start vectors.
StabilityReport estimate_stability_constant(const RadonSystem& sys,
                                            std::uint64_t seed = 2026);

/// One-parameter family of nearby transform definitions.
struct PerturbationFamily {
  std::function<DefiningFunction(double)> defining;
  std::function<Weight(double)> weight;
};

struct PerturbationSweep {
  std::vector<double> deltas;
  std::vector<double> dist_c2, dist_c3, dist_c4;
  std::vector<double> opnorm;     // ||N - N_delta||, L^2 -> H^{n-1}
  std::vector<double> sigma_min;  // injectivity margin of the perturbed map
  std::vector<double> recon_error;
  std::vector<int> recon_iterations;
  double base_sigma_min = 0.0;
  double slope = 0.0;  // log-log fit of opnorm against delta
  double r2 = 0.0;
  double absorption_threshold = 0.0;  // min{ sigma_min / (2 C2), 1/2 }
  bool weyl_ok = false;  // sigma_min(N_d) >= sigma_min(N) - ||N - N_d|| throughout
};

/// For each delta: sampled C^2..C^4 distances of the family member from the
/// base pair, the Sobolev-weighted operator-norm gap, the perturbed
/// injectivity margin, and a reconstruction of base-operator data with the
/// perturbed operator. Data flows base -> perturbed, mirroring a modeling
/// error in the forward map.
PerturbationSweep perturbation_sweep(const DefiningFunction& base_df,
                                     const Weight& base_w,
                                     const PerturbationFamily& family,
                                     const std::vector<double>& deltas,
                                     const GridLayout& grid, int n_theta,
                                     std::uint64_t seed = 2026);

void write_sweep_csv(const std::string& path, const PerturbationSweep& sweep);

}  // namespace gradon
