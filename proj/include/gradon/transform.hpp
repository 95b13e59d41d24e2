#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gradon/geometry.hpp"
#include "gradon/grid.hpp"

namespace gradon {

/// Triangular unit-mass profile standing in for delta(s - phi). With
/// eta = 2 * ds the shifted samples form an exact partition of unity,
/// so the forward map conserves weighted mass per direction.
struct DeltaProfile {
  double eta = 0.0;
  double operator()(double t) const {
    const double a = std::abs(t);
    return a >= eta ? 0.0 : (1.0 - a / eta) / eta;
  }
};

struct SinogramLayout {
  int n = 2;
  int n_s = 0;
  double s0 = 0.0;
  double ds = 0.0;
  std::vector<Direction> thetas;
  double theta_weight = 0.0;  // sphere quadrature weight per direction

  int n_theta() const { return static_cast<int>(thetas.size()); }
  double s(int j) const { return s0 + j * ds; }
  std::size_t size() const { return static_cast<std::size_t>(n_s) * thetas.size(); }
  bool same_shape(const SinogramLayout& o) const;
};

/// s range covering phi over the grid's cell centers and all sampled
/// directions, padded by the delta half-width plus one cell; ds = grid.h.
SinogramLayout make_sinogram_layout(const DefiningFunction& df,
                                    const GridLayout& grid, int n_theta);

/// Samples of R_w f, s-major: values[j * n_theta + k].
struct Sinogram {
  SinogramLayout layout;
  std::vector<double> values;
  std::string df_id;
  std::string weight_id;

  static Sinogram zeros(const SinogramLayout& l) {
    Sinogram g;
    g.layout = l;
    g.values.assign(l.size(), 0.0);
    return g;
  }
  double& at(int j, int k) { return values[static_cast<std::size_t>(j) * layout.thetas.size() + k]; }
  double at(int j, int k) const { return values[static_cast<std::size_t>(j) * layout.thetas.size() + k]; }
};

/// Data-side quadrature inner product: sum g1 g2 * ds * theta_weight.
double sino_inner(const Sinogram& a, const Sinogram& b);
double sino_norm(const Sinogram& a);

/// J(x, theta) = |d_x phi(x, theta)|. Throws NumericalError if the
/// gradient collapses (nondegeneracy violation).
double jacobian(const DefiningFunction& df, const Vec& x, const Vec& theta);

/// Discretization of the weighted transform over level sets of phi:
/// forward smears each cell's mass over the s bins its level value hits,
/// adjoint backprojects with the w J weight and linear interpolation, and
/// adjoint_transpose applies the exact matrix transpose of forward so the
/// weighted dot test holds to round-off.
class RadonSystem {
 public:
  RadonSystem(DefiningFunction df, Weight w, GridLayout grid, int n_theta);
  RadonSystem(DefiningFunction df, Weight w, GridLayout grid, SinogramLayout layout);

  const SinogramLayout& layout() const { return layout_; }
  const GridLayout& grid() const { return grid_; }
  const DeltaProfile& delta() const { return delta_; }
  const DefiningFunction& defining() const { return df_; }
  const Weight& weight() const { return w_; }

  Sinogram forward(const ScalarField& f) const;
  ScalarField adjoint(const Sinogram& g) const;
  ScalarField adjoint_transpose(const Sinogram& g) const;
  ScalarField normal(const ScalarField& f) const;

 private:
  void build_tables();
  /// phi and w*J for every direction at one cell; returns pointers into
  /// the precomputed tables or into the provided scratch rows.
  void row_values(std::size_t cell, std::vector<double>& scratch_phi,
                  std::vector<double>& scratch_wj, const double*& phi_row,
                  const double*& wj_row) const;

  DefiningFunction df_;
  Weight w_;
  GridLayout grid_;
  SinogramLayout layout_;
  DeltaProfile delta_;
  bool tabulated_ = false;
  std::vector<double> phi_tab_, wj_tab_;  // [cell * n_theta + k]
};

}  // namespace gradon
