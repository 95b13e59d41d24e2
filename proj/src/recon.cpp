#include "gradon/recon.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>

#include "gradon/fft.hpp"
#include "gradon/io.hpp"

namespace gradon {

namespace {

// the centered boxes carry a 25% padding ring around the inner box
double inner_half_width(const GridLayout& g) { return -g.origin[0] / 1.25; }

std::array<int, 3> decode(const GridLayout& g, std::size_t flat) {
  std::array<int, 3> idx{0, 0, 0};
  if (g.n == 3) {
    idx[2] = static_cast<int>(flat % g.shape[2]);
    flat /= g.shape[2];
  }
  idx[1] = static_cast<int>(flat % g.shape[1]);
  idx[0] = static_cast<int>(flat / g.shape[1]);
  return idx;
}

Vec mode_wavenumber(const GridLayout& g, std::size_t flat) {
  const auto idx = decode(g, flat);
  Vec k = Vec::zero(g.n);
  for (int a = 0; a < g.n; ++a) k[a] = fft_wavenumber(idx[a], g.shape[a], g.h);
  return k;
}

}  // namespace

SobolevOrder::SobolevOrder(double order) : m(order) {
  if (!std::isfinite(order) || order < 0.0)
    throw ConfigError("sobolev order must be finite and nonnegative");
}

double boundary_rolloff(const GridLayout& grid, const Vec& x) {
  double r = 1.0;
  for (int a = 0; a < grid.n; ++a) {
    const double lo = grid.origin[a];
    const double hi = grid.origin[a] + grid.shape[a] * grid.h;
    const double width = 0.1 * (hi - lo) / 2.0;  // half of the padding ring
    const double d = std::min(x[a] - lo, hi - x[a]);
    r *= smooth_step(d / width);
  }
  return r;
}

double sobolev_norm(const ScalarField& f, SobolevOrder order, bool roll_off) {
  const GridLayout& g = f.grid;
  std::vector<std::complex<double>> hat(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double v = f.values[i];
    if (roll_off) v *= boundary_rolloff(g, g.point(i));
    hat[i] = v;
  }
  fft_forward(g, hat);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k2 = mode_wavenumber(g, i).norm2();
    sum += std::pow(1.0 + k2, order.m) * std::norm(hat[i]);
  }
  return std::sqrt(sum * g.cell_volume() / static_cast<double>(g.size()));
}

SymbolPreconditioner::SymbolPreconditioner(const GridLayout& grid,
                                           const PrincipalSymbol& symbol)
    : grid_(grid), multiplier_(grid.size(), 0.0) {
  Vec center = Vec::zero(grid.n);
  for (int a = 0; a < grid.n; ++a)
    center[a] = grid.origin[a] + 0.5 * grid.shape[a] * grid.h;

  // refuse anything that is not elliptic at the freezing point
  const int probe_dirs = grid.n == 2 ? 64 : 128;
  for (const Direction& d : sample_directions(grid.n, probe_dirs)) {
    const double p = symbol(center, d.u);
    if (!(p > 0.0) || !std::isfinite(p))
      throw NumericalError("preconditioner requires an elliptic symbol at the domain center");
  }

  double k_min = 2.0 * kPi / (grid.shape[0] * grid.h);
  for (int a = 1; a < grid.n; ++a)
    k_min = std::min(k_min, 2.0 * kPi / (grid.shape[a] * grid.h));

  // Follow 1/p only up to half the grid Nyquist and freeze it beyond. The
  // smoothed-delta transfer rolls off the top octave, so a Riesz multiplier
  // that keeps growing there amplifies modes the discrete normal operator
  // barely produces and makes CG slower, not faster.
  const double k_cap = 0.5 * kPi / grid.h;

  // The kernel representation of the normal operator carries a (2pi)^-n that
  // the symbol value does not; dividing it out here makes the filter undo the
  // operator, not just its shape, so P(N f) lands near f instead of a
  // (2pi)^n multiple of it.
  const double quantization = std::pow(2.0 * kPi, grid.n);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec k = mode_wavenumber(grid_, i);
    const double mag = k.norm();
    Vec xi = mag > 0.0 ? k * (1.0 / mag) : Vec::zero(grid.n);
    if (mag == 0.0) xi[0] = 1.0;
    const double p = symbol(center, xi * std::max(k_min, std::min(mag, k_cap)));
    multiplier_[i] = 1.0 / (quantization * p);
  }
}

ScalarField SymbolPreconditioner::apply(const ScalarField& g) const {
  if (!(g.grid == grid_)) throw ConfigError("preconditioner: field layout mismatch");
  std::vector<std::complex<double>> hat(g.values.begin(), g.values.end());
  fft_forward(grid_, hat);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= multiplier_[i];
  fft_inverse(grid_, hat);
  ScalarField out = ScalarField::zeros(grid_, g.tag);
  for (std::size_t i = 0; i < hat.size(); ++i) out.values[i] = hat[i].real();
  return out;
}

ScalarField precondition(const ScalarField& g, const PrincipalSymbol& symbol) {
  return SymbolPreconditioner(g.grid, symbol).apply(g);
}

CgResult cg_normal_solve(const RadonSystem& sys, const Sinogram& g, double tol,
                         int max_iter, bool use_preconditioner) {
  if (!(tol > 0.0)) throw ConfigError("cg tolerance must be positive");
  if (max_iter < 1) throw ConfigError("cg needs at least one iteration");

  const GridLayout& grid = sys.grid();
  const double inner_hw = inner_half_width(grid);

  ScalarField b = sys.adjoint_transpose(g);
  mask_to_box(b, inner_hw);
  const double b_norm = field_norm(b);

  CgResult out;
  out.solution = ScalarField::zeros(grid, DomainTag::FieldOnM);
  if (b_norm == 0.0) {
    out.converged = true;
    return out;
  }

  auto apply_op = [&](const ScalarField& v) {
    ScalarField nv = sys.normal(v);
    mask_to_box(nv, inner_hw);
    return nv;
  };

  std::unique_ptr<SymbolPreconditioner> prec;
  if (use_preconditioner)
    prec = std::make_unique<SymbolPreconditioner>(
        grid, PrincipalSymbol{sys.defining(), sys.weight()});
  auto apply_prec = [&](const ScalarField& v) {
    if (!prec) return v;
    ScalarField z = prec->apply(v);
    mask_to_box(z, inner_hw);
    return z;
  };

  ScalarField& x = out.solution;
  ScalarField r = b;
  ScalarField z = apply_prec(r);
  ScalarField p = z;
  double rz = field_inner(r, z);
  if (!(rz > 0.0)) throw NumericalError("cg: preconditioned residual lost positivity");

  double energy = 0.0;
  double best = 1.0;
  int since_improvement = 0;

  for (int k = 0; k < max_iter; ++k) {
    ScalarField ap = apply_op(p);
    const double pap = field_inner(p, ap);
    if (!(pap > 0.0))
      throw NumericalError("cg: normal map lost positive definiteness on the mask");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      x.values[i] += alpha * p.values[i];
      r.values[i] -= alpha * ap.values[i];
    }
    energy -= alpha * rz;  // quadratic functional decreases by alpha <r, z>
    out.energies.push_back(energy);
    const double rel = field_norm(r) / b_norm;
    out.residuals.push_back(rel);
    out.iterations = k + 1;

    if (rel <= tol) {
      out.converged = true;
      break;
    }
    if (rel < best * (1.0 - 1e-9)) {
      best = rel;
      since_improvement = 0;
    } else if (++since_improvement >= 50) {
      out.stagnated = true;
      break;
    }

    z = apply_prec(r);
    const double rz_next = field_inner(r, z);
    if (!(rz_next > 0.0))
      throw NumericalError("cg: preconditioned residual lost positivity");
    const double beta = rz_next / rz;
    for (std::size_t i = 0; i < p.values.size(); ++i)
      p.values[i] = z.values[i] + beta * p.values[i];
    rz = rz_next;
  }
  return out;
}

namespace {

// frequency-weighted rows of [op restricted to cols]: the squared column
// norm of the result is the order-m Sobolev norm of that operator column
Eigen::MatrixXd sobolev_columns(const GridLayout& grid, double m,
                                const Eigen::MatrixXd& op,
                                const std::vector<std::size_t>& cols) {
  const std::size_t nn = grid.size();
  std::vector<double> roll(nn), wgt(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    roll[i] = boundary_rolloff(grid, grid.point(i));
    wgt[i] = std::pow(1.0 + mode_wavenumber(grid, i).norm2(), m / 2.0);
  }
  const double scale = std::sqrt(grid.cell_volume() / static_cast<double>(nn));

  Eigen::MatrixXd G(2 * nn, cols.size());
  std::vector<std::complex<double>> hat(nn);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t i = 0; i < nn; ++i)
      hat[i] = op(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(cols[c])) *
               roll[i];
    fft_forward(grid, hat);
    for (std::size_t i = 0; i < nn; ++i) {
      G(static_cast<Eigen::Index>(2 * i), static_cast<Eigen::Index>(c)) =
          scale * wgt[i] * hat[i].real();
      G(static_cast<Eigen::Index>(2 * i + 1), static_cast<Eigen::Index>(c)) =
          scale * wgt[i] * hat[i].imag();
    }
  }
  return G;
}

double largest_sigma(const Eigen::MatrixXd& gram, std::uint64_t seed, int iters) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(gram.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
  v.normalize();
  double lam = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd av = gram * v;
    lam = v.dot(av);
    const double nrm = av.norm();
    if (nrm < 1e-300) return 0.0;
    v = av / nrm;
  }
  return std::sqrt(std::max(lam, 0.0));
}

double smallest_sigma(const Eigen::MatrixXd& gram, std::uint64_t seed) {
  Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(gram.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
  v.normalize();
  double lam = 0.0;
  for (int k = 0; k < 300; ++k) {
    Eigen::VectorXd next = solver.solve(v);
    const double nrm = next.norm();
    if (!std::isfinite(nrm) || nrm < 1e-300) return 0.0;
    v = next / nrm;
    const double lam_next = v.dot(gram * v);
    if (k > 5 && std::abs(lam_next - lam) <= 1e-13 * std::abs(lam_next)) {
      lam = lam_next;
      break;
    }
    lam = lam_next;
  }
  return std::sqrt(std::max(lam, 0.0));
}

}  // namespace

StabilityReport estimate_stability_constant(const RadonSystem& sys, std::uint64_t seed) {
  const GridLayout& grid = sys.grid();
  DenseNormal dense = assemble_dense(sys);
  const auto cols = masked_indices(grid, inner_half_width(grid));
  const double order = grid.n - 1;

  Eigen::MatrixXd G = sobolev_columns(grid, order, dense.matrix, cols);
  Eigen::MatrixXd gram = G.transpose() * G;

  StabilityReport rep;
  rep.sobolev_order = order;
  rep.grid_cells = grid.shape[0];
  rep.n_theta = static_cast<int>(sys.layout().n_theta());
  rep.df_id = sys.defining().id;
  rep.weight_id = sys.weight().id;
  rep.sigma_max = largest_sigma(gram, seed + 11, 50);
  rep.sigma_min = smallest_sigma(gram, seed);
  rep.noninjective = rep.sigma_min < 1e-12;
  rep.c_est = 1.0 / std::max(rep.sigma_min, 1e-300);
  return rep;
}

namespace {

struct CkDistances {
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

// sampled directional-derivative seminorms, orders 0 through 4, of the
// difference of two defining/weight pairs
CkDistances sample_ck_distance(const DefiningFunction& f0, const Weight& w0,
                               const DefiningFunction& f1, const Weight& w1,
                               double half_width, std::uint64_t seed) {
  const int n = f0.n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-half_width, half_width);
  std::normal_distribution<double> nd;

  const auto dirs = sample_directions(n, 8);
  const double step = 0.04;
  double order_max[5] = {0, 0, 0, 0, 0};

  for (int s = 0; s < 48; ++s) {
    Vec x = Vec::zero(n);
    for (int a = 0; a < n; ++a) x[a] = ux(rng);
    Vec u = Vec::zero(n);
    for (int a = 0; a < n; ++a) u[a] = nd(rng);
    u = u.normalized();

    for (const Direction& d : dirs) {
      double fphi[5], fw[5];
      for (int j = -2; j <= 2; ++j) {
        const Vec xs = x + u * (j * step);
        fphi[j + 2] = f1.eval(xs, d.u) - f0.eval(xs, d.u);
        fw[j + 2] = w1.eval(xs, d.u) - w0.eval(xs, d.u);
      }
      for (double* f : {fphi, fw}) {
        const double d0 = std::abs(f[2]);
        const double d1 = std::abs((f[3] - f[1]) / (2 * step));
        const double d2 = std::abs((f[3] - 2 * f[2] + f[1]) / (step * step));
        const double d3 =
            std::abs((f[4] - 2 * f[3] + 2 * f[1] - f[0]) / (2 * step * step * step));
        const double d4 = std::abs((f[4] - 4 * f[3] + 6 * f[2] - 4 * f[1] + f[0]) /
                                   (step * step * step * step));
        order_max[0] = std::max(order_max[0], d0);
        order_max[1] = std::max(order_max[1], d1);
        order_max[2] = std::max(order_max[2], d2);
        order_max[3] = std::max(order_max[3], d3);
        order_max[4] = std::max(order_max[4], d4);
      }
    }
  }

  CkDistances out;
  out.c2 = std::max({order_max[0], order_max[1], order_max[2]});
  out.c3 = std::max(out.c2, order_max[3]);
  out.c4 = std::max(out.c3, order_max[4]);
  return out;
}

}  // namespace

PerturbationSweep perturbation_sweep(const DefiningFunction& base_df,
                                     const Weight& base_w,
                                     const PerturbationFamily& family,
                                     const std::vector<double>& deltas,
                                     const GridLayout& grid, int n_theta,
                                     std::uint64_t seed) {
  if (deltas.empty()) throw ConfigError("perturbation sweep needs a delta ladder");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] < 0.0) throw ConfigError("perturbation deltas must be nonnegative");
    if (i > 0 && deltas[i] <= deltas[i - 1])
      throw ConfigError("perturbation deltas must increase monotonically");
  }

  const double inner_hw = inner_half_width(grid);
  const double order = grid.n - 1;
  RadonSystem base_sys(base_df, base_w, grid, n_theta);
  DenseNormal base_dense = assemble_dense(base_sys);
  const auto cols = masked_indices(grid, inner_hw);

  Eigen::MatrixXd base_G = sobolev_columns(grid, order, base_dense.matrix, cols);
  const double base_sigma = smallest_sigma(base_G.transpose() * base_G, seed);

  // base-operator data for the perturbed inversions
  ScalarField truth = ScalarField::zeros(grid, DomainTag::FieldOnM);
  const double spread = 0.3 * inner_hw;
  Vec c = Vec::zero(grid.n);
  c[0] = 0.1 * inner_hw;
  c[1] = -0.05 * inner_hw;
  for (std::size_t i = 0; i < grid.size(); ++i)
    truth.values[i] = std::exp(-(grid.point(i) - c).norm2() / (2 * spread * spread));
  mask_to_box(truth, inner_hw);
  Sinogram base_data = base_sys.forward(truth);
  const double truth_norm = field_norm(truth);

  PerturbationSweep sweep;
  sweep.deltas = deltas;
  sweep.base_sigma_min = base_sigma;

  for (double delta : deltas) {
    DefiningFunction df = family.defining(delta);
    Weight w = family.weight(delta);

    const CkDistances dist =
        sample_ck_distance(base_df, base_w, df, w, inner_hw, seed);
    sweep.dist_c2.push_back(dist.c2);
    sweep.dist_c3.push_back(dist.c3);
    sweep.dist_c4.push_back(dist.c4);

    RadonSystem sys(df, w, grid, n_theta);
    DenseNormal dense = assemble_dense(sys);

    Eigen::MatrixXd diff = dense.matrix - base_dense.matrix;
    Eigen::MatrixXd diff_G = sobolev_columns(grid, order, diff, cols);
    Eigen::MatrixXd diff_gram = diff_G.transpose() * diff_G;
    double op = 0.0;
    for (std::uint64_t restart : {1u, 2u, 3u})
      op = std::max(op, largest_sigma(diff_gram, seed + restart, 30));
    sweep.opnorm.push_back(op);

    Eigen::MatrixXd G = sobolev_columns(grid, order, dense.matrix, cols);
    sweep.sigma_min.push_back(smallest_sigma(G.transpose() * G, seed));

    CgResult recon = cg_normal_solve(sys, base_data, 1e-8, 500);
    double err2 = 0.0;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
      const double d = recon.solution.values[i] - truth.values[i];
      err2 += d * d;
    }
    sweep.recon_error.push_back(std::sqrt(err2) * std::sqrt(grid.cell_volume()) /
                                truth_norm);
    sweep.recon_iterations.push_back(recon.iterations);
  }

  std::vector<double> lx, ly;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (deltas[i] > 0.0 && sweep.opnorm[i] > 0.0) {
      lx.push_back(std::log(deltas[i]));
      ly.push_back(std::log(sweep.opnorm[i]));
      num += sweep.opnorm[i] * deltas[i];
      den += deltas[i] * deltas[i];
    }
  }
  if (lx.size() >= 2) {
    const LinearFit fit = linear_fit(lx, ly);
    sweep.slope = fit.slope;
    sweep.r2 = fit.r2;
  }
  const double c2_coeff = den > 0.0 ? num / den : 0.0;
  sweep.absorption_threshold =
      c2_coeff > 0.0 ? std::min(base_sigma / (2.0 * c2_coeff), 0.5) : 0.5;

  sweep.weyl_ok = true;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double slack = 1e-10 + 1e-8 * base_sigma;
    if (sweep.sigma_min[i] < base_sigma - sweep.opnorm[i] - slack)
      sweep.weyl_ok = false;
  }
  return sweep;
}

void write_sweep_csv(const std::string& path, const PerturbationSweep& sweep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open sweep csv for writing: " + path);
  out << "delta,dist_c2,dist_c3,dist_c4,opnorm,sigma_min,recon_error,iterations\n";
  for (std::size_t i = 0; i < sweep.deltas.size(); ++i) {
    out << csv_number(sweep.deltas[i]) << ',' << csv_number(sweep.dist_c2[i]) << ','
        << csv_number(sweep.dist_c3[i]) << ',' << csv_number(sweep.dist_c4[i]) << ','
        << csv_number(sweep.opnorm[i]) << ',' << csv_number(sweep.sigma_min[i]) << ','
        << csv_number(sweep.recon_error[i]) << ',' << sweep.recon_iterations[i]
        << '\n';
  }
  if (!out.good()) throw ConfigError("failed while writing sweep csv: " + path);
}

}  // namespace gradon
