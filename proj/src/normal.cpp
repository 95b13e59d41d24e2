#include "gradon/normal.hpp"

#include <cmath>
#include <fstream>

#include "gradon/io.hpp"

namespace gradon {

namespace {

double sinc(double z) { return z == 0.0 ? 1.0 : std::sin(z) / z; }

/// Orthonormal tangent basis at a unit vector (n = 3).
void tangent_basis(const Vec& u, Vec& e1, Vec& e2) {
  const Vec seed = std::abs(u[0]) < 0.9 ? Vec::of(1.0, 0.0, 0.0) : Vec::of(0.0, 1.0, 0.0);
  e1 = (seed - u * seed.dot(u)).normalized();
  e2 = Vec::of(u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2],
               u[0] * e1[1] - u[1] * e1[0]);
}

}  // namespace

double PrincipalSymbol::auxiliary(const Vec& x, const Vec& y, const Vec& theta) const {
  return w.eval(x, theta) * jacobian(df, x, theta) * w.eval(y, theta) *
         jacobian(df, y, theta);
}

Vec PrincipalSymbol::resolve_theta(const Vec& x, const Vec& xi_hat) const {
  auto covector = [&](const Vec& th) {
    Vec g = df.grad_x(x, th);
    const double r = g.norm();
    if (r < 1e-300) throw NumericalError("covector collapsed during theta solve");
    return g * (1.0 / r);
  };

  // coarse seed: nearest covector among sampled directions
  const auto seeds = sample_directions(df.n, df.n == 2 ? 64 : 256);
  Vec theta = seeds[0].u;
  double best = -2.0;
  for (const auto& s : seeds) {
    const double score = covector(s.u).dot(xi_hat);
    if (score > best) {
      best = score;
      theta = s.u;
    }
  }

  for (int iter = 0; iter < max_newton_iters; ++iter) {
    const Vec g = df.grad_x(x, theta);
    const double gn = g.norm();
    const Vec u = g * (1.0 / gn);
    const Vec resid = u - xi_hat;
    if (resid.norm() <= 1e-12) return theta;
    const Mat hess = df.mixed_hessian(x, theta);

    if (df.n == 2) {
      // angle parameterization: d theta/d alpha = theta^perp
      const Vec tperp = Vec::of(-theta[1], theta[0]);
      Vec du = hess.apply(tperp);
      du = (du - u * du.dot(u)) * (1.0 / gn);
      // scalar root: cross(u, xi_hat) = 0 with u pointing along xi_hat
      const double f = u[0] * xi_hat[1] - u[1] * xi_hat[0];
      const double fp = du[0] * xi_hat[1] - du[1] * xi_hat[0];
      if (fp == 0.0) break;
      const double alpha = std::atan2(theta[1], theta[0]) - f / fp;
      theta = Vec::of(std::cos(alpha), std::sin(alpha));
      continue;
    }

    // n = 3: Gauss-Newton step in the tangent plane of the sphere
    Vec e1, e2;
    tangent_basis(theta, e1, e2);
    Vec j1 = hess.apply(e1);
    j1 = (j1 - u * j1.dot(u)) * (1.0 / gn);
    Vec j2 = hess.apply(e2);
    j2 = (j2 - u * j2.dot(u)) * (1.0 / gn);
    const double a11 = j1.dot(j1), a12 = j1.dot(j2), a22 = j2.dot(j2);
    const double b1 = -j1.dot(resid), b2 = -j2.dot(resid);
    const double det = a11 * a22 - a12 * a12;
    if (det == 0.0) break;
    const double c1 = (b1 * a22 - b2 * a12) / det;
    const double c2 = (a11 * b2 - a12 * b1) / det;
    theta = (theta + e1 * c1 + e2 * c2).normalized();
  }
  throw NumericalError(
      "theta solve for the covector identification failed to converge "
      "(surjectivity breakdown near the evaluation point)");
}

double PrincipalSymbol::operator()(const Vec& x, const Vec& xi) const {
  const double norm_xi = xi.norm();
  if (!(norm_xi > 0.0)) throw ConfigError("symbol evaluation needs xi != 0");
  const Vec xi_hat = xi * (1.0 / norm_xi);
  const Vec th_plus = resolve_theta(x, xi_hat);
  const Vec th_minus = resolve_theta(x, -xi_hat);
  const double front = df.n == 2 ? 1.0 / (2.0 * kPi) : 1.0 / (4.0 * kPi * kPi);
  const double sum = auxiliary(x, x, th_plus) + auxiliary(x, x, th_minus);
  return front * sum / std::pow(norm_xi, df.n - 1);
}

ScalarField DenseNormal::apply(const ScalarField& f) const {
  if (!(f.grid == grid)) throw ConfigError("dense normal: field layout mismatch");
  Eigen::Map<const Eigen::VectorXd> v(f.values.data(),
                                      static_cast<Eigen::Index>(f.values.size()));
  ScalarField out = ScalarField::zeros(grid, f.tag);
  Eigen::Map<Eigen::VectorXd>(out.values.data(),
                              static_cast<Eigen::Index>(out.values.size())) = matrix * v;
  return out;
}

double DenseNormal::symmetry_defect() const {
  return (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
}

ScalarField apply_normal(const RadonSystem& sys, const ScalarField& f) {
  return sys.normal(f);
}

DenseNormal assemble_dense(const RadonSystem& sys) {
  const GridLayout& grid = sys.grid();
  std::size_t cap = 1;
  for (int a = 0; a < grid.n; ++a) cap *= kDenseCellCap;
  if (grid.size() > cap)
    throw ConfigError("dense assembly refused: grid exceeds the size cap");

  const auto& layout = sys.layout();
  const Eigen::Index cells = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index bins = static_cast<Eigen::Index>(layout.size());

  Eigen::MatrixXd fwd(bins, cells);
  ScalarField basis = ScalarField::zeros(grid);
  for (Eigen::Index i = 0; i < cells; ++i) {
    basis.values[static_cast<std::size_t>(i)] = 1.0;
    Sinogram col = sys.forward(basis);
    basis.values[static_cast<std::size_t>(i)] = 0.0;
    for (Eigen::Index r = 0; r < bins; ++r)
      fwd(r, i) = col.values[static_cast<std::size_t>(r)];
  }

  DenseNormal dn;
  dn.grid = grid;
  dn.matrix = Eigen::MatrixXd::Zero(cells, cells);
  dn.matrix.selfadjointView<Eigen::Lower>().rankUpdate(fwd.transpose());
  dn.matrix = dn.matrix.selfadjointView<Eigen::Lower>();
  // bin quadrature weight over the field weight h^n, as in the transpose
  dn.matrix *= layout.ds * layout.theta_weight / grid.cell_volume();
  return dn;
}

SymbolProbe probe_symbol(const RadonSystem& sys, const Vec& x0,
                         const Vec& xi_hat, const std::vector<double>& lambdas,
                         double window_radius) {
  if (lambdas.empty()) throw ConfigError("symbol probe needs a lambda ladder");
  const GridLayout& grid = sys.grid();
  for (double l : lambdas)
    if (!(l > 0.0) || l * grid.h > kPi / 2.0 + 1e-12)
      throw ConfigError("symbol probe lambda violates the grid Nyquist bound");

  BumpFunction chi;
  chi.n = grid.n;
  chi.center = x0;
  chi.radius = window_radius;
  chi.amplitude = 1.0;

  PrincipalSymbol symbol{sys.defining(), sys.weight()};
  // the wave-packet quotient estimates the Fourier multiplier, which exceeds
  // the oscillatory-integral symbol by the quantization factor (2 pi)^n
  const double quantization = std::pow(2.0 * kPi, grid.n);

  const Vec th_plus = symbol.resolve_theta(x0, xi_hat);
  const Vec th_minus = symbol.resolve_theta(x0, xi_hat * -1.0);
  const double j_plus = jacobian(sys.defining(), x0, th_plus);
  const double j_minus = jacobian(sys.defining(), x0, th_minus);
  const double a_plus = symbol.auxiliary(x0, x0, th_plus);
  const double a_minus = symbol.auxiliary(x0, x0, th_minus);

  SymbolProbe probe;
  probe.x0 = x0;
  probe.xi_hat = xi_hat;
  probe.lambdas = lambdas;

  for (double lambda : lambdas) {
    ScalarField e = ScalarField::zeros(grid, DomainTag::FieldOnM);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec x = grid.point(i);
      const double window = chi(x);
      if (window != 0.0) e.values[i] = std::cos(lambda * x.dot(xi_hat)) * window;
    }
    const double ee = field_inner(e, e);
    if (!(ee > 0.0)) throw ConfigError("symbol probe window has no grid support");
    const double m = std::abs(field_inner(sys.normal(e), e)) / ee / quantization;

    // each stationary branch oscillates in s at frequency lambda / J
    const double eta = sys.delta().eta;
    const double t_plus = std::pow(sinc(lambda * eta / (2.0 * j_plus)), 4);
    const double t_minus = std::pow(sinc(lambda * eta / (2.0 * j_minus)), 4);
    const double transfer =
        (a_plus * t_plus + a_minus * t_minus) / (a_plus + a_minus);
    const double p = symbol(x0, xi_hat * lambda);

    probe.measured.push_back(m);
    probe.ratio.push_back(m / p);
    probe.transfer.push_back(transfer);
    probe.measured_corrected.push_back(m / transfer);
    probe.ratio_corrected.push_back(m / (transfer * p));
  }

  std::vector<double> lx, ly_raw, ly_corr;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    lx.push_back(std::log(lambdas[i]));
    ly_raw.push_back(std::log(probe.measured[i]));
    ly_corr.push_back(std::log(probe.measured_corrected[i]));
  }
  probe.exponent_raw = linear_fit(lx, ly_raw).slope;
  probe.exponent_corrected = linear_fit(lx, ly_corr).slope;
  return probe;
}

void write_probe_csv(const std::string& path, const SymbolProbe& probe) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "lambda,measured,ratio,transfer,measured_corrected,ratio_corrected\n";
  for (std::size_t i = 0; i < probe.lambdas.size(); ++i) {
    out << csv_number(probe.lambdas[i]) << ',' << csv_number(probe.measured[i])
        << ',' << csv_number(probe.ratio[i]) << ',' << csv_number(probe.transfer[i])
        << ',' << csv_number(probe.measured_corrected[i]) << ','
        << csv_number(probe.ratio_corrected[i]) << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace gradon
