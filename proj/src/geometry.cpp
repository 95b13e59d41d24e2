#include "gradon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gradon {

namespace {

constexpr double kInjectivityThreshold = 1e-6;

std::vector<Vec> node_grid(const Box& box, int n_x) {
  if (n_x < 2) throw ConfigError("node grid needs at least 2 points per axis");
  std::vector<Vec> pts;
  const int n = box.n;
  std::array<int, 3> shape{n_x, n_x, n == 3 ? n_x : 1};
  pts.reserve(static_cast<std::size_t>(shape[0]) * shape[1] * shape[2]);
  for (int i0 = 0; i0 < shape[0]; ++i0)
    for (int i1 = 0; i1 < shape[1]; ++i1)
      for (int i2 = 0; i2 < shape[2]; ++i2) {
        Vec x = Vec::zero(n);
        const int idx[3] = {i0, i1, i2};
        for (int a = 0; a < n; ++a)
          x[a] = box.lo[a] + idx[a] * (box.hi[a] - box.lo[a]) / (n_x - 1);
        pts.push_back(x);
      }
  return pts;
}

double angle_between(const Vec& u, const Vec& v) {
  return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

/// Worst covering gap of the normalized covectors at x: largest circular
/// gap on S^1, covering radius (x2) against a probe set on S^2.
double covector_gap(const DefiningFunction& df, const Vec& x,
                    const std::vector<Direction>& thetas,
                    const std::vector<Direction>& probes) {
  std::vector<Vec> cov;
  cov.reserve(thetas.size());
  for (const auto& th : thetas) {
    Vec g = df.grad_x(x, th.u);
    const double r = g.norm();
    if (r < 1e-300) continue;  // degenerate covector carries no direction
    cov.push_back(g * (1.0 / r));
  }
  if (cov.empty()) return kPi;
  if (df.n == 2) {
    std::vector<double> ang;
    ang.reserve(cov.size());
    for (const auto& u : cov) {
      double a = std::atan2(u[1], u[0]);
      if (a < 0) a += 2.0 * kPi;
      ang.push_back(a);
    }
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2.0 * kPi - ang.back();
    for (std::size_t i = 1; i < ang.size(); ++i)
      gap = std::max(gap, ang[i] - ang[i - 1]);
    return gap;
  }
  double worst = 0.0;
  for (const auto& p : probes) {
    double best = kPi;
    for (const auto& u : cov) best = std::min(best, angle_between(p.u, u));
    worst = std::max(worst, best);
  }
  // covering radius doubles to a diameter-style gap for comparability
  return 2.0 * worst;
}

DefiningFunction make_additive(int n, DefiningKind kind, std::string id,
                               std::function<double(const Vec&)> psi,
                               std::function<Vec(const Vec&)> grad_psi) {
  DefiningFunction df;
  df.n = n;
  df.kind = kind;
  df.id = std::move(id);
  df.eval = [psi](const Vec& x, const Vec& th) {
    return x.dot(th) + psi(x) * th.norm();
  };
  df.grad_x = [grad_psi](const Vec& x, const Vec& th) {
    Vec g = grad_psi(x);
    const double r = th.norm();
    Vec out = th;
    for (int i = 0; i < x.n; ++i) out[i] += r * g[i];
    return out;
  };
  df.grad_theta = [psi](const Vec& x, const Vec& th) {
    const double r = th.norm();
    const double c = psi(x);
    Vec out = x;
    for (int i = 0; i < x.n; ++i) out[i] += c * th[i] / r;
    return out;
  };
  df.mixed_hessian = [grad_psi](const Vec& x, const Vec& th) {
    Mat h = Mat::identity(x.n);
    Vec g = grad_psi(x);
    const double r = th.norm();
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < x.n; ++j) h(i, j) += g[i] * th[j] / r;
    return h;
  };
  return df;
}

}  // namespace

double Direction::angle() const {
  double a = std::atan2(u[1], u[0]);
  if (a < 0) a += 2.0 * kPi;
  return a;
}

std::vector<Direction> sample_directions(int n, int count) {
  if (n != 2 && n != 3) throw ConfigError("directions: dimension must be 2 or 3");
  if (count < 1) throw ConfigError("directions: count must be positive");
  std::vector<Direction> out;
  out.reserve(count);
  if (n == 2) {
    for (int j = 0; j < count; ++j) {
      const double a = 2.0 * kPi * j / count;
      Direction d;
      d.u = Vec::of(std::cos(a), std::sin(a));
      out.push_back(d);
    }
    return out;
  }
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int j = 0; j < count; ++j) {
    const double z = 1.0 - (2.0 * j + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = 2.0 * kPi * j / golden;
    Direction d;
    d.u = Vec::of(rho * std::cos(a), rho * std::sin(a), z).normalized();
    out.push_back(d);
  }
  return out;
}

double direction_quadrature_weight(int n, int count) {
  return (n == 2 ? 2.0 * kPi : 4.0 * kPi) / count;
}

double direction_spacing(int n, int count) {
  return n == 2 ? 2.0 * kPi / count : std::sqrt(4.0 * kPi / count);
}

void Weight::validate(const Box& box, int n_x, int n_theta) {
  const auto pts = node_grid(box, n_x);
  const auto dirs = sample_directions(n, n_theta);
  double min_abs = std::numeric_limits<double>::infinity();
  bool pos = false, neg = false;
  for (const auto& x : pts)
    for (const auto& th : dirs) {
      const double v = eval(x, th.u);
      min_abs = std::min(min_abs, std::abs(v));
      pos = pos || v > 0;
      neg = neg || v < 0;
    }
  min_abs_witness = min_abs;
  if (!(min_abs > 0.0))
    throw ConfigError("weight '" + id + "' vanishes on the sampled domain");
  if (pos && neg)
    throw ConfigError("weight '" + id + "' changes sign on the sampled domain");
}

Weight make_constant_weight(int n, double value) {
  if (value == 0.0) throw ConfigError("constant weight must be nonzero");
  Weight w;
  w.n = n;
  char buf[64];
  std::snprintf(buf, sizeof buf, "constant(%g)", value);
  w.id = buf;
  w.eval = [value](const Vec&, const Vec&) { return value; };
  w.min_abs_witness = std::abs(value);
  return w;
}

Weight make_gaussian_modulated_weight(int n, double base, double amplitude,
                                      double sigma, const Vec& center) {
  if (!(sigma > 0)) throw ConfigError("gaussian-modulated weight: sigma must be positive");
  Weight w;
  w.n = n;
  char buf[96];
  std::snprintf(buf, sizeof buf, "gaussian-modulated(%g,%g,%g)", base, amplitude, sigma);
  w.id = buf;
  w.eval = [base, amplitude, sigma, center](const Vec& x, const Vec&) {
    const Vec d = x - center;
    return base + amplitude * std::exp(-d.norm2() / (2.0 * sigma * sigma));
  };
  return w;
}

double BumpFunction::operator()(const Vec& x) const {
  const Vec d = x - center;
  const double u = d.norm2() / (radius * radius);
  if (u >= 1.0) return 0.0;
  return amplitude * std::exp(-u / (1.0 - u));
}

Vec BumpFunction::gradient(const Vec& x) const {
  const Vec d = x - center;
  const double u = d.norm2() / (radius * radius);
  if (u >= 1.0) return Vec::zero(n);
  const double a = amplitude * std::exp(-u / (1.0 - u));
  const double s = -2.0 * a / (radius * radius * (1.0 - u) * (1.0 - u));
  return d * s;
}

double BumpFunction::max_gradient_norm() const {
  // |grad a| is radial; scan the 1D profile.
  double best = 0.0;
  const int m = 20000;
  for (int i = 1; i < m; ++i) {
    const double r = static_cast<double>(i) / m;
    const double u = r * r;
    const double a = std::exp(-u / (1.0 - u));
    best = std::max(best, 2.0 * r * a / ((1.0 - u) * (1.0 - u)));
  }
  return best * std::abs(amplitude) / radius;
}

DefiningFunction make_euclidean(int n) {
  if (n != 2 && n != 3) throw ConfigError("euclidean family: dimension must be 2 or 3");
  DefiningFunction df;
  df.n = n;
  df.kind = DefiningKind::Euclidean;
  df.id = "euclidean";
  df.eval = [](const Vec& x, const Vec& th) { return x.dot(th); };
  df.grad_x = [](const Vec&, const Vec& th) { return th; };
  df.grad_theta = [](const Vec& x, const Vec&) { return x; };
  df.mixed_hessian = [n](const Vec&, const Vec&) { return Mat::identity(n); };
  return df;
}

DefiningFunction make_perturbed(const BumpFunction& a, double eps) {
  const double worst_det = 1.0 - std::abs(eps) * a.max_gradient_norm();
  if (!(worst_det > 0.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "perturbation eps=%g leaves the admissible class "
                  "(min mixed-Hessian determinant %g <= 0)",
                  eps, worst_det);
    throw ConfigError(buf);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "perturbed(eps=%g)", eps);
  BumpFunction bump = a;
  return make_additive(
      a.n, DefiningKind::Perturbed, buf,
      [bump, eps](const Vec& x) { return eps * bump(x); },
      [bump, eps](const Vec& x) { return bump.gradient(x) * eps; });
}

DefiningFunction make_folded(int n) {
  // c'(t) ramps from 0 down to exactly -1 over [a, a+w] (quintic step plus an
  // overshoot bump dipping to about -1.35), then holds -1. On the plateau
  // t + c(t) is constant, so every pair of points with x0 >= a+w in the same
  // row shares d_theta-phi at theta = e1 -- an exact injectivity collision for
  // the Bolker checker to find. The overshoot pushes |c'| past 1, flipping the
  // mixed-Hessian determinant sign and clipping the covector cone, so the
  // defining and surjectivity conditions fail as well. Joins are C^2.
  const double a = 0.125, w = 0.25, ov = 0.85;
  auto cprime = [=](double t) {
    if (t <= a) return 0.0;
    const double u = std::min((t - a) / w, 1.0);
    const double step = ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
    const double e = 1.0 - u;
    return -(step + ov * 16.0 * u * u * e * e);
  };
  auto cval = [=](double t) {
    if (t <= a) return 0.0;
    const double u = std::min((t - a) / w, 1.0);
    const double step_int = ((u - 3.0) * u + 2.5) * u * u * u * u;
    const double bump_int =
        16.0 * (u * u * u / 3.0 + u * u * u * u * (u / 5.0 - 0.5));
    const double ramp = -w * (step_int + ov * bump_int);
    return t >= a + w ? ramp - (t - (a + w)) : ramp;
  };
  auto c = [cval](const Vec& x) { return cval(x[0]); };
  auto grad_c = [cprime, n](const Vec& x) {
    Vec g = Vec::zero(n);
    g[0] = cprime(x[0]);
    return g;
  };
  return make_additive(n, DefiningKind::UserSupplied, "folded", c, grad_c);
}

BolkerReport check_defining(const DefiningFunction& df, const Box& box,
                            int n_x, int n_theta) {
  BolkerReport rep;
  rep.n_x = n_x;
  rep.n_theta = n_theta;
  rep.grid_spacing = (box.hi[0] - box.lo[0]) / (n_x - 1);

  const auto pts = node_grid(box, n_x);
  const auto dirs = sample_directions(df.n, n_theta);

  rep.homogeneity = {true, 0.0, pts[0], dirs[0].u};
  rep.gradient_nonzero = {true, std::numeric_limits<double>::infinity(), pts[0], dirs[0].u};
  rep.hessian_positive = {true, std::numeric_limits<double>::infinity(), pts[0], dirs[0].u};

  for (const auto& x : pts)
    for (const auto& th : dirs) {
      const double base = df.eval(x, th.u);
      for (double lam : {0.5, 2.0}) {
        const double scaled = df.eval(x, th.u * lam);
        const double defect =
            std::abs(scaled - lam * base) / std::max(std::abs(lam * base), 1e-6);
        if (defect > rep.homogeneity.worst)
          rep.homogeneity = {defect <= 1e-10, defect, x, th.u};
      }
      const double gnorm = df.grad_x(x, th.u).norm();
      if (gnorm < rep.gradient_nonzero.worst)
        rep.gradient_nonzero = {gnorm > 1e-12, gnorm, x, th.u};
      const double det = df.mixed_hessian(x, th.u).det();
      if (det < rep.hessian_positive.worst)
        rep.hessian_positive = {det > 0.0, det, x, th.u};
    }
  // re-derive ok flags in case the worst sample was the first one
  rep.homogeneity.ok = rep.homogeneity.worst <= 1e-10;
  rep.gradient_nonzero.ok = rep.gradient_nonzero.worst > 1e-12;
  rep.hessian_positive.ok = rep.hessian_positive.worst > 0.0;

  // spot-check closed-form derivatives against central differences
  rep.derivative_consistency = {true, 0.0, pts[0], dirs[0].u};
  const double h = 1e-4;
  const std::size_t total = pts.size() * dirs.size();
  const std::size_t stride = std::max<std::size_t>(1, total / 128);
  for (std::size_t k = 0; k < total; k += stride) {
    const Vec& x = pts[k / dirs.size()];
    const Vec& th = dirs[k % dirs.size()].u;
    double err = 0.0;
    const Vec gx = df.grad_x(x, th);
    const Vec gt = df.grad_theta(x, th);
    const Mat hess = df.mixed_hessian(x, th);
    for (int i = 0; i < df.n; ++i) {
      Vec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd_x = (df.eval(xp, th) - df.eval(xm, th)) / (2.0 * h);
      err = std::max(err, std::abs(fd_x - gx[i]) / (1.0 + std::abs(gx[i])));
      Vec tp = th, tm = th;
      tp[i] += h;
      tm[i] -= h;
      const double fd_t = (df.eval(x, tp) - df.eval(x, tm)) / (2.0 * h);
      err = std::max(err, std::abs(fd_t - gt[i]) / (1.0 + std::abs(gt[i])));
      const Vec gp = df.grad_x(x, tp);
      const Vec gm = df.grad_x(x, tm);
      for (int r = 0; r < df.n; ++r) {
        const double fd_h = (gp[r] - gm[r]) / (2.0 * h);
        err = std::max(err, std::abs(fd_h - hess(r, i)) / (1.0 + std::abs(hess(r, i))));
      }
    }
    if (err > rep.derivative_consistency.worst)
      rep.derivative_consistency = {err <= 1e-5, err, x, th};
  }
  rep.derivative_consistency.ok = rep.derivative_consistency.worst <= 1e-5;
  return rep;
}

BolkerReport check_bolker(const DefiningFunction& df, const Box& box,
                          int n_x, int n_theta, const Box* padded) {
  BolkerReport rep = check_defining(df, padded ? *padded : box, n_x, n_theta);

  const auto dirs = sample_directions(df.n, n_theta);
  const auto pts = node_grid(padded ? *padded : box, n_x);

  // injectivity: quantitative separation of x -> d_theta phi per direction
  double min_ratio2 = std::numeric_limits<double>::infinity();
  for (const auto& th : dirs) {
    std::vector<Vec> v;
    v.reserve(pts.size());
    for (const auto& x : pts) v.push_back(df.grad_theta(x, th.u));
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double num = (v[i] - v[j]).norm2();
        const double den = (pts[i] - pts[j]).norm2();
        const double r2 = num / den;
        if (r2 < min_ratio2) {
          min_ratio2 = r2;
          rep.witness_x1 = pts[i];
          rep.witness_x2 = pts[j];
          rep.witness_theta = th.u;
          rep.witness_gap = std::sqrt(num);
        }
      }
  }
  rep.injectivity_margin = std::sqrt(min_ratio2);
  rep.injectivity_ok = rep.injectivity_margin > kInjectivityThreshold;

  // surjectivity: covector covering gap per point
  rep.surjectivity_threshold = 2.0 * direction_spacing(df.n, n_theta);
  const auto probes = df.n == 3 ? sample_directions(3, 4 * n_theta)
                                : std::vector<Direction>{};
  double worst = 0.0;
  for (const auto& x : node_grid(box, n_x))
    worst = std::max(worst, covector_gap(df, x, dirs, probes));
  rep.surjectivity_worst_gap = worst;
  rep.surjectivity_worst_gap_padded = worst;
  if (padded) {
    double worst_pad = 0.0;
    for (const auto& x : pts)
      worst_pad = std::max(worst_pad, covector_gap(df, x, dirs, probes));
    rep.surjectivity_worst_gap_padded = worst_pad;
  }
  rep.surjectivity_ok = rep.surjectivity_worst_gap <= rep.surjectivity_threshold;
  return rep;
}

}  // namespace gradon
