#include "gradon/phantoms.hpp"

#include <cmath>
#include <functional>

#include "gradon/parallel.hpp"

namespace gradon {

namespace {

// Cell-average rasterization: each cell takes the mean of `sub`^n point
// evaluations on a centered sub-lattice. For indicator-type inputs this is
// the coverage fraction; piecewise-constant phantoms keep their range.
ScalarField rasterize(const GridLayout& g, int sub,
                      const std::function<double(const Vec&)>& f) {
  ScalarField out = ScalarField::zeros(g, DomainTag::FieldOnM);
  const double step = g.h / sub;
  const int sub_k = g.n == 3 ? sub : 1;
  const double inv = 1.0 / (static_cast<double>(sub) * sub * sub_k);
  parallel_for(0, g.size(), [&](std::size_t idx) {
    const Vec c = g.point(idx);
    Vec lo = c;
    for (int a = 0; a < g.n; ++a) lo[a] -= 0.5 * (g.h - step);
    double acc = 0.0;
    for (int i = 0; i < sub; ++i)
      for (int j = 0; j < sub; ++j)
        for (int k = 0; k < sub_k; ++k) {
          Vec p = lo;
          p[0] += i * step;
          p[1] += j * step;
          if (g.n == 3) p[2] += k * step;
          acc += f(p);
        }
    out.values[idx] = acc * inv;
  });
  return out;
}

void require_dim(const GridLayout& g, int n, const char* name) {
  if (g.n != n)
    throw ConfigError(std::string("phantom '") + name + "' needs dimension " +
                      std::to_string(n));
}

// a, b: semi-axes; cx, cy: center; phi: rotation in degrees
// (counterclockwise); value: additive gray level.
struct Ellipse {
  double a, b, cx, cy, phi, value;
};

// High-contrast head phantom table; values of the summed phantom stay in
// [0, 1].
constexpr Ellipse kHeadTable[10] = {
    {0.69, 0.92, 0.0, 0.0, 0.0, 1.0},
    {0.6624, 0.874, 0.0, -0.0184, 0.0, -0.8},
    {0.11, 0.31, 0.22, 0.0, -18.0, -0.2},
    {0.16, 0.41, -0.22, 0.0, 18.0, -0.2},
    {0.21, 0.25, 0.0, 0.35, 0.0, 0.1},
    {0.046, 0.046, 0.0, 0.1, 0.0, 0.1},
    {0.046, 0.046, 0.0, -0.1, 0.0, 0.1},
    {0.046, 0.023, -0.08, -0.605, 0.0, 0.1},
    {0.023, 0.023, 0.0, -0.606, 0.0, 0.1},
    {0.023, 0.046, 0.06, -0.605, 0.0, 0.1},
};

double head_value(double x, double y) {
  double v = 0.0;
  for (const Ellipse& e : kHeadTable) {
    const double t = e.phi * kPi / 180.0;
    const double ct = std::cos(t), st = std::sin(t);
    const double dx = x - e.cx, dy = y - e.cy;
    const double xr = ct * dx + st * dy;
    const double yr = -st * dx + ct * dy;
    if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) v += e.value;
  }
  return v;
}

}  // namespace

ScalarField make_disk_phantom(const GridLayout& g, const Vec& center,
                              double radius) {
  require_dim(g, 2, "disk");
  if (!(radius > 0.0)) throw ConfigError("disk phantom needs a positive radius");
  const double r2 = radius * radius;
  return rasterize(g, 8, [&](const Vec& p) {
    return (p - center).norm2() <= r2 ? 1.0 : 0.0;
  });
}

ScalarField make_ball_phantom(const GridLayout& g, const Vec& center,
                              double radius) {
  require_dim(g, 3, "ball");
  if (!(radius > 0.0)) throw ConfigError("ball phantom needs a positive radius");
  const double r2 = radius * radius;
  return rasterize(g, 4, [&](const Vec& p) {
    return (p - center).norm2() <= r2 ? 1.0 : 0.0;
  });
}

ScalarField make_gaussian_phantom(const GridLayout& g, const Vec& center,
                                  double sigma) {
  if (!(sigma > 0.0))
    throw ConfigError("gaussian phantom needs a positive sigma");
  ScalarField out = ScalarField::zeros(g, DomainTag::FieldOnM);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  parallel_for(0, g.size(), [&](std::size_t idx) {
    out.values[idx] = std::exp(-(g.point(idx) - center).norm2() * inv);
  });
  return out;
}

ScalarField make_shepp_logan_phantom(const GridLayout& g) {
  require_dim(g, 2, "shepp-logan");
  return rasterize(g, 8, [](const Vec& p) { return head_value(p[0], p[1]); });
}

ScalarField make_phantom(const std::string& name, const GridLayout& g,
                         const Vec& center, double radius, double sigma) {
  if (name == "disk") return make_disk_phantom(g, center, radius);
  if (name == "ball") return make_ball_phantom(g, center, radius);
  if (name == "gaussian") return make_gaussian_phantom(g, center, sigma);
  if (name == "shepp-logan") return make_shepp_logan_phantom(g);
  throw ConfigError("unknown phantom '" + name +
                    "' (expected disk, gaussian, shepp-logan or ball)");
}

}  // namespace gradon
