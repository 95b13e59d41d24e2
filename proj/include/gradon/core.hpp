#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradon {

inline constexpr double kPi = 3.14159265358979323846;

/// Invalid inputs, layouts or configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure at runtime: stagnation, range clipping, condition
/// violations detected mid-computation (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point or direction in R^n, n in {2, 3}. Fixed capacity, runtime dimension.
struct Vec {
  int n = 2;
  std::array<double, 3> v{0.0, 0.0, 0.0};

  static Vec zero(int dim) {
    Vec r;
    r.n = dim;
    return r;
  }
  static Vec of(double x, double y) { return Vec{2, {x, y, 0.0}}; }
  static Vec of(double x, double y, double z) { return Vec{3, {x, y, z}}; }

  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n; ++i) v[i] -= o.v[i];
    return *this;
  }
  Vec& operator*=(double c) {
    for (int i = 0; i < n; ++i) v[i] *= c;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double c, Vec a) { return a *= c; }
  friend Vec operator*(Vec a, double c) { return a *= c; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  double dot(const Vec& o) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += v[i] * o.v[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  Vec normalized() const {
    const double m = norm();
    Vec r = *this;
    if (m > 0.0) r *= 1.0 / m;
    return r;
  }
};

/// Small dense n x n matrix, row major.
struct Mat {
  int n = 2;
  std::array<double, 9> a{};

  static Mat zero(int dim) {
    Mat m;
    m.n = dim;
    return m;
  }
  static Mat identity(int dim) {
    Mat m = zero(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }

  Vec apply(const Vec& x) const {
    Vec r = Vec::zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i] += (*this)(i, j) * x[j];
    return r;
  }

  double det() const {
    if (n == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
    const Mat& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
};

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, strictly increasing between.
inline double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Ordinary least-squares line fit y ~ intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double sse = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gradon
