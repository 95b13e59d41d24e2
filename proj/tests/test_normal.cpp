#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "gradon/normal.hpp"

using namespace gradon;

namespace {

BumpFunction test_bump(int n = 2) {
  BumpFunction a;
  a.n = n;
  a.center = Vec::zero(n);
  a.center[0] = 0.15;
  a.radius = 0.5;
  a.amplitude = 1.0;
  return a;
}

ScalarField random_masked_field(const GridLayout& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f = ScalarField::zeros(g);
  for (auto& v : f.values) v = d(rng);
  mask_to_box(f, 1.0);
  return f;
}

}  // namespace

TEST_CASE("symbol values for the euclidean family") {
  PrincipalSymbol p1{make_euclidean(2), make_constant_weight(2)};
  const Vec x = Vec::of(0.3, -0.2);
  CHECK(p1(x, Vec::of(1.0, 0.0)) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
  CHECK(p1(x, Vec::of(0.0, 2.0)) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-12));

  PrincipalSymbol p2{make_euclidean(2), make_constant_weight(2, 2.0)};
  CHECK(p2(x, Vec::of(1.0, 0.0)) == doctest::Approx(4.0 / kPi).epsilon(1e-12));

  PrincipalSymbol p3{make_euclidean(3), make_constant_weight(3)};
  // front factor (2 pi)^{1-n} with both hemisphere contributions
  CHECK(p3(Vec::zero(3), Vec::of(0.0, 0.0, 1.0)) ==
        doctest::Approx(2.0 / (4.0 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("covector identification solves to round-off") {
  {
    PrincipalSymbol sym{make_euclidean(2), make_constant_weight(2)};
    const Vec xi = Vec::of(std::cos(1.1), std::sin(1.1));
    const Vec th = sym.resolve_theta(Vec::of(0.2, 0.4), xi);
    CHECK((th - xi).norm() <= 1e-12);
  }
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-0.4, 0.4);
  for (int n : {2, 3}) {
    auto df = make_perturbed(test_bump(n), 0.04);
    PrincipalSymbol sym{df, make_constant_weight(n)};
    for (int t = 0; t < 25; ++t) {
      Vec x = Vec::zero(n);
      for (int i = 0; i < n; ++i) x[i] = d(rng);
      Vec xi = Vec::zero(n);
      std::normal_distribution<double> nd;
      for (int i = 0; i < n; ++i) xi[i] = nd(rng);
      xi = xi.normalized();
      const Vec th = sym.resolve_theta(x, xi);
      CHECK(std::abs(th.norm() - 1.0) <= 1e-12);
      const Vec cov = df.grad_x(x, th).normalized();
      CHECK((cov - xi).norm() <= 1e-10);
    }
  }
}

TEST_CASE("symbol homogeneity, evenness and ellipticity at random samples") {
  auto df = make_perturbed(test_bump(), 0.04);
  auto w = make_gaussian_modulated_weight(2, 1.0, 0.5, 0.6, Vec::zero(2));
  PrincipalSymbol sym{df, w};
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> dx(-0.8, 0.8);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> dl(0.3, 5.0);
  for (int t = 0; t < 100; ++t) {
    const Vec x = Vec::of(dx(rng), dx(rng));
    Vec xi = Vec::of(nd(rng), nd(rng));
    if (xi.norm() < 1e-3) continue;
    const double lam = dl(rng);
    const double base = sym(x, xi);
    CHECK(base > 0.0);
    CHECK(sym(x, xi * lam) == doctest::Approx(base / lam).epsilon(1e-9));
    CHECK(sym(x, -xi) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("dense assembly matches the matrix-free normal map") {
  auto df = make_perturbed(test_bump(), 0.03);
  auto w = make_gaussian_modulated_weight(2, 1.0, 0.4, 0.7, Vec::zero(2));
  GridLayout grid = GridLayout::centered(2, 1.25, 20);
  RadonSystem sys(df, w, grid, 48);
  DenseNormal dn = assemble_dense(sys);

  CHECK(dn.symmetry_defect() <= 1e-13);

  auto f = random_masked_field(grid, 91);
  ScalarField via_matrix = dn.apply(f);
  ScalarField via_op = sys.normal(f);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    num += (via_matrix.values[i] - via_op.values[i]) *
           (via_matrix.values[i] - via_op.values[i]);
    den += via_op.values[i] * via_op.values[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-10);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dn.matrix);
  const double top = eig.eigenvalues().maxCoeff();
  CHECK(eig.eigenvalues().minCoeff() >= -1e-13 * top);

  // restricted to cells inside the inner box, the map is strictly positive
  auto inside = masked_indices(grid, 1.0);
  Eigen::MatrixXd sub(inside.size(), inside.size());
  for (std::size_t r = 0; r < inside.size(); ++r)
    for (std::size_t c = 0; c < inside.size(); ++c)
      sub(r, c) = dn.matrix(static_cast<Eigen::Index>(inside[r]),
                            static_cast<Eigen::Index>(inside[c]));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_sub(sub);
  CHECK(eig_sub.eigenvalues().minCoeff() > 1e-8 * top);
}

TEST_CASE("normal map is self-adjoint and nonnegative in the field inner product") {
  auto df = make_perturbed(test_bump(), 0.03);
  auto w = make_gaussian_modulated_weight(2, 1.0, 0.4, 0.7, Vec::zero(2));
  GridLayout grid = GridLayout::centered(2, 1.25, 32);
  RadonSystem sys(df, w, grid, 40);
  auto f = random_masked_field(grid, 7);
  auto g = random_masked_field(grid, 8);
  const double a = field_inner(sys.normal(f), g);
  const double b = field_inner(f, sys.normal(g));
  CHECK(std::abs(a - b) <= 1e-12 * field_norm(f) * field_norm(g));
  CHECK(field_inner(sys.normal(f), f) >= -1e-12 * field_inner(f, f));
}

TEST_CASE("euclidean normal map reproduces the 2/|x| convolution") {
  GridLayout grid = GridLayout::centered(2, 1.25, 64);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 180);
  ScalarField f = ScalarField::zeros(grid, DomainTag::FieldOnM);
  const double s2 = 0.25 * 0.25;
  for (std::size_t i = 0; i < grid.size(); ++i)
    f.values[i] = std::exp(-grid.point(i).norm2() / (2.0 * s2));

  ScalarField got = sys.normal(f);

  // direct convolution oracle; the singular cell uses the exact integral
  // of 1/r over a square, 4h asinh(1)
  const double self_coeff = 2.0 * 4.0 * grid.h * std::asinh(1.0);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.point(i);
    if (std::abs(x[0]) > 0.9 || std::abs(x[1]) > 0.9) continue;
    double conv = self_coeff * f.values[i];
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (j == i) continue;
      conv += 2.0 / (x - grid.point(j)).norm() * f.values[j] * grid.cell_volume();
    }
    num += (got.values[i] - conv) * (got.values[i] - conv);
    den += conv * conv;
  }
  CHECK(std::sqrt(num / den) <= 0.05);
}

TEST_CASE("dense entries decay monotonically away from the diagonal") {
  GridLayout grid = GridLayout::centered(2, 1.25, 16);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 48);
  DenseNormal dn = assemble_dense(sys);

  const int max_bin = 20;
  std::vector<double> envelope(max_bin, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double r = (grid.point(i) - grid.point(j)).norm();
      const int b = static_cast<int>(r / grid.h);
      if (b < max_bin)
        envelope[b] = std::max(envelope[b],
                               std::abs(dn.matrix(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j))));
    }
  for (int b = 4; b + 1 < max_bin; ++b) {
    CHECK(envelope[b + 1] <= envelope[b] * 1.02);
  }
}

TEST_CASE("dense assembly refuses oversized grids") {
  GridLayout grid = GridLayout::centered(2, 1.25, 32);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 24);
  CHECK_THROWS_AS(assemble_dense(sys), ConfigError);
}

TEST_CASE("oscillatory probe recovers the euclidean symbol after the kernel transfer") {
  GridLayout grid = GridLayout::centered(2, 1.25, 128);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 240);
  const Vec x0 = Vec::zero(2);
  const Vec xi = Vec::of(std::cos(0.4), std::sin(0.4));
  // below lambda ~ 5 / window_radius the packet is too wide in frequency for
  // an unbiased quotient, so probe the clean range
  auto probe = probe_symbol(sys, x0, xi, {24.0, 32.0, 48.0}, 0.2);

  for (double r : probe.ratio_corrected) CHECK(r == doctest::Approx(1.0).epsilon(0.1));
  CHECK(probe.exponent_corrected == doctest::Approx(-1.0).epsilon(0.15));
  // raw amplitudes sit below the corrected ones by the sinc^4 factor
  for (std::size_t i = 0; i < probe.lambdas.size(); ++i)
    CHECK(probe.measured[i] <= probe.measured_corrected[i] + 1e-15);

  write_probe_csv("tmp_probe.csv", probe);
  std::ifstream in("tmp_probe.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "lambda,measured,ratio,transfer,measured_corrected,ratio_corrected");
  in.close();
  std::remove("tmp_probe.csv");
}

TEST_CASE("probe tracks the symbol for a perturbed family with varying weight") {
  GridLayout grid = GridLayout::centered(2, 1.25, 128);
  auto df = make_perturbed(test_bump(), 0.02);
  auto w = make_gaussian_modulated_weight(2, 1.0, 0.5, 0.8, Vec::zero(2));
  RadonSystem sys(df, w, grid, 240);
  const Vec x0 = Vec::of(-0.25, 0.2);
  const Vec xi = Vec::of(std::cos(1.9), std::sin(1.9));
  auto probe = probe_symbol(sys, x0, xi, {32.0, 48.0}, 0.2);
  for (double r : probe.ratio_corrected) CHECK(r == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("probe rejects lambdas beyond the grid Nyquist bound") {
  GridLayout grid = GridLayout::centered(2, 1.25, 32);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 24);
  const double bad = kPi / (2.0 * grid.h) * 1.1;
  CHECK_THROWS_AS(probe_symbol(sys, Vec::zero(2), Vec::of(1.0, 0.0), {bad}, 0.2),
                  ConfigError);
}
