#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "gradon/io.hpp"
#include "gradon/transform.hpp"

using namespace gradon;

namespace {

ScalarField disk_field(const GridLayout& g, double radius) {
  ScalarField f = ScalarField::zeros(g, DomainTag::FieldOnM);
  for (std::size_t i = 0; i < g.size(); ++i)
    f.values[i] = g.point(i).norm() < radius ? 1.0 : 0.0;
  return f;
}

ScalarField random_field(const GridLayout& g, unsigned seed, double support_hw) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ScalarField f = ScalarField::zeros(g);
  for (auto& v : f.values) v = d(rng);
  mask_to_box(f, support_hw);
  return f;
}

Sinogram random_sinogram(const SinogramLayout& l, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Sinogram g = Sinogram::zeros(l);
  for (auto& v : g.values) v = d(rng);
  return g;
}

double chord(double s) { return std::abs(s) < 1.0 ? 2.0 * std::sqrt(1.0 - s * s) : 0.0; }

/// Relative L2 error of the disk sinogram against the chord-length law.
double disk_error(int cells, int n_theta) {
  GridLayout grid = GridLayout::centered(2, 1.25, cells);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, n_theta);
  Sinogram g = sys.forward(disk_field(grid, 1.0));
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g.layout.n_s; ++j) {
    const double exact = chord(g.layout.s(j));
    for (int k = 0; k < g.layout.n_theta(); ++k) {
      const double d = g.at(j, k) - exact;
      num += d * d;
      den += exact * exact;
    }
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("jacobian values for the builtin families") {
  auto eu = make_euclidean(2);
  CHECK(jacobian(eu, Vec::of(0.3, -0.7), Vec::of(0.0, 1.0)) == doctest::Approx(1.0));
  CHECK(jacobian(eu, Vec::of(0.3, -0.7), Vec::of(0.0, 2.0)) == doctest::Approx(2.0));

  BumpFunction a;
  a.n = 2;
  a.center = Vec::zero(2);
  a.radius = 0.5;
  a.amplitude = 1.0;
  const double eps = 0.05;
  auto df = make_perturbed(a, eps);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-0.45, 0.45);
  for (int t = 0; t < 20; ++t) {
    Vec x = Vec::of(d(rng), d(rng));
    const double ang = d(rng) * 6.0;
    Vec th = Vec::of(std::cos(ang), std::sin(ang));
    Vec grad = th + a.gradient(x) * eps;
    CHECK(jacobian(df, x, th) == doctest::Approx(grad.norm()).epsilon(1e-12));
  }

  DefiningFunction degenerate = make_euclidean(2);
  degenerate.grad_x = [](const Vec&, const Vec&) { return Vec::zero(2); };
  CHECK_THROWS_AS(jacobian(degenerate, Vec::zero(2), Vec::of(1.0, 0.0)), NumericalError);
}

TEST_CASE("disk sinogram matches the chord-length law") {
  GridLayout grid = GridLayout::centered(2, 1.25, 128);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 90);
  Sinogram g = sys.forward(disk_field(grid, 1.0));

  auto value_at = [&](double s) {
    const int j = static_cast<int>(std::lround((s - g.layout.s0) / g.layout.ds));
    return g.at(j, 17);
  };
  CHECK(value_at(0.0) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(value_at(0.6) == doctest::Approx(1.6).epsilon(0.02));
  CHECK(std::abs(value_at(1.5)) <= 1e-9);

  CHECK(disk_error(128, 90) <= 0.025);

  // error contracts under joint (h, eta) refinement
  const double e64 = disk_error(64, 90);
  const double e128 = disk_error(128, 90);
  const double order = std::log2(e64 / e128);
  INFO("e64=", e64, " e128=", e128);
  CHECK(order >= 0.8);
}

TEST_CASE("chord law cross-checked by dense quadrature along the line") {
  // line {x . theta = s}, parameterized x = s theta + t theta_perp
  for (double s : {0.0, 0.3, 0.82}) {
    const double ang = 0.37;
    const Vec th = Vec::of(std::cos(ang), std::sin(ang));
    const Vec perp = Vec::of(-th[1], th[0]);
    const int m = 200000;
    const double t_max = 1.5;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
      const double t = -t_max + (i + 0.5) * (2.0 * t_max / m);
      const Vec x = th * s + perp * t;
      if (x.norm() < 1.0) sum += 2.0 * t_max / m;
    }
    CHECK(sum == doctest::Approx(chord(s)).epsilon(1e-4));
  }
}

TEST_CASE("forward is linear") {
  GridLayout grid = GridLayout::centered(2, 1.25, 32);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 24);
  auto f1 = random_field(grid, 1, 1.0);
  auto f2 = random_field(grid, 2, 1.0);
  ScalarField combo = ScalarField::zeros(grid);
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = 2.0 * f1.values[i] + f2.values[i];

  Sinogram ga = sys.forward(combo);
  Sinogram g1 = sys.forward(f1);
  Sinogram g2 = sys.forward(f2);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < ga.values.size(); ++i) {
    worst = std::max(worst, std::abs(ga.values[i] - 2.0 * g1.values[i] - g2.values[i]));
    scale = std::max(scale, std::abs(ga.values[i]));
  }
  CHECK(worst <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("forward conserves weighted mass per direction") {
  BumpFunction a;
  a.n = 2;
  a.center = Vec::of(0.2, -0.1);
  a.radius = 0.5;
  a.amplitude = 1.0;
  auto df = make_perturbed(a, 0.03);
  auto w = make_gaussian_modulated_weight(2, 1.0, 0.7, 0.6, Vec::zero(2));
  GridLayout grid = GridLayout::centered(2, 1.25, 33);
  RadonSystem sys(df, w, grid, 16);

  auto f = random_field(grid, 3, 1.0);
  Sinogram g = sys.forward(f);
  for (int k = 0; k < g.layout.n_theta(); ++k) {
    const Vec& th = g.layout.thetas[k].u;
    double expected = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec x = grid.point(i);
      expected += f.values[i] * w.eval(x, th) * jacobian(df, x, th) * grid.cell_volume();
    }
    double got = 0.0;
    for (int j = 0; j < g.layout.n_s; ++j) got += g.at(j, k) * g.layout.ds;
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("exact transpose passes the dot test to round-off") {
  BumpFunction a;
  a.n = 2;
  a.center = Vec::zero(2);
  a.radius = 0.5;
  a.amplitude = 1.0;
  struct Case {
    DefiningFunction df;
    Weight w;
  };
  std::vector<Case> cases;
  cases.push_back({make_euclidean(2), make_constant_weight(2)});
  cases.push_back({make_perturbed(a, 0.03),
                   make_gaussian_modulated_weight(2, 1.0, 0.5, 0.4, Vec::zero(2))});
  for (auto& c : cases) {
    GridLayout grid = GridLayout::centered(2, 1.25, 32);
    RadonSystem sys(c.df, c.w, grid, 48);
    auto f = random_field(grid, 5, 1.0);
    auto g = random_sinogram(sys.layout(), 6);
    const double lhs = sino_inner(sys.forward(f), g);
    const double rhs = field_inner(f, sys.adjoint_transpose(g));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * field_norm(f) * sino_norm(g));
  }
}

TEST_CASE("backprojection of a constant recovers the sphere measure") {
  {
    GridLayout grid = GridLayout::centered(2, 1.0, 24);
    RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 36);
    Sinogram ones = Sinogram::zeros(sys.layout());
    for (auto& v : ones.values) v = 1.0;
    ScalarField b = sys.adjoint(ones);
    for (double v : b.values) CHECK(std::abs(v - 2.0 * kPi) <= 1e-10);
  }
  {
    GridLayout grid = GridLayout::centered(3, 1.0, 12);
    RadonSystem sys(make_euclidean(3), make_constant_weight(3), grid, 64);
    Sinogram ones = Sinogram::zeros(sys.layout());
    for (auto& v : ones.values) v = 1.0;
    ScalarField b = sys.adjoint(ones);
    for (double v : b.values) CHECK(std::abs(v - 4.0 * kPi) <= 1e-10);
  }
}

TEST_CASE("continuous adjoint stays close to the exact transpose") {
  GridLayout grid = GridLayout::centered(2, 1.25, 64);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 90);
  ScalarField f = ScalarField::zeros(grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    f.values[i] = std::exp(-grid.point(i).norm2() / (2.0 * 0.3 * 0.3));
  Sinogram g = sys.forward(f);
  ScalarField bp = sys.adjoint(g);
  ScalarField bt = sys.adjoint_transpose(g);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    diff += (bp.values[i] - bt.values[i]) * (bp.values[i] - bt.values[i]);
    scale += bt.values[i] * bt.values[i];
  }
  CHECK(std::sqrt(diff / scale) <= 0.05);

  // and the continuous-adjoint dot test holds at moderate accuracy
  auto fr = random_field(grid, 7, 1.0);
  auto gr = random_sinogram(sys.layout(), 8);
  const double lhs = sino_inner(sys.forward(fr), gr);
  const double rhs = field_inner(fr, sys.adjoint(gr));
  CHECK(std::abs(lhs - rhs) <= 5e-2 * field_norm(fr) * sino_norm(gr));
}

TEST_CASE("level sets are invariant under joint (s, theta) rescaling") {
  auto df = make_folded(2);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(-1.2, 1.2);
  for (int t = 0; t < 100; ++t) {
    Vec x = Vec::of(d(rng), d(rng));
    const double ang = d(rng);
    Vec th = Vec::of(std::cos(ang), std::sin(ang));
    const double s = df.eval(x, th);
    // x lies on the s level set for theta iff it lies on the 2s level set
    // for 2 theta
    CHECK(df.eval(x, th * 2.0) == doctest::Approx(2.0 * s).epsilon(1e-12));
  }
}

TEST_CASE("n=3 plane sections of the ball match the disk-area law") {
  GridLayout grid = GridLayout::centered(3, 1.0, 40);
  RadonSystem sys(make_euclidean(3), make_constant_weight(3), grid, 48);
  ScalarField ball = ScalarField::zeros(grid, DomainTag::FieldOnM);
  const double r = 0.8;
  for (std::size_t i = 0; i < grid.size(); ++i)
    ball.values[i] = grid.point(i).norm() < r ? 1.0 : 0.0;
  Sinogram g = sys.forward(ball);
  const int j0 = static_cast<int>(std::lround((0.0 - g.layout.s0) / g.layout.ds));
  for (int k : {0, 17, 31}) {
    CHECK(g.at(j0, k) == doctest::Approx(kPi * r * r).epsilon(0.05));
  }
}

TEST_CASE("narrow s range is rejected, not truncated silently") {
  GridLayout grid = GridLayout::centered(2, 1.25, 64);
  auto df = make_euclidean(2);
  auto w = make_constant_weight(2);
  SinogramLayout narrow = make_sinogram_layout(df, grid, 30);
  narrow.s0 = -0.2;
  narrow.n_s = 11;
  RadonSystem sys(df, w, grid, narrow);
  CHECK_THROWS_AS(sys.forward(disk_field(grid, 1.0)), NumericalError);

  Sinogram ones = Sinogram::zeros(narrow);
  for (auto& v : ones.values) v = 1.0;
  CHECK_THROWS_AS(sys.adjoint(ones), NumericalError);
}

TEST_CASE("layout mismatches are configuration errors") {
  GridLayout grid = GridLayout::centered(2, 1.25, 32);
  GridLayout other = GridLayout::centered(2, 1.25, 16);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 24);
  CHECK_THROWS_AS(sys.forward(ScalarField::zeros(other)), ConfigError);
  RadonSystem sys2(make_euclidean(2), make_constant_weight(2), other, 24);
  CHECK_THROWS_AS(sys.adjoint(Sinogram::zeros(sys2.layout())), ConfigError);
  CHECK_THROWS_AS(sys.adjoint_transpose(Sinogram::zeros(sys2.layout())), ConfigError);
}

TEST_CASE("zero inputs give zero outputs") {
  GridLayout grid = GridLayout::centered(2, 1.25, 32);
  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 24);
  Sinogram g = sys.forward(ScalarField::zeros(grid));
  for (double v : g.values) CHECK(v == 0.0);
  ScalarField f = sys.adjoint_transpose(Sinogram::zeros(sys.layout()));
  for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("field and sinogram files round-trip bit-exactly") {
  GridLayout grid = GridLayout::centered(2, 1.25, 17);
  auto f = random_field(grid, 21, 1.25);
  write_field("tmp_roundtrip.grtf", f);
  ScalarField f2 = read_field("tmp_roundtrip.grtf");
  REQUIRE(f2.grid == f.grid);
  REQUIRE(f2.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(f2.values[i] == f.values[i]);

  RadonSystem sys(make_euclidean(2), make_constant_weight(2), grid, 12);
  Sinogram g = sys.forward(disk_field(grid, 1.0));
  write_sinogram("tmp_roundtrip.grts", g);
  Sinogram g2 = read_sinogram("tmp_roundtrip.grts");
  REQUIRE(g2.layout.same_shape(g.layout));
  for (std::size_t i = 0; i < g.values.size(); ++i) CHECK(g2.values[i] == g.values[i]);

  std::remove("tmp_roundtrip.grtf");
  std::remove("tmp_roundtrip.grts");
}

TEST_CASE("csv mirrors are written with full precision") {
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(2.0) == "2");
  GridLayout grid = GridLayout::centered(2, 1.0, 4);
  ScalarField f = ScalarField::zeros(grid);
  f.values[5] = 1.0 / 3.0;
  write_field_csv("tmp_field.csv", f);
  std::ifstream in("tmp_field.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "x0,x1,value");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 16);
  in.close();
  std::remove("tmp_field.csv");
}
