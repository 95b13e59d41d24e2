#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "gradon/geometry.hpp"

using namespace gradon;

namespace {

Vec random_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec x = Vec::zero(n);
  for (int i = 0; i < n; ++i) x[i] = d(rng);
  return x;
}

Vec random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vec u = Vec::zero(n);
  do {
    for (int i = 0; i < n; ++i) u[i] = d(rng);
  } while (u.norm() < 1e-6);
  return u.normalized();
}

BumpFunction test_bump() {
  BumpFunction a;
  a.n = 2;
  a.center = Vec::zero(2);
  a.radius = 0.5;
  a.amplitude = 1.0;
  return a;
}

}  // namespace

TEST_CASE("least-squares line fit recovers exact lines") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.5, 7.0};
  std::vector<double> y;
  for (double t : x) y.push_back(3.0 * t - 1.0);
  auto fit = linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("direction samples are unit vectors with matching quadrature") {
  for (int count : {8, 64}) {
    auto dirs = sample_directions(2, count);
    REQUIRE(dirs.size() == static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
      CHECK(std::abs(dirs[j].u.norm() - 1.0) <= 1e-12);
      CHECK(dirs[j].angle() == doctest::Approx(2.0 * kPi * j / count).epsilon(1e-12));
    }
    CHECK(direction_quadrature_weight(2, count) * count ==
          doctest::Approx(2.0 * kPi));
  }

  auto sphere = sample_directions(3, 200);
  for (const auto& d : sphere) CHECK(std::abs(d.u.norm() - 1.0) <= 1e-12);
  CHECK(direction_quadrature_weight(3, 200) * 200 == doctest::Approx(4.0 * kPi));
  // covering radius of the sphere sample stays below the nominal spacing
  auto probes = sample_directions(3, 977);
  double worst = 0.0;
  for (const auto& p : probes) {
    double best = kPi;
    for (const auto& d : sphere)
      best = std::min(best, std::acos(std::clamp(p.u.dot(d.u), -1.0, 1.0)));
    worst = std::max(worst, best);
  }
  CHECK(worst <= direction_spacing(3, 200));
}

TEST_CASE("euclidean family: values and derivatives") {
  auto df = make_euclidean(2);
  Vec x = Vec::of(1.0, 2.0);
  Vec th = Vec::of(0.0, 1.0);
  CHECK(df.eval(x, th) == doctest::Approx(2.0).epsilon(1e-15));
  Vec gx = df.grad_x(x, th);
  CHECK(gx[0] == doctest::Approx(0.0));
  CHECK(gx[1] == doctest::Approx(1.0));
  Vec gt = df.grad_theta(x, th);
  CHECK(gt[0] == doctest::Approx(1.0));
  CHECK(gt[1] == doctest::Approx(2.0));
  CHECK(df.mixed_hessian(x, th).det() == doctest::Approx(1.0));
  CHECK(df.eval(x, Vec::of(0.0, 2.0)) == doctest::Approx(4.0));
  CHECK_THROWS_AS(make_euclidean(4), ConfigError);
}

TEST_CASE("degree-one homogeneity at random samples") {
  std::mt19937_64 rng(101);
  std::vector<DefiningFunction> dfs;
  dfs.push_back(make_euclidean(2));
  dfs.push_back(make_perturbed(test_bump(), 0.05));
  dfs.push_back(make_folded(2));
  for (const auto& df : dfs) {
    for (int trial = 0; trial < 200; ++trial) {
      Vec x = random_point(rng, 2, -1.25, 1.25);
      Vec th = random_unit(rng, 2);
      const double base = df.eval(x, th);
      for (double lam : {0.5, 1.0, 2.0, 7.0}) {
        const double scaled = df.eval(x, th * lam);
        CHECK(std::abs(scaled - lam * base) <=
              1e-10 * std::max(1.0, std::abs(lam * base)));
      }
    }
  }
}

TEST_CASE("closed-form derivatives match central differences at second order") {
  std::mt19937_64 rng(202);
  std::vector<DefiningFunction> dfs;
  dfs.push_back(make_perturbed(test_bump(), 0.05));
  dfs.push_back(make_folded(2));
  for (const auto& df : dfs) {
    // one frozen sample set, shared by both step sizes
    std::vector<std::pair<Vec, Vec>> samples;
    for (int trial = 0; trial < 50; ++trial) {
      Vec x = random_point(rng, 2, -0.45, 0.45);
      Vec th = random_unit(rng, 2);
      samples.emplace_back(x, th);
    }
    std::vector<double> rms;
    for (double h : {1e-2, 1e-3}) {
      double sq = 0.0;
      std::size_t count = 0;
      for (const auto& [x, th] : samples) {
        const Vec gx = df.grad_x(x, th);
        const Vec gt = df.grad_theta(x, th);
        const Mat hess = df.mixed_hessian(x, th);
        for (int i = 0; i < 2; ++i) {
          Vec xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          const double fdx = (df.eval(xp, th) - df.eval(xm, th)) / (2 * h);
          sq += (fdx - gx[i]) * (fdx - gx[i]);
          Vec tp = th, tm = th;
          tp[i] += h;
          tm[i] -= h;
          const double fdt = (df.eval(x, tp) - df.eval(x, tm)) / (2 * h);
          sq += (fdt - gt[i]) * (fdt - gt[i]);
          const Vec gp = df.grad_x(x, tp);
          const Vec gm = df.grad_x(x, tm);
          for (int r = 0; r < 2; ++r) {
            const double fdh = (gp[r] - gm[r]) / (2 * h);
            sq += (fdh - hess(r, i)) * (fdh - hess(r, i));
          }
          count += 4;
        }
      }
      rms.push_back(std::sqrt(sq / count));
    }
    const double order = std::log10(rms[0] / rms[1]);
    INFO("df=", df.id, " rms(h=1e-2)=", rms[0], " rms(h=1e-3)=", rms[1]);
    CHECK(order >= 1.9);
    CHECK(order <= 2.6);
  }
}

TEST_CASE("perturbed family: zero eps reproduces the euclidean family") {
  auto df0 = make_perturbed(test_bump(), 0.0);
  auto eu = make_euclidean(2);
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = random_point(rng, 2, -1.25, 1.25);
    Vec th = random_unit(rng, 2);
    CHECK(df0.eval(x, th) == doctest::Approx(eu.eval(x, th)).epsilon(1e-14));
    for (int i = 0; i < 2; ++i) {
      CHECK(df0.grad_x(x, th)[i] == doctest::Approx(eu.grad_x(x, th)[i]));
      CHECK(df0.grad_theta(x, th)[i] == doctest::Approx(eu.grad_theta(x, th)[i]));
    }
  }
}

TEST_CASE("perturbed family: determinant lower bound holds on samples") {
  auto a = test_bump();
  const double eps = 0.01;
  auto df = make_perturbed(a, eps);
  const double bound = 1.0 - eps * a.max_gradient_norm();
  REQUIRE(bound > 0.0);
  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x = random_point(rng, 2, -1.0, 1.0);
    Vec th = random_unit(rng, 2);
    CHECK(df.mixed_hessian(x, th).det() >= bound - 1e-12);
  }
}

TEST_CASE("perturbed family: oversized eps is rejected") {
  auto a = test_bump();
  const double eps_star = 1.0 / a.max_gradient_norm();
  CHECK_THROWS_AS(make_perturbed(a, 1.05 * eps_star), ConfigError);
  CHECK_NOTHROW(make_perturbed(a, 0.95 * eps_star));
}

TEST_CASE("bolker checker: euclidean all-pass at several resolutions") {
  auto df = make_euclidean(2);
  Box m = Box::centered(2, 1.0);
  Box m1 = Box::centered(2, 1.25);
  for (auto [nx, nth] : std::vector<std::pair<int, int>>{{8, 8}, {9, 12}, {16, 32}}) {
    auto rep = check_bolker(df, m, nx, nth, &m1);
    CHECK(rep.defining_ok());
    CHECK(rep.injectivity_ok);
    CHECK(rep.surjectivity_ok);
    CHECK(rep.injectivity_margin == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.hessian_positive.worst == doctest::Approx(1.0));
    CHECK(rep.derivative_consistency.ok);
  }
}

TEST_CASE("bolker checker: small perturbation passes with margins") {
  auto df = make_perturbed(test_bump(), 0.01);
  Box m = Box::centered(2, 1.0);
  Box m1 = Box::centered(2, 1.25);
  auto rep = check_bolker(df, m, 33, 64, &m1);
  CHECK(rep.defining_ok());
  CHECK(rep.injectivity_ok);
  CHECK(rep.injectivity_margin > 0.9);
  CHECK(rep.surjectivity_ok);
  CHECK(rep.surjectivity_worst_gap_padded <= rep.surjectivity_threshold);
}

TEST_CASE("bolker checker: folded fixture fails injectivity with a verified witness") {
  auto df = make_folded(2);
  Box m = Box::centered(2, 1.0);
  Box m1 = Box::centered(2, 1.25);
  auto rep = check_bolker(df, m, 33, 64, &m1);

  CHECK_FALSE(rep.injectivity_ok);
  CHECK(rep.injectivity_margin <= 1e-6);

  // verify the reported collision independently of the checker; the witness
  // pair must be well separated, not a pair of numerically twin nodes
  const Vec x1 = rep.witness_x1, x2 = rep.witness_x2, th = rep.witness_theta;
  CHECK((x1 - x2).norm() > 0.05);
  const Vec d1 = df.grad_theta(x1, th);
  const Vec d2 = df.grad_theta(x2, th);
  CHECK((d1 - d2).norm() <= 1e-9);

  // the fold also drives the family out of the admissible class
  CHECK_FALSE(rep.hessian_positive.ok);
  CHECK(rep.hessian_positive.worst < 0.0);
  // and its covectors no longer cover the sphere
  CHECK_FALSE(rep.surjectivity_ok);
}

TEST_CASE("defining checker: euclidean report is deterministic") {
  auto df = make_euclidean(2);
  Box m1 = Box::centered(2, 1.25);
  auto a = check_defining(df, m1, 17, 24);
  auto b = check_defining(df, m1, 17, 24);
  CHECK(a.homogeneity.worst == b.homogeneity.worst);
  CHECK(a.gradient_nonzero.worst == b.gradient_nonzero.worst);
  CHECK(a.hessian_positive.worst == b.hessian_positive.worst);
  CHECK(a.derivative_consistency.worst == b.derivative_consistency.worst);
}

TEST_CASE("weight validation accepts positive weights and rejects bad ones") {
  Box m1 = Box::centered(2, 1.25);

  auto wc = make_constant_weight(2, 1.0);
  wc.validate(m1, 9, 16);
  CHECK(wc.min_abs_witness == doctest::Approx(1.0));

  auto wg = make_gaussian_modulated_weight(2, 1.0, 0.5, 0.4, Vec::zero(2));
  wg.validate(m1, 9, 16);
  CHECK(wg.min_abs_witness >= 1.0);

  Weight sign_change;
  sign_change.n = 2;
  sign_change.id = "linear";
  sign_change.eval = [](const Vec& x, const Vec&) { return x[0]; };
  CHECK_THROWS_AS(sign_change.validate(m1, 9, 16), ConfigError);

  Weight zero;
  zero.n = 2;
  zero.id = "zero";
  zero.eval = [](const Vec&, const Vec&) { return 0.0; };
  CHECK_THROWS_AS(zero.validate(m1, 9, 16), ConfigError);

  CHECK_THROWS_AS(make_constant_weight(2, 0.0), ConfigError);
}
