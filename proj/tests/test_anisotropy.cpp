#include "isocap/anisotropy.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace isocap;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<AnisotropyField> builtin_fields() {
  return {make_zero_field(), make_radial_well(1.0),
          make_shifted_well(0.7, Vec3(1.0, -2.0, 0.5)),
          make_cone_sign_field(0.4), make_ball_sign_field(0.3)};
}

Vec3 random_point(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  return Vec3(unif(rng), unif(rng), unif(rng));
}
}  // namespace

TEST_CASE("builtin gradients match finite differences") {
  std::mt19937_64 rng(1);
  const double h = 1e-6;
  for (const auto& field : builtin_fields()) {
    for (int i = 0; i < 50; ++i) {
      Vec3 p = random_point(rng, 5.0);
      Vec3 g = field.grad(p);
      for (int c = 0; c < 3; ++c) {
        Vec3 dp = Vec3::Zero();
        dp[c] = h;
        double fd = (field.eval(p + dp) - field.eval(p - dp)) / (2.0 * h);
        CHECK(std::abs(fd - g[c]) <= 1e-6 * (1.0 + std::abs(g[c])));
      }
    }
  }
}

TEST_CASE("m_K closed forms") {
  auto zero = make_zero_field();
  auto well = make_radial_well(1.0);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i)
    CHECK(eval_mK(zero, random_point(rng, 10.0)) == 0.0);

  // int_0^1 s^2/(1+s^2) ds = 1 - pi/4 at |p| = 1
  double expected = -(1.0 - kPi / 4.0);
  CHECK(eval_mK(well, Vec3(1, 0, 0)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(eval_mK(well, Vec3(0, 0, -1)) ==
        doctest::Approx(expected).epsilon(1e-12));

  // p = 0: constant integrand K(0)/3
  CHECK(eval_mK(well, Vec3::Zero()) ==
        doctest::Approx(well.eval(Vec3::Zero()) / 3.0).epsilon(1e-14));
}

TEST_CASE("quadrature node doubling is converged") {
  std::mt19937_64 rng(3);
  for (const auto& field : builtin_fields()) {
    for (int i = 0; i < 20; ++i) {
      Vec3 p = random_point(rng, 10.0);
      CHECK(std::abs(eval_mK(field, p, 16) - eval_mK(field, p, 32)) <= 1e-12);
    }
  }
}

TEST_CASE("Q_K value and bound") {
  auto well = make_radial_well(1.0);
  CHECK(eval_QK(well, Vec3::Zero()).norm() == 0.0);
  Vec3 q = eval_QK(well, Vec3(1, 0, 0));
  CHECK(q.x() == doctest::Approx(-(1.0 - kPi / 4.0)).epsilon(1e-12));
  CHECK(q.y() == 0.0);

  // sup |Q_K| <= k0/2 = 0.25 for a = 1
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logr(-2.0, 3.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double sup = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    Vec3 p = std::pow(10.0, logr(rng)) * dir.normalized();
    sup = std::max(sup, eval_QK(well, p).norm());
  }
  CHECK(sup <= 0.25 + 1e-12);
}

TEST_CASE("Q_K decays along rays") {
  for (const auto& field : builtin_fields()) {
    Vec3 dir = Vec3(0.3, -0.5, 0.8).normalized();
    double prev = eval_QK(field, 10.0 * dir).norm();
    for (double r : {100.0, 1000.0}) {
      double cur = eval_QK(field, r * dir).norm();
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("jacobian of Q_K: divergence identity and FD check") {
  std::mt19937_64 rng(5);
  for (const auto& field : builtin_fields()) {
    for (int i = 0; i < 30; ++i) {
      Vec3 p = random_point(rng, 10.0);
      Mat3 j = jacobian_QK(field, p);
      CHECK(std::abs(j.trace() - field.eval(p)) <= 1e-9);
      const double h = 1e-5;
      for (int c = 0; c < 3; ++c) {
        Vec3 dp = Vec3::Zero();
        dp[c] = h;
        Vec3 fd = (eval_QK(field, p + dp) - eval_QK(field, p - dp)) / (2.0 * h);
        CHECK((fd - j.col(c)).norm() <= 1e-6 * (1.0 + j.col(c).norm()));
      }
    }
  }
  auto zero = make_zero_field();
  CHECK(jacobian_QK(zero, Vec3(1, 2, 3)).norm() == 0.0);
}

TEST_CASE("G0 and G1") {
  auto well = make_radial_well(1.0);
  CHECK(eval_G0(well, Vec3::Zero()).norm() == 0.0);
  CHECK(eval_G1(well, Vec3::Zero()).norm() == 0.0);
  CHECK(eval_G0(well, Vec3(1, 0, 0)).x() == doctest::Approx(-0.5));

  // |G1| maximum 2 a r^3/(1+r^2)^2 at r = sqrt(3): (3 sqrt 3 / 8) a
  std::mt19937_64 rng(6);
  double sup = 0.0;
  std::uniform_real_distribution<double> logr(-1.0, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 4000; ++i) {
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    Vec3 p = std::pow(10.0, logr(rng)) * dir.normalized();
    sup = std::max(sup, eval_G1(well, p).norm());
  }
  double bound = 3.0 * std::sqrt(3.0) / 8.0;
  CHECK(sup <= bound + 1e-12);
  CHECK(sup > 0.9 * bound);  // the sampled sup approaches the calculus value
}

TEST_CASE("condition checks") {
  auto spec = default_sample_spec();

  SUBCASE("zero field") {
    auto report = check_conditions(make_zero_field(), spec);
    CHECK(report.k0_estimate == 0.0);
    CHECK(report.k3_estimate == 0.0);
    CHECK(report.k4_holds);
  }

  SUBCASE("radial well k0 approaches a/2") {
    auto report = check_conditions(make_radial_well(1.0), spec);
    CHECK(report.k0_estimate <= 0.5 + 1e-12);
    CHECK(report.k0_estimate > 0.499);
    // k2: the recorded tail decays
    auto tail = report.k2_decay;
    CHECK(tail.back().first >= 100.0);
    CHECK(tail.back().second < 0.02);
  }

  SUBCASE("k4 threshold sits near 0.1518") {
    CHECK(k4_condition_holds(0.1));
    CHECK(!k4_condition_holds(0.2));
    CHECK(k4_condition_holds(0.1517));
    CHECK(!k4_condition_holds(0.1519));
  }

  SUBCASE("estimates are monotone in sample inclusion") {
    SampleSpec small = spec;
    small.directions_per_radius = 8;
    auto coarse = check_conditions(make_radial_well(1.0), small);
    auto fine = check_conditions(make_radial_well(1.0), spec);
    CHECK(coarse.k0_estimate <= fine.k0_estimate + 1e-12);
  }
}

TEST_CASE("ball integral") {
  auto zero = make_zero_field();
  CHECK(ball_integral(zero, Vec3::Zero(), 1.0) == 0.0);

  // 4 pi a int_0^1 r^2/(1+r^2) dr = 4 pi a (1 - pi/4), a = 0.5
  auto well = make_radial_well(0.5);
  double expected = -4.0 * kPi * 0.5 * (1.0 - kPi / 4.0);
  CHECK(ball_integral(well, Vec3::Zero(), 1.0) ==
        doctest::Approx(expected).epsilon(1e-9));

  // additivity over shells
  auto probe = make_shifted_well(0.8, Vec3(0.3, 0.1, -0.2));
  double whole = ball_integral(probe, Vec3::Zero(), 2.0);
  double inner = ball_integral(probe, Vec3::Zero(), 1.0);
  CHECK(std::abs(whole - inner) < std::abs(whole));
  // off-center consistency against a finer rule
  BallQuadratureSpec fine{64, 48, 96};
  CHECK(whole ==
        doctest::Approx(ball_integral(probe, Vec3::Zero(), 2.0, fine))
            .epsilon(1e-6));

  CHECK_THROWS_AS(ball_integral(zero, Vec3::Zero(), -1.0),
                  std::invalid_argument);
}

TEST_CASE("t_plus / t_minus estimation") {
  std::vector<Vec3> centers = {Vec3::Zero(), Vec3(0.5, 0, 0), Vec3(0, 0, 2.0)};
  std::vector<double> radii = {0.25, 0.5, 1.0, 2.0, 4.0};

  SUBCASE("zero field gives 0") {
    CHECK(estimate_t_plus(make_zero_field(), centers, radii) == 0.0);
    CHECK(estimate_t_minus(make_zero_field(), centers, radii) == 0.0);
  }

  SUBCASE("globally negative field gives the +inf sentinel") {
    double t = estimate_t_plus(make_radial_well(1.0), centers, radii);
    CHECK(std::isinf(t));
    CHECK(t > 0);
  }

  SUBCASE("sign-changing field caps t_plus at the negative ball") {
    auto field = make_ball_sign_field(1.0);
    // negative exactly on B_1(0): largest all-negative ball centered at 0
    // has radius 1
    std::vector<double> fine_radii = {0.5, 0.9, 1.0, 1.2, 2.0};
    double t = estimate_t_plus(field, {Vec3::Zero()}, fine_radii);
    CHECK(t == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
    // t_minus sentinel: K >= 0 on balls far outside
    double tm =
        estimate_t_minus(field, {Vec3(0, 0, 10.0)}, {0.5, 1.0, 2.0});
    CHECK(std::isinf(tm));
    CHECK(tm < 0);
  }
}
