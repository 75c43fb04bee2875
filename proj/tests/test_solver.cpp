#include "isocap/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace isocap;

namespace {
constexpr double kPi = std::numbers::pi;

SolverConfig fast_config() {
  SolverConfig cfg;
  cfg.max_iters = 2000;
  cfg.residual_tol = 1e-4;
  return cfg;
}
}  // namespace

TEST_CASE("multiplier bounds closed forms") {
  const double S = kIsoperimetricS;
  double t = 4.0 * kPi / 3.0;

  auto [lo0, hi0] = multiplier_bounds(t, 0.0);
  CHECK(lo0 == doctest::Approx(hi0).epsilon(1e-12));
  CHECK(lo0 == doctest::Approx(2.0 / 3.0 * S / std::cbrt(t)).epsilon(1e-12));
  CHECK(lo0 == doctest::Approx(2.0).epsilon(1e-3));  // lambda = 2/r at r = 1

  auto [lo, hi] = multiplier_bounds(t, 0.25);
  CHECK(lo == doctest::Approx(1.361).epsilon(1e-3));
  CHECK(hi == doctest::Approx(2.572).epsilon(1e-3));

  // t^{-1/3} homogeneity
  auto [lo8, hi8] = multiplier_bounds(8.0 * t, 0.25);
  CHECK(lo8 == doctest::Approx(lo / 2.0).epsilon(1e-12));
  CHECK(hi8 == doctest::Approx(hi / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(multiplier_bounds(-1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(multiplier_bounds(1.0, 2.0), std::invalid_argument);
}

TEST_CASE("extract_multiplier: CMC spheres and error paths") {
  auto zero = make_zero_field();
  for (double r : {0.5, 1.0, 2.0}) {
    auto mesh = build_icosphere(4);
    double t = 4.0 * kPi / 3.0 * r * r * r;
    SurfaceMap u = init_sphere(mesh, t);
    CHECK(extract_multiplier(u, zero) ==
          doctest::Approx(2.0 / r).epsilon(2e-3));
    // opposite orientation flips the sign
    SurfaceMap v = init_sphere(mesh, -t);
    CHECK(extract_multiplier(v, zero) ==
          doctest::Approx(-2.0 / r).epsilon(2e-3));
  }
  auto mesh = build_icosphere(2);
  SurfaceMap c;
  c.mesh = mesh;
  c.positions.assign(mesh->vertex_count(), Vec3(1, 1, 1));
  CHECK_THROWS_AS(extract_multiplier(c, zero), std::domain_error);

  // least-squares property against sampled lambdas
  SurfaceMap u = init_sphere(mesh, 4.0 * kPi / 3.0);
  auto well = make_radial_well(0.5);
  double lam = extract_multiplier(u, well);
  double best = el_residual(u, well, lam);
  for (double d : {-0.5, -0.1, 0.1, 0.5})
    CHECK(best <= el_residual(u, well, lam + d));
}

TEST_CASE("K = 0 solve reaches the round sphere values") {
  auto mesh = build_icosphere(4);
  auto zero = make_zero_field();
  double t = 4.0 * kPi / 3.0;
  SolveResult res = minimize_isovolumetric(mesh, zero, t, fast_config());

  CHECK(res.status == SolveStatus::converged);
  double target = kIsoperimetricS * std::pow(t, 2.0 / 3.0);
  CHECK(res.breakdown.energy_E == doctest::Approx(target).epsilon(0.01));
  CHECK(res.lambda == doctest::Approx(2.0).epsilon(0.1));
  CHECK(std::abs(volume(res.surface) - t) <= 1e-10 * t);
  CHECK(res.residual <= fast_config().residual_tol);

  // monotone energy history
  for (size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i].energy <= res.history[i - 1].energy + 1e-12);
}

TEST_CASE("radial well solve: strict improvement and multiplier window") {
  auto mesh = build_icosphere(4);
  auto well = make_radial_well(0.5);
  double t = 4.0 * kPi / 3.0;
  SolveResult res = minimize_isovolumetric(mesh, well, t, fast_config());

  CHECK(res.status == SolveStatus::converged);
  double trial = 4.0 * kPi - 4.0 * kPi * 0.5 * (1.0 - kPi / 4.0);
  CHECK(res.breakdown.energy_E <= trial * 1.01);
  CHECK(res.breakdown.energy_E <
        kIsoperimetricS * std::pow(t, 2.0 / 3.0));

  auto [lo, hi] = multiplier_bounds(t, 0.5);
  CHECK(res.lambda >= lo * 0.85);
  CHECK(res.lambda <= hi * 1.15);
  CHECK(res.lambda * t > 0.0);  // sign law

  // Dirichlet window at convergence (||Q_K||_inf <= k0/2 = 0.25)
  double q_inf = 0.25;
  double st23 = kIsoperimetricS * std::pow(t, 2.0 / 3.0);
  CHECK(res.breakdown.dirichlet >=
        res.breakdown.energy_E / (1.0 + q_inf) * 0.995);
  CHECK(res.breakdown.dirichlet <= st23 / (1.0 - q_inf) * 1.005);
}

TEST_CASE("negative volume with K = 0 converges with negative multiplier") {
  auto mesh = build_icosphere(3);
  auto zero = make_zero_field();
  double t = -4.0 * kPi / 3.0;
  SolveResult res = minimize_isovolumetric(mesh, zero, t, fast_config());
  CHECK(res.status == SolveStatus::converged);
  CHECK(res.lambda < 0.0);
  CHECK(res.lambda * t > 0.0);
  CHECK(std::abs(volume(res.surface) - t) <= 1e-10 * std::abs(t));
}

TEST_CASE("argument validation") {
  auto mesh = build_icosphere(2);
  auto zero = make_zero_field();
  CHECK_THROWS_AS(minimize_isovolumetric(mesh, zero, 0.0, fast_config()),
                  std::invalid_argument);
  SolverConfig bad;
  bad.residual_tol = -1.0;
  CHECK_THROWS_AS(minimize_isovolumetric(mesh, zero, 1.0, bad),
                  std::invalid_argument);
}

TEST_CASE("constraint exactness along the whole iteration") {
  auto mesh = build_icosphere(3);
  auto well = make_radial_well(0.5);
  SolverConfig cfg = fast_config();
  cfg.max_iters = 200;
  cfg.residual_tol = 1e-12;  // force a full run
  SolveResult res = minimize_isovolumetric(mesh, well, 2.0, cfg);
  for (const auto& h : res.history) CHECK(h.volume_drift <= 1e-10);
}
