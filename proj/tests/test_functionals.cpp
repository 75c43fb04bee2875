#include "isocap/functionals.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace isocap;

namespace {
constexpr double kPi = std::numbers::pi;

SurfaceMap identity_embedding(std::shared_ptr<const SphereMesh> mesh) {
  SurfaceMap u;
  u.mesh = mesh;
  u.positions = mesh->vertices;
  return u;
}

SurfaceMap perturbed_sphere(std::shared_ptr<const SphereMesh> mesh,
                            uint64_t seed, double amp = 0.05) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-amp, amp);
  SurfaceMap u = identity_embedding(mesh);
  for (auto& p : u.positions)
    p = (1.0 + unif(rng)) * p + Vec3(unif(rng), unif(rng), unif(rng)) * 0.3;
  return u;
}

SurfaceMap constant_map(std::shared_ptr<const SphereMesh> mesh, const Vec3& c) {
  SurfaceMap u;
  u.mesh = mesh;
  u.positions.assign(mesh->vertex_count(), c);
  return u;
}
}  // namespace

TEST_CASE("dirichlet: constants, spheres, exact scaling") {
  auto mesh = build_icosphere(5);
  CHECK(dirichlet(constant_map(mesh, Vec3(1, 2, 3))) == 0.0);

  SurfaceMap u = identity_embedding(mesh);
  CHECK(dirichlet(u) == doctest::Approx(4.0 * kPi).epsilon(1e-3));

  SurfaceMap u2 = u;
  for (auto& p : u2.positions) p *= 1.7;
  CHECK(dirichlet(u2) ==
        doctest::Approx(1.7 * 1.7 * dirichlet(u)).epsilon(1e-12));

  // translation invariance
  SurfaceMap u3 = u;
  for (auto& p : u3.positions) p += Vec3(5, -7, 11);
  CHECK(dirichlet(u3) == doctest::Approx(dirichlet(u)).epsilon(1e-12));
}

TEST_CASE("area: constants, spheres, A <= D per surface") {
  auto mesh = build_icosphere(5);
  CHECK(area(constant_map(mesh, Vec3::Zero())) == 0.0);
  SurfaceMap u = identity_embedding(mesh);
  CHECK(area(u) == doctest::Approx(4.0 * kPi).epsilon(1e-3));

  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    SurfaceMap s = perturbed_sphere(mesh, seed, 0.2);
    CHECK(area(s) <= dirichlet(s) + 1e-12);
  }
}

TEST_CASE("volume: icosahedron closed form, invariances") {
  auto mesh0 = build_icosphere(0);
  SurfaceMap ico = identity_embedding(mesh0);
  // regular icosahedron with circumradius 1
  double edge = 4.0 / std::sqrt(10.0 + 2.0 * std::sqrt(5.0));
  double expected = 5.0 / 12.0 * (3.0 + std::sqrt(5.0)) * edge * edge * edge;
  CHECK(enclosed_volume(ico) == doctest::Approx(expected).epsilon(1e-12));

  auto mesh = build_icosphere(4);
  SurfaceMap u = perturbed_sphere(mesh, 11);
  double v = volume(u);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (int i = 0; i < 5; ++i) {
    SurfaceMap w = u;
    Vec3 shift(unif(rng), unif(rng), unif(rng));
    for (auto& p : w.positions) p += shift;
    CHECK(volume(w) == doctest::Approx(v).epsilon(1e-12));
  }
  SurfaceMap scaled = u;
  for (auto& p : scaled.positions) p *= -2.0;
  CHECK(volume(scaled) == doctest::Approx(-8.0 * v).epsilon(1e-12));
}

TEST_CASE("q_term closed form and scaling identity") {
  auto mesh = build_icosphere(5);
  auto zero = make_zero_field();
  SurfaceMap u = init_sphere(mesh, 4.0 * kPi / 3.0);
  CHECK(q_term(u, zero) == 0.0);

  // Q(sphere) = ball integral of K, orientation parity fixed by t > 0
  auto well = make_radial_well(0.5);
  double expected = ball_integral(well, Vec3::Zero(), 1.0);
  CHECK(q_term(u, well) == doctest::Approx(expected).epsilon(1e-3));

  // Q(tu) = t^2 Q_t(u)
  auto mesh3 = build_icosphere(3);
  SurfaceMap w = perturbed_sphere(mesh3, 23);
  for (double t : {0.3, 1.7, 4.0}) {
    SurfaceMap tw = w;
    for (auto& p : tw.positions) p *= t;
    CHECK(q_term(tw, well, 1.0) ==
          doctest::Approx(t * t * q_term(w, well, t)).epsilon(1e-10));
  }
}

TEST_CASE("exact discrete gradients pass finite-difference checks") {
  auto mesh = build_icosphere(2);
  auto well = make_radial_well(1.0);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double h = 1e-5;
  SurfaceMap u = perturbed_sphere(mesh, 29);

  std::vector<Vec3> phi(u.positions.size());
  for (auto& p : phi) p = Vec3(unif(rng), unif(rng), unif(rng));
  auto check_grad = [&](auto&& fn, const std::vector<Vec3>& grad) {
    SurfaceMap up = u, um = u;
    for (size_t i = 0; i < phi.size(); ++i) {
      up.positions[i] += h * phi[i];
      um.positions[i] -= h * phi[i];
    }
    double fd = (fn(up) - fn(um)) / (2.0 * h);
    double an = 0.0;
    for (size_t i = 0; i < phi.size(); ++i) an += grad[i].dot(phi[i]);
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
  };
  check_grad([](const SurfaceMap& s) { return dirichlet(s); },
             grad_dirichlet(u));
  check_grad([](const SurfaceMap& s) { return volume(s); }, grad_volume(u));
  check_grad([&](const SurfaceMap& s) { return q_term(s, well); },
             grad_q(u, well));

  // Euler identity for the degree-3 homogeneous volume
  auto gv = grad_volume(u);
  double euler = 0.0;
  for (size_t i = 0; i < gv.size(); ++i) euler += gv[i].dot(u.positions[i]);
  CHECK(euler == doctest::Approx(3.0 * volume(u)).epsilon(1e-12));

  // constant maps: zero gradients, zero residual for any lambda
  SurfaceMap c = constant_map(mesh, Vec3(0.4, 0.2, -1.0));
  for (const auto& g : grad_dirichlet(c)) CHECK(g.norm() == 0.0);
  CHECK(el_residual(c, well, 3.7) == 0.0);
}

TEST_CASE("el_residual: CMC sphere solves the K=0 system") {
  auto zero = make_zero_field();
  double prev = 0.0;
  for (int level : {3, 4, 5}) {
    auto mesh = build_icosphere(level);
    SurfaceMap u = init_sphere(mesh, 4.0 * kPi / 3.0);
    double res = el_residual(u, zero, 2.0);  // lambda = 2/r, r = 1
    if (level > 3) CHECK(res < prev);
    prev = res;
  }
  CHECK(prev < 0.05);

  // least-squares property of the multiplier
  auto mesh = build_icosphere(3);
  SurfaceMap u = init_sphere(mesh, 4.0 * kPi / 3.0);
  double lam_wrong = 2.5;
  CHECK(el_residual(u, zero, 2.0) < el_residual(u, zero, lam_wrong));
}

TEST_CASE("conformality defect") {
  auto mesh = build_icosphere(5);
  SurfaceMap u = identity_embedding(mesh);
  double floor = conformality_defect(u);
  CHECK(floor >= 0.0);
  CHECK(floor <= 1e-2);

  SurfaceMap stretched = u;
  for (auto& p : stretched.positions) p.x() *= 2.0;
  double stretched_defect = conformality_defect(stretched);
  CHECK(stretched_defect > 10.0 * floor);

  // scale invariance by normalization
  SurfaceMap scaled = stretched;
  for (auto& p : scaled.positions) p *= 3.0;
  CHECK(conformality_defect(scaled) ==
        doctest::Approx(stretched_defect).epsilon(1e-12));
}

TEST_CASE("radial q derivative identity") {
  auto mesh = build_icosphere(3);
  auto well = make_radial_well(1.0);
  SurfaceMap u = perturbed_sphere(mesh, 41);
  CHECK(radial_q_derivative(u, make_zero_field(), 1.0) == 0.0);
  CHECK(radial_q_derivative(u, well, 0.0) == 0.0);

  const double h = 1e-5;
  auto q_of_scale = [&](double s) {
    SurfaceMap su = u;
    for (auto& p : su.positions) p *= s;
    return q_term(su, well);
  };
  for (double s : {0.5, 1.0, 2.0}) {
    double fd = (q_of_scale(s + h) - q_of_scale(s - h)) / (2.0 * h);
    double an = radial_q_derivative(u, well, s);
    CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
  }
}

TEST_CASE("isoperimetric chain and equality at round spheres") {
  auto mesh = build_icosphere(5);
  const double S = kIsoperimetricS;
  for (uint64_t seed : {7, 8, 9, 10}) {
    SurfaceMap u = perturbed_sphere(mesh, seed, 0.15);
    double a = area(u), d = dirichlet(u), v = std::abs(volume(u));
    CHECK(S * std::pow(v, 2.0 / 3.0) <= a * 1.005);
    CHECK(a <= d * 1.005);
  }
  // round spheres approach equality as the mesh refines
  double prev_gap = 1e300;
  for (int level : {3, 4, 5}) {
    auto m = build_icosphere(level);
    SurfaceMap u = init_sphere(m, 4.0 * kPi / 3.0);
    double ratio = dirichlet(u) / std::pow(std::abs(volume(u)), 2.0 / 3.0);
    double gap = ratio - S;
    CHECK(gap > 0.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 5e-3 * S);
}

TEST_CASE("steffen and Q-norm bounds hold with slack") {
  auto mesh = build_icosphere(3);
  auto well = make_radial_well(1.0);
  auto zero = make_zero_field();
  SurfaceMap u0 = init_sphere(mesh, 4.0 * kPi / 3.0);
  CHECK(steffen_bound_check(u0, zero, 1.0).holds);
  for (uint64_t seed : {1, 2, 3}) {
    SurfaceMap u = perturbed_sphere(mesh, seed, 0.2);
    for (double t : {0.1, 1.0, 10.0}) {
      auto rep = steffen_bound_check(u, well, t);
      CHECK(rep.holds);
      CHECK(rep.q_abs <= rep.steffen_bound + 1e-9);
    }
  }
}

TEST_CASE("energy breakdown is internally consistent") {
  auto mesh = build_icosphere(3);
  auto well = make_radial_well(0.5);
  SurfaceMap u = perturbed_sphere(mesh, 3);
  EnergyBreakdown b = evaluate(u, well);
  CHECK(b.energy_E == b.dirichlet + b.q_term);
  CHECK(b.capillary_F == b.area + b.q_term);
  CHECK(b.area <= b.dirichlet + 1e-12);
  CHECK(b.capillary_F <= b.energy_E);
}
