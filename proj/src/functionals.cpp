#include "isocap/functionals.hpp"

#include <cmath>
#include <random>

namespace isocap {

double dirichlet(const SurfaceMap& u) {
  double acc = 0.0;
  for (const auto& e : u.ref().edges)
    acc += e.weight * (u.positions[e.a] - u.positions[e.b]).squaredNorm();
  return 0.5 * acc;
}

double area(const SurfaceMap& u) {
  double acc = 0.0;
  for (const auto& f : u.ref().faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    acc += 0.5 * (b - a).cross(c - a).norm();
  }
  return acc;
}

double volume(const SurfaceMap& u) { return enclosed_volume(u); }

double q_term(const SurfaceMap& u, const AnisotropyField& field,
              double t_scale, int nodes) {
  double acc = 0.0;
  for (const auto& f : u.ref().faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    Vec3 centroid = (a + b + c) / 3.0;
    Vec3 area_vec = 0.5 * (b - a).cross(c - a);
    acc += eval_QK(field, t_scale * centroid, nodes).dot(area_vec);
  }
  return acc;
}

EnergyBreakdown evaluate(const SurfaceMap& u, const AnisotropyField& field,
                         int nodes) {
  EnergyBreakdown out;
  out.dirichlet = dirichlet(u);
  out.area = area(u);
  out.volume = volume(u);
  out.q_term = q_term(u, field, 1.0, nodes);
  out.energy_E = out.dirichlet + out.q_term;
  out.capillary_F = out.area + out.q_term;
  out.conformality_defect = conformality_defect(u);
  return out;
}

std::vector<Vec3> grad_dirichlet(const SurfaceMap& u) {
  std::vector<Vec3> g(u.positions.size(), Vec3::Zero());
  for (const auto& e : u.ref().edges) {
    Vec3 d = e.weight * (u.positions[e.a] - u.positions[e.b]);
    g[e.a] += d;
    g[e.b] -= d;
  }
  return g;
}

std::vector<Vec3> grad_volume(const SurfaceMap& u) {
  std::vector<Vec3> g(u.positions.size(), Vec3::Zero());
  for (const auto& f : u.ref().faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    g[f[0]] += b.cross(c) / 6.0;
    g[f[1]] += c.cross(a) / 6.0;
    g[f[2]] += a.cross(b) / 6.0;
  }
  return g;
}

std::vector<Vec3> grad_q(const SurfaceMap& u, const AnisotropyField& field,
                         int nodes) {
  std::vector<Vec3> g(u.positions.size(), Vec3::Zero());
  for (const auto& f : u.ref().faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    Vec3 centroid = (a + b + c) / 3.0;
    Vec3 area_vec = 0.5 * (b - a).cross(c - a);
    Vec3 q = eval_QK(field, centroid, nodes);
    Vec3 jt_area = jacobian_QK(field, centroid, nodes).transpose() * area_vec;
    // chain rule through the centroid and through the area vector
    g[f[0]] += jt_area / 3.0 + 0.5 * q.cross(c - b);
    g[f[1]] += jt_area / 3.0 + 0.5 * q.cross(a - c);
    g[f[2]] += jt_area / 3.0 + 0.5 * q.cross(b - a);
  }
  return g;
}

double el_residual(const SurfaceMap& u, const AnisotropyField& field,
                   double lambda, int nodes) {
  auto gd = grad_dirichlet(u);
  auto gq = grad_q(u, field, nodes);
  auto gv = grad_volume(u);
  const auto& mass = u.ref().dual_areas;
  double acc = 0.0;
  for (size_t i = 0; i < gd.size(); ++i)
    acc += (gd[i] + gq[i] - lambda * gv[i]).squaredNorm() / mass[i];
  return std::sqrt(acc);
}

double conformality_defect(const SurfaceMap& u) {
  const auto& m = u.ref();
  double acc = 0.0;
  double total = 0.0;
  for (const auto& f : m.faces) {
    const Vec3& v0 = m.vertices[f[0]];
    Vec3 e1 = m.vertices[f[1]] - v0;
    Vec3 e2 = m.vertices[f[2]] - v0;
    Vec3 xhat = e1.normalized();
    Vec3 yhat = (e2 - e2.dot(xhat) * xhat).normalized();
    Eigen::Matrix2d ref;
    ref << e1.norm(), e2.dot(xhat), 0.0, e2.dot(yhat);
    double ref_area = 0.5 * std::abs(ref.determinant());

    Vec3 f1 = u.positions[f[1]] - u.positions[f[0]];
    Vec3 f2 = u.positions[f[2]] - u.positions[f[0]];
    Eigen::Matrix<double, 3, 2> img;
    img.col(0) = f1;
    img.col(1) = f2;
    Eigen::Matrix<double, 3, 2> jac = img * ref.inverse();
    Eigen::Matrix2d metric = jac.transpose() * jac;

    double tr = metric.trace();
    double det = std::max(0.0, metric.determinant());
    // (s1 - s2)^2 / (s1^2 + s2^2) with s_i the singular values of jac
    double defect = tr > 0.0 ? (tr - 2.0 * std::sqrt(det)) / tr : 0.0;
    acc += ref_area * defect;
    total += ref_area;
  }
  return acc / total;
}

double radial_q_derivative(const SurfaceMap& u, const AnisotropyField& field,
                           double s, int /*nodes*/) {
  if (s == 0.0) return 0.0;
  double acc = 0.0;
  for (const auto& f : u.ref().faces) {
    const Vec3& a = u.positions[f[0]];
    const Vec3& b = u.positions[f[1]];
    const Vec3& c = u.positions[f[2]];
    Vec3 centroid = (a + b + c) / 3.0;
    Vec3 area_vec = 0.5 * (b - a).cross(c - a);
    acc += field.eval(s * centroid) * centroid.dot(area_vec);
  }
  return s * s * acc;
}

SteffenReport steffen_bound_check(const SurfaceMap& u,
                                  const AnisotropyField& field, double t_scale,
                                  uint64_t seed) {
  SteffenReport rep;
  rep.seed = seed;

  double max_pos = 0.0;
  for (const auto& p : u.positions) max_pos = std::max(max_pos, p.norm());

  // sample suprema of |K_t| = |t K(tp)| and |Q_K| over a range covering the
  // surface and the far field
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> logr(-3.0, 3.0);
  double reach = std::max(1.0, 2.0 * max_pos);
  for (int i = 0; i < 4096; ++i) {
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    dir.normalize();
    Vec3 p = reach * std::pow(10.0, logr(rng)) * dir;
    rep.k_sup = std::max(rep.k_sup,
                         std::abs(t_scale * field.eval(t_scale * p)));
    rep.q_sup = std::max(rep.q_sup, eval_QK(field, p).norm());
  }

  double d = dirichlet(u);
  rep.q_abs = std::abs(q_term(u, field, t_scale));
  rep.steffen_bound =
      rep.k_sup * std::pow(d, 1.5) / std::pow(kIsoperimetricS, 1.5);
  rep.qk_bound = rep.q_sup * d;
  double tol = 1e-9 * (1.0 + d);
  rep.holds = rep.q_abs <= rep.steffen_bound + tol &&
              std::abs(q_term(u, field, 1.0)) <= rep.qk_bound + tol;
  return rep;
}

}  // namespace isocap
