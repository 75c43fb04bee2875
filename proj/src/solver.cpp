#include "isocap/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <stdexcept>

namespace isocap {

namespace {

using SparseMat = Eigen::SparseMatrix<double>;

// P = M + L: lumped mass plus cotangent Laplacian, factored once per solve.
// The reference metric is fixed, so the preconditioner is iteration-free.
SparseMat build_preconditioner(const SphereMesh& mesh) {
  const int n = mesh.vertex_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.edges.size() * 4 + n);
  std::vector<double> diag(n, 0.0);
  for (const auto& e : mesh.edges) {
    trips.emplace_back(e.a, e.b, -e.weight);
    trips.emplace_back(e.b, e.a, -e.weight);
    diag[e.a] += e.weight;
    diag[e.b] += e.weight;
  }
  for (int i = 0; i < n; ++i)
    trips.emplace_back(i, i, diag[i] + mesh.dual_areas[i]);
  SparseMat p(n, n);
  p.setFromTriplets(trips.begin(), trips.end());
  return p;
}

double minv_dot(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                const std::vector<double>& mass) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i].dot(b[i]) / mass[i];
  return acc;
}

double plain_dot(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i].dot(b[i]);
  return acc;
}

}  // namespace

void SolverConfig::validate() const {
  if (step_size <= 0 || backtrack_factor <= 0 || backtrack_factor >= 1 ||
      max_halvings <= 0 || max_iters <= 0 || residual_tol <= 0 ||
      smooth_every <= 0 || escape_radius <= 0 || quad_nodes < 4)
    throw std::invalid_argument("SolverConfig: all fields must be positive");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::escaped: return "escaped";
    case SolveStatus::mesh_degenerate: return "mesh_degenerate";
  }
  return "unknown";
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "converged") return SolveStatus::converged;
  if (s == "max_iters") return SolveStatus::max_iters;
  if (s == "escaped") return SolveStatus::escaped;
  if (s == "mesh_degenerate") return SolveStatus::mesh_degenerate;
  throw std::invalid_argument("unknown solve status: " + s);
}

double extract_multiplier(const SurfaceMap& u, const AnisotropyField& field,
                          int nodes) {
  auto gd = grad_dirichlet(u);
  auto gq = grad_q(u, field, nodes);
  for (size_t i = 0; i < gd.size(); ++i) gd[i] += gq[i];
  auto gv = grad_volume(u);
  const auto& mass = u.ref().dual_areas;
  double denom = minv_dot(gv, gv, mass);
  if (denom <= 0.0)
    throw std::domain_error("extract_multiplier: grad volume vanishes");
  return minv_dot(gd, gv, mass) / denom;
}

std::pair<double, double> multiplier_bounds(double t, double k0) {
  if (t <= 0.0) throw std::invalid_argument("multiplier_bounds: t <= 0");
  if (k0 < 0.0 || k0 >= 2.0)
    throw std::invalid_argument("multiplier_bounds: k0 outside [0, 2)");
  double s = kIsoperimetricS;
  double cbrt_t = std::cbrt(t);
  double lower = (2.0 - k0) * (2.0 - k0) * s / (3.0 * (2.0 + k0) * cbrt_t);
  double upper = 2.0 * (2.0 + k0) * s / (3.0 * (2.0 - k0) * cbrt_t);
  return {lower, upper};
}

SolveResult minimize_isovolumetric(std::shared_ptr<const SphereMesh> mesh,
                                   const AnisotropyField& field, double t,
                                   const SolverConfig& config,
                                   std::optional<SurfaceMap> init) {
  config.validate();
  if (t == 0.0)
    throw std::invalid_argument("minimize_isovolumetric: t = 0");

  SolveResult result;
  SurfaceMap u = init ? *init : init_sphere(mesh, t);
  if (u.mesh.get() != mesh.get())
    throw std::invalid_argument("minimize_isovolumetric: init on wrong mesh");
  u = rescale_to_volume(u, t, weighted_centroid(u));

  const int n = mesh->vertex_count();
  const auto& mass = mesh->dual_areas;
  Eigen::SimplicialLDLT<SparseMat> precond;
  precond.compute(build_preconditioner(*mesh));
  if (precond.info() != Eigen::Success)
    throw std::runtime_error("preconditioner factorization failed");

  auto energy_of = [&](const SurfaceMap& s) {
    return dirichlet(s) + q_term(s, field, 1.0, config.quad_nodes);
  };

  double energy = energy_of(u);
  double step = config.step_size;
  result.status = SolveStatus::max_iters;

  // residual history for the stagnation test
  std::vector<double> residual_log;

  try {
    for (int iter = 0; iter < config.max_iters; ++iter) {
      auto gd = grad_dirichlet(u);
      auto gq = grad_q(u, field, config.quad_nodes);
      std::vector<Vec3> ge(n);
      for (int i = 0; i < n; ++i) ge[i] = gd[i] + gq[i];
      auto gv = grad_volume(u);

      double lambda = minv_dot(ge, gv, mass) / minv_dot(gv, gv, mass);
      double residual = 0.0;
      for (int i = 0; i < n; ++i)
        residual += (ge[i] - lambda * gv[i]).squaredNorm() / mass[i];
      residual = std::sqrt(residual);
      double centroid_norm = weighted_centroid(u).norm();

      residual_log.push_back(residual);
      if (residual <= config.residual_tol) {
        result.status = SolveStatus::converged;
        break;
      }
      if (centroid_norm > config.escape_radius &&
          residual_log.size() > 100) {
        double past = residual_log[residual_log.size() - 101];
        if (std::abs(residual - past) <= 1e-6 * std::abs(past)) {
          result.status = SolveStatus::escaped;
          break;
        }
      }

      // preconditioned direction, tangent to the constraint:
      // d = -P^{-1}(gE - lam_p gV) with lam_p chosen so <gV, d> = 0
      Eigen::MatrixXd rhs(n, 3);
      for (int i = 0; i < n; ++i) rhs.row(i) = gv[i].transpose();
      Eigen::MatrixXd pgv = precond.solve(rhs);
      for (int i = 0; i < n; ++i) rhs.row(i) = ge[i].transpose();
      Eigen::MatrixXd pge = precond.solve(rhs);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < n; ++i) {
        num += gv[i].dot(pge.row(i));
        den += gv[i].dot(pgv.row(i));
      }
      double lam_p = num / den;
      std::vector<Vec3> dir(n);
      for (int i = 0; i < n; ++i)
        dir[i] = -(pge.row(i).transpose() - lam_p * pgv.row(i).transpose());

      std::vector<Vec3> proj_grad(n);
      for (int i = 0; i < n; ++i) proj_grad[i] = ge[i] - lam_p * gv[i];
      double decrease = plain_dot(proj_grad, dir);  // negative

      double alpha = step;
      bool accepted = false;
      SurfaceMap trial;
      double trial_energy = 0.0;
      for (int h = 0; h < config.max_halvings; ++h) {
        trial = u;
        for (int i = 0; i < n; ++i) trial.positions[i] += alpha * dir[i];
        double v = enclosed_volume(trial);
        if (v != 0.0 && (v > 0) == (t > 0)) {
          trial = rescale_to_volume(trial, t, weighted_centroid(trial));
          trial_energy = energy_of(trial);
          if (trial_energy <= energy + config.armijo_c * alpha * decrease) {
            accepted = true;
            break;
          }
        }
        alpha *= config.backtrack_factor;
      }
      if (!accepted) break;  // stalled at numerical floor

      u = std::move(trial);
      energy = trial_energy;
      step = std::min(alpha / config.backtrack_factor, 1e8);

      if ((iter + 1) % config.smooth_every == 0) {
        SurfaceMap smoothed = tangential_smooth(u, config.smooth_strength);
        double es = energy_of(smoothed);
        if (es <= energy) {
          u = std::move(smoothed);
          energy = es;
        }
      }

      IterationRecord rec;
      rec.iter = iter;
      rec.energy = energy;
      rec.volume_drift = std::abs(enclosed_volume(u) - t) / std::abs(t);
      rec.residual = residual;
      rec.centroid_norm = weighted_centroid(u).norm();
      rec.step = alpha;
      result.history.push_back(rec);
    }
  } catch (const MeshDegeneracyError&) {
    result.status = SolveStatus::mesh_degenerate;
  }

  result.surface = u;
  result.breakdown = evaluate(u, field, config.quad_nodes);
  result.lambda = extract_multiplier(u, field, config.quad_nodes);
  result.residual = el_residual(u, field, result.lambda, config.quad_nodes);
  return result;
}

}  // namespace isocap
