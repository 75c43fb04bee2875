#pragma once

#include "isocap/functionals.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace isocap {

struct SolverConfig {
  double step_size = 1.0;        // initial Armijo step
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_halvings = 40;
  int max_iters = 4000;
  double residual_tol = 1e-4;
  int smooth_every = 50;
  double smooth_strength = 0.5;
  double escape_radius = 1e3;
  uint64_t seed = 0;
  int quad_nodes = 16;

  void validate() const;
};

enum class SolveStatus { converged, max_iters, escaped, mesh_degenerate };

std::string to_string(SolveStatus s);
SolveStatus solve_status_from_string(const std::string& s);

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double volume_drift = 0.0;  // |V - t| / |t| after restoration
  double residual = 0.0;
  double centroid_norm = 0.0;
  double step = 0.0;
};

struct SolveResult {
  SurfaceMap surface;
  EnergyBreakdown breakdown;
  double lambda = 0.0;
  double residual = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  std::vector<IterationRecord> history;
};

// Projected gradient descent on the volume-constrained energy E = D + Q:
// H^1-preconditioned direction, tangent projection, Armijo backtracking, and
// exact constraint restoration by the cube-root rescale after every step.
SolveResult minimize_isovolumetric(std::shared_ptr<const SphereMesh> mesh,
                                   const AnisotropyField& field, double t,
                                   const SolverConfig& config = {},
                                   std::optional<SurfaceMap> init = {});

// Least-squares multiplier: the Riesz quotient of grad E against grad V in
// the lumped-mass-inverse inner product. Minimizes el_residual over lambda.
double extract_multiplier(const SurfaceMap& u, const AnisotropyField& field,
                          int nodes = 16);

// Closed-form window for the multiplier at volume t > 0, 0 <= k0 < 2.
std::pair<double, double> multiplier_bounds(double t, double k0);

}  // namespace isocap
