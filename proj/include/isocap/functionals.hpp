#pragma once

#include "isocap/anisotropy.hpp"
#include "isocap/sphere_mesh.hpp"

#include <cstdint>
#include <numbers>
#include <vector>

namespace isocap {

// Best constant of the isoperimetric inequality S |V|^{2/3} <= A, cbrt(36 pi).
inline const double kIsoperimetricS = std::cbrt(36.0 * std::numbers::pi);

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double area = 0.0;
  double volume = 0.0;
  double q_term = 0.0;
  double energy_E = 0.0;     // dirichlet + q_term
  double capillary_F = 0.0;  // area + q_term
  double conformality_defect = 0.0;
};

// Cotangent-weight Dirichlet energy (1/2) sum_e w_e |u_i - u_j|^2.
double dirichlet(const SurfaceMap& u);
// Sum of image triangle areas.
double area(const SurfaceMap& u);
// Signed enclosed volume (Bononcini-Wente integral of the polyhedron).
double volume(const SurfaceMap& u);
// Centroid-quadrature anisotropy term sum_f Q_K(t_scale c_f) . A_f.
double q_term(const SurfaceMap& u, const AnisotropyField& field,
              double t_scale = 1.0, int nodes = 16);

EnergyBreakdown evaluate(const SurfaceMap& u, const AnisotropyField& field,
                         int nodes = 16);

// Exact gradients of the discrete functionals.
std::vector<Vec3> grad_dirichlet(const SurfaceMap& u);
std::vector<Vec3> grad_volume(const SurfaceMap& u);
std::vector<Vec3> grad_q(const SurfaceMap& u, const AnisotropyField& field,
                         int nodes = 16);

// Lumped-mass-inverse weighted norm of grad E - lambda grad V; zero exactly
// at discrete critical points of the constrained problem.
double el_residual(const SurfaceMap& u, const AnisotropyField& field,
                   double lambda, int nodes = 16);

// Scale-invariant per-face deviation from conformality, area-weighted mean of
// (sigma1 - sigma2)^2 / (sigma1^2 + sigma2^2) in [0, 1].
double conformality_defect(const SurfaceMap& u);

// d/ds Q(su) = s^2 sum_f K(s c_f) c_f . A_f.
double radial_q_derivative(const SurfaceMap& u, const AnisotropyField& field,
                           double s, int nodes = 16);

struct SteffenReport {
  double q_abs = 0.0;           // |Q_t(u)|
  double steffen_bound = 0.0;   // ||K_t||_inf D^{3/2} / S^{3/2}
  double qk_bound = 0.0;        // ||Q_K||_inf D
  double k_sup = 0.0;           // sampled sup of |K_t|
  double q_sup = 0.0;           // sampled sup of |Q_K|
  bool holds = false;
  uint64_t seed = 0;
};

SteffenReport steffen_bound_check(const SurfaceMap& u,
                                  const AnisotropyField& field, double t_scale,
                                  uint64_t seed = 1234);

}  // namespace isocap
