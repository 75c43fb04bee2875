#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace isocap {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Prescribed scalar field K with its gradient. Evaluators are pure and
// reentrant.
struct AnisotropyField {
  std::string label;
  std::map<std::string, double> params;
  std::function<double(const Vec3&)> eval;
  std::function<Vec3(const Vec3&)> grad;
  std::optional<double> claimed_k0;
};

AnisotropyField make_zero_field();
// K(p) = -a / (1 + |p|^2)
AnisotropyField make_radial_well(double a);
AnisotropyField make_shifted_well(double a, const Vec3& p0);
// Negative on the tail of a cone along +z, zero elsewhere.
AnisotropyField make_cone_sign_field(double a);
// Negative inside the unit ball, positive outside, decaying at infinity.
AnisotropyField make_ball_sign_field(double a);

// Registry used by the CLI: label in {zero, radial_well, shifted_well,
// cone_sign, ball_sign}; params as named scalars (a, x0, y0, z0).
AnisotropyField make_field(const std::string& label,
                           const std::map<std::string, double>& params);

// Gauss-Legendre nodes/weights on [0,1], cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre01(
    int n);

// m_K(p) = int_0^1 K(sp) s^2 ds
double eval_mK(const AnisotropyField& field, const Vec3& p, int nodes = 16);
// grad of m_K: int_0^1 grad K(sp) s^3 ds
Vec3 grad_mK(const AnisotropyField& field, const Vec3& p, int nodes = 16);
// Q_K(p) = m_K(p) p
Vec3 eval_QK(const AnisotropyField& field, const Vec3& p, int nodes = 16);
// Jacobian m_K I + p (grad m_K)^T; trace equals K(p) (div Q_K = K).
Mat3 jacobian_QK(const AnisotropyField& field, const Vec3& p, int nodes = 16);

Vec3 eval_G0(const AnisotropyField& field, const Vec3& p);  // K(p) p
Vec3 eval_G1(const AnisotropyField& field, const Vec3& p);  // (grad K . p) p

struct SampleSpec {
  std::vector<double> radii;       // shells to sample
  int directions_per_radius = 64;
  uint64_t seed = 1234;
};
SampleSpec default_sample_spec();

struct FieldCheckReport {
  double k0_estimate = 0.0;  // sup |K(p) p|
  std::vector<std::pair<double, double>> k2_decay;  // (radius, sup |K p|)
  double k3_estimate = 0.0;  // sup |(grad K . p) p|
  bool k4_holds = false;
  SampleSpec spec;
};

// The smallness condition 2^{2/3} (2 + k0) < (2 - k0)^2.
bool k4_condition_holds(double k0);

FieldCheckReport check_conditions(const AnisotropyField& field,
                                  const SampleSpec& spec);

struct BallQuadratureSpec {
  int radial_nodes = 32;
  int polar_nodes = 24;
  int azimuth_nodes = 48;
};

// Integral of K over the ball B_radius(center).
double ball_integral(const AnisotropyField& field, const Vec3& center,
                     double radius, const BallQuadratureSpec& spec = {});

// sup over the searched (center, radius) grid of 4 pi r^3 / 3 such that
// K <= 0 on samples of the ball and K < 0 somewhere inside. Returns +inf when
// the largest searched radius qualifies, 0 when none does.
double estimate_t_plus(const AnisotropyField& field,
                       const std::vector<Vec3>& centers,
                       const std::vector<double>& radii,
                       int samples_per_ball = 512, uint64_t seed = 1234);
// Same with K >= 0; returns -(4 pi r^3 / 3), -inf as sentinel, 0 when empty.
double estimate_t_minus(const AnisotropyField& field,
                        const std::vector<Vec3>& centers,
                        const std::vector<double>& radii,
                        int samples_per_ball = 512, uint64_t seed = 1234);

}  // namespace isocap
