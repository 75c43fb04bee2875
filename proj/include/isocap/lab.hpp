#pragma once

#include "isocap/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace isocap {

struct ScanRow {
  double t = 0.0;
  double S_K_value = 0.0;  // converged energy E = D + Q
  double lambda = 0.0;
  double dirichlet = 0.0;
  double q_term = 0.0;
  double residual = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  double gap = 0.0;         // S t^{2/3} - S_K_value
  double normalized = 0.0;  // t^{-2/3} S_K_value
};

struct ScanTable {
  std::vector<ScanRow> rows;  // sorted by t
  std::string field_label;
  int level = 0;
  SolverConfig config;
  uint64_t seed = 0;
};

std::vector<double> log_grid(double t_min, double t_max, int points);

// One constrained solve per grid value; failures are recorded per row and
// never abort the scan. Initial centers are searched over `centers` by the
// sphere-trial energy.
ScanTable scan_isovolumetric(const AnisotropyField& field,
                             const std::vector<double>& t_grid, int level,
                             const SolverConfig& config,
                             const std::vector<Vec3>& centers = {Vec3::Zero()});

struct DerivativeReport {
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> fd_derivative;
  std::vector<double> rel_deviation;
  double median_rel_deviation = 0.0;
};

// Central finite differences of S_K along the grid against the multiplier
// column. Needs at least 3 consecutive converged rows.
DerivativeReport derivative_identity_check(const ScanTable& table);

struct RatioResult {
  double t0 = 0.0;
  double S_K_const = 0.0;  // t0^{-2/3} F at the minimizer
  double lambda = 0.0;
  double multiplier_identity_residual = 0.0;  // |lam - (2/3) S_K t0^{-1/3}|/lam
  bool field_nonpositive = true;
  SurfaceMap surface;
  ScanTable scan;
};

RatioResult minimize_isoperimetric_ratio(const AnisotropyField& field,
                                         const std::vector<double>& t_grid,
                                         int level, const SolverConfig& config);

struct GluingReport {
  std::vector<double> s;
  std::vector<double> f;            // E(v^s), additively over the two bubbles
  std::vector<double> second_diff;  // centered, interior points
  std::vector<double> total_volume;
  double concavity_c = 0.0;  // -max second difference
  bool concave = false;
  double max_volume_drift = 0.0;  // max |V(v^s) - (t1+t2)|
  bool fprime_diverges = false;   // +inf near 0, -inf near the right end
};

// The two bubbles live on separate meshes; energies and volumes add.
GluingReport gluing_concavity(const AnisotropyField& field,
                              const SurfaceMap& u1, const SurfaceMap& u2,
                              int grid_points = 41);

struct SubadditivityCase {
  double t1 = 0.0, t2 = 0.0;
  double slack = 0.0;  // S_K(t1) + S_K(t2) - S_K(t1 + t2)
  bool holds = false;  // slack >= -1% of S_K(t1 + t2)
};

struct SubadditivityReport {
  std::vector<SubadditivityCase> cases;
  bool all_hold = false;
};

SubadditivityReport subadditivity_check(
    const ScanTable& table, const std::vector<std::pair<double, double>>& pairs);

struct ProbeCase {
  double t = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  double min_energy_ratio = 0.0;  // min E / (S |t|^{2/3}) over iterates
  bool energy_always_above = false;
  bool centroid_monotone_tail = false;  // last 50% of iterations
  double final_centroid_norm = 0.0;
};

struct ProbeReport {
  std::vector<ProbeCase> cases;
};

ProbeReport nonexistence_probe(const AnisotropyField& field,
                               const std::vector<double>& t_list, int level,
                               const SolverConfig& config);

// Serialization. CSV round-trips bit-identically (%.17g columns).
void write_scan_csv(const ScanTable& table, const std::string& path);
ScanTable read_scan_csv(const std::string& path);
std::string solve_result_to_json(const SolveResult& result);
void write_solve_result_json(const SolveResult& result,
                             const std::string& path);
std::string field_check_report_to_json(const FieldCheckReport& report);

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f6fb2";
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, bool log_x = false);

}  // namespace isocap
