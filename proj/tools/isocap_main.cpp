#include "isocap/acceptance.hpp"
#include "isocap/lab.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>

namespace fs = std::filesystem;
using namespace isocap;

namespace {

struct CommonOptions {
  std::string field_label = "radial_well";
  double a = 0.5;
  std::vector<double> p0 = {0.0, 0.0, 0.0};
  int level = 5;
  std::string out_dir = ".";
  SolverConfig solver;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--field", opt.field_label,
                  "field label (zero, radial_well, shifted_well, cone_sign, "
                  "ball_sign)");
  cmd->add_option("--a", opt.a, "field strength parameter");
  cmd->add_option("--field-center", opt.p0, "shifted well center x,y,z")
      ->expected(3);
  cmd->add_option("--level", opt.level, "icosphere subdivision level");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--max-iters", opt.solver.max_iters);
  cmd->add_option("--residual-tol", opt.solver.residual_tol);
  cmd->add_option("--step-size", opt.solver.step_size);
  cmd->add_option("--smooth-every", opt.solver.smooth_every);
  cmd->add_option("--escape-radius", opt.solver.escape_radius);
  cmd->add_option("--seed", opt.solver.seed);
}

AnisotropyField build_field(const CommonOptions& opt) {
  std::map<std::string, double> params{{"a", opt.a},
                                       {"x0", opt.p0[0]},
                                       {"y0", opt.p0[1]},
                                       {"z0", opt.p0[2]}};
  return make_field(opt.field_label, params);
}

std::string out_path(const CommonOptions& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

void write_history_csv(const SolveResult& res, const std::string& path) {
  std::ofstream os(path);
  os << "iter,energy,volume_drift,residual,centroid_norm,step\n";
  os.precision(17);
  for (const auto& r : res.history)
    os << r.iter << ',' << r.energy << ',' << r.volume_drift << ','
       << r.residual << ',' << r.centroid_norm << ',' << r.step << "\n";
}

void emit_scan_outputs(const ScanTable& table, const CommonOptions& opt,
                       double k0) {
  write_scan_csv(table, out_path(opt, "scan.csv"));
  SvgSeries sk{"S_K(t)", {}, {}, "#1f6fb2"};
  SvgSeries s0{"S t^{2/3}", {}, {}, "#c23b22"};
  SvgSeries tilde{"normalized S_K", {}, {}, "#1f6fb2"};
  SvgSeries lam{"lambda(t)", {}, {}, "#1f6fb2"};
  SvgSeries lam_lo{"lower bound", {}, {}, "#777777"};
  SvgSeries lam_hi{"upper bound", {}, {}, "#777777"};
  for (const auto& r : table.rows) {
    if (r.status != SolveStatus::converged || r.t <= 0) continue;
    sk.x.push_back(r.t);
    sk.y.push_back(r.S_K_value);
    s0.x.push_back(r.t);
    s0.y.push_back(kIsoperimetricS * std::pow(r.t, 2.0 / 3.0));
    tilde.x.push_back(r.t);
    tilde.y.push_back(r.normalized);
    lam.x.push_back(r.t);
    lam.y.push_back(r.lambda);
    auto [lo, hi] = multiplier_bounds(r.t, k0);
    lam_lo.x.push_back(r.t);
    lam_lo.y.push_back(lo);
    lam_hi.x.push_back(r.t);
    lam_hi.y.push_back(hi);
  }
  write_svg_plot(out_path(opt, "plot_SK.svg"), "S_K(t) vs S t^{2/3}",
                 {sk, s0}, true);
  write_svg_plot(out_path(opt, "plot_SK_normalized.svg"),
                 "t^{-2/3} S_K(t)", {tilde}, true);
  write_svg_plot(out_path(opt, "plot_lambda.svg"),
                 "lambda(t) and multiplier bounds", {lam, lam_lo, lam_hi},
                 true);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capillarity functionals on parametrized sphere meshes"};
  app.set_config("--config", "", "config file (ini sections)");
  app.require_subcommand(1);

  CommonOptions opt;
  double t = 4.0 * std::numbers::pi / 3.0;
  double t_min = 0.05, t_max = 50.0;
  int points = 25;
  double t1 = 4.0 * std::numbers::pi / 3.0, t2 = 4.0 * std::numbers::pi / 3.0;
  std::vector<double> center = {0.0, 0.0, 0.0};

  auto* solve_cmd = app.add_subcommand("solve", "single isovolumetric solve");
  add_common(solve_cmd, opt);
  solve_cmd->add_option("--t", t, "prescribed volume");
  solve_cmd->add_option("--center", center, "initial sphere center")
      ->expected(3);

  auto* scan_cmd = app.add_subcommand("scan", "scan S_K over a log t grid");
  add_common(scan_cmd, opt);
  scan_cmd->add_option("--t-min", t_min);
  scan_cmd->add_option("--t-max", t_max);
  scan_cmd->add_option("--points", points);

  auto* ratio_cmd =
      app.add_subcommand("ratio", "minimize the isoperimetric ratio");
  add_common(ratio_cmd, opt);
  ratio_cmd->add_option("--t-min", t_min);
  ratio_cmd->add_option("--t-max", t_max);
  ratio_cmd->add_option("--points", points);

  auto* glue_cmd = app.add_subcommand("glue", "gluing concavity experiment");
  add_common(glue_cmd, opt);
  glue_cmd->add_option("--t1", t1);
  glue_cmd->add_option("--t2", t2);

  auto* probe_cmd = app.add_subcommand("probe", "small-volume nonexistence probe");
  add_common(probe_cmd, opt);
  probe_cmd->add_option("--t", t, "probe volume (small, typically negative)");

  auto* check_cmd = app.add_subcommand("field-check", "sample the field's bound, decay and smallness conditions");
  add_common(check_cmd, opt);

  auto* verify_cmd =
      app.add_subcommand("verify", "run the full invariant suite");
  add_common(verify_cmd, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      auto field = build_field(opt);
      auto mesh = build_icosphere(opt.level);
      SolveResult res = minimize_isovolumetric(
          mesh, field, t, opt.solver,
          init_sphere(mesh, t, Vec3(center[0], center[1], center[2])));
      write_solve_result_json(res, out_path(opt, "result.json"));
      write_obj(res.surface, out_path(opt, "surface.obj"));
      write_history_csv(res, out_path(opt, "history.csv"));
      std::cout << solve_result_to_json(res) << "\n";
      return res.status == SolveStatus::converged ? 0 : 1;
    }
    if (scan_cmd->parsed()) {
      auto field = build_field(opt);
      auto report = check_conditions(field, default_sample_spec());
      ScanTable table = scan_isovolumetric(field, log_grid(t_min, t_max, points),
                                           opt.level, opt.solver);
      emit_scan_outputs(table, opt, report.k0_estimate);
      bool ok = true;
      for (const auto& r : table.rows) {
        if (r.status != SolveStatus::converged) ok = false;
        // two-sided window with 1% slack
        double lo = (1.0 - report.k0_estimate / 2.0) *
                    kIsoperimetricS * std::pow(r.t, 2.0 / 3.0);
        double hi = kIsoperimetricS * std::pow(r.t, 2.0 / 3.0);
        if (r.S_K_value < lo * 0.99 || r.S_K_value > hi * 1.01) ok = false;
      }
      std::cout << "scan rows: " << table.rows.size()
                << (ok ? " (all within bounds)" : " (bound violation)")
                << "\n";
      return ok ? 0 : 1;
    }
    if (ratio_cmd->parsed()) {
      auto field = build_field(opt);
      auto rr = minimize_isoperimetric_ratio(
          field, log_grid(t_min, t_max, points), opt.level, opt.solver);
      emit_scan_outputs(rr.scan, opt, 0.0);
      write_obj(rr.surface, out_path(opt, "surface.obj"));
      std::cout << "t0=" << rr.t0 << " S_K=" << rr.S_K_const
                << " lambda=" << rr.lambda
                << " identity residual=" << rr.multiplier_identity_residual
                << (rr.field_nonpositive ? "" : " [warning: K > 0 somewhere]")
                << "\n";
      return rr.multiplier_identity_residual <= 0.10 ? 0 : 1;
    }
    if (glue_cmd->parsed()) {
      auto field = build_field(opt);
      auto mesh = build_icosphere(opt.level);
      auto rep = gluing_concavity(field, init_sphere(mesh, t1),
                                  init_sphere(mesh, t2), 41);
      SvgSeries fs_{"f(s)", rep.s, rep.f, "#1f6fb2"};
      write_svg_plot(out_path(opt, "plot_gluing.svg"),
                     "gluing energy f(s)", {fs_});
      std::cout << "concavity c=" << rep.concavity_c
                << " volume drift=" << rep.max_volume_drift << "\n";
      return rep.concave ? 0 : 1;
    }
    if (probe_cmd->parsed()) {
      auto field = build_field(opt);
      auto rep = nonexistence_probe(field, {t}, opt.level, opt.solver);
      const auto& pc = rep.cases.front();
      std::cout << "status=" << to_string(pc.status)
                << " min E ratio=" << pc.min_energy_ratio
                << " centroid=" << pc.final_centroid_norm << "\n";
      return (pc.status != SolveStatus::converged && pc.energy_always_above)
                 ? 0
                 : 1;
    }
    if (check_cmd->parsed()) {
      auto field = build_field(opt);
      auto report = check_conditions(field, default_sample_spec());
      std::ofstream os(out_path(opt, "field_check.json"));
      os << field_check_report_to_json(report) << "\n";
      std::cout << field_check_report_to_json(report) << "\n";
      return 0;
    }
    if (verify_cmd->parsed()) {
      auto results = run_acceptance(std::cout);
      return all_pass(results) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
