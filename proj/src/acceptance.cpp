#include "isocap/acceptance.hpp"

#include "isocap/lab.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace isocap {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SurfaceMap random_test_surface(std::shared_ptr<const SphereMesh> mesh,
                               std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SurfaceMap u;
  u.mesh = mesh;
  u.positions.resize(mesh->vertex_count());
  int k = kind(rng);
  double ax = 0.5 + 1.5 * unif(rng);
  double ay = 0.5 + 1.5 * unif(rng);
  double az = 0.5 + 1.5 * unif(rng);
  double amp = 0.02 + 0.2 * unif(rng);
  double fx = 1.0 + 3.0 * unif(rng), fy = 1.0 + 3.0 * unif(rng);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  for (int i = 0; i < mesh->vertex_count(); ++i) {
    const Vec3& v = mesh->vertices[i];
    switch (k) {
      case 0:  // perturbed sphere
        u.positions[i] = (1.0 + jitter(rng)) * v;
        break;
      case 1:  // ellipsoid
        u.positions[i] = Vec3(ax * v.x(), ay * v.y(), az * v.z());
        break;
      default:  // bumpy sphere
        u.positions[i] =
            (1.0 + amp * std::sin(fx * v.x() * 4.0) *
                       std::cos(fy * v.y() * 4.0)) *
            v;
    }
  }
  return u;
}

struct Harness {
  std::ostream& log;
  std::vector<CriterionResult> results;

  void run(int id, const std::string& name,
           const std::function<bool(std::ostringstream&)>& body) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    std::ostringstream detail;
    auto t0 = Clock::now();
    try {
      r.pass = body(detail);
    } catch (const std::exception& e) {
      r.pass = false;
      detail << " exception: " << e.what();
    }
    r.seconds = seconds_since(t0);
    r.detail = detail.str();
    log << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << " ("
        << name << "): " << r.detail << " [" << r.seconds << " s]\n";
    log.flush();
    results.push_back(r);
  }
};

}  // namespace

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

std::vector<CriterionResult> run_acceptance(std::ostream& log) {
  auto suite_start = Clock::now();
  Harness h{log, {}};

  auto mesh5 = build_icosphere(5);
  auto mesh4 = build_icosphere(4);
  const double S = kIsoperimetricS;

  h.run(1, "sphere closed forms", [&](std::ostringstream& out) {
    auto unit = [&](int level) {
      SurfaceMap u;
      u.mesh = build_icosphere(level);
      u.positions = u.mesh->vertices;
      return u;
    };
    SurfaceMap u5 = unit(5);
    double d_err = std::abs(dirichlet(u5) - 4.0 * kPi) / (4.0 * kPi);
    double a_err = std::abs(area(u5) - 4.0 * kPi) / (4.0 * kPi);
    double v_err =
        std::abs(std::abs(volume(u5)) - 4.0 * kPi / 3.0) / (4.0 * kPi / 3.0);
    double a_err4 = std::abs(area(unit(4)) - 4.0 * kPi) / (4.0 * kPi);
    double shrink = a_err4 / a_err;
    out << "rel errors D=" << d_err << " A=" << a_err << " |V|=" << v_err
        << " level-4to5 shrink=" << shrink;
    return d_err <= 1e-3 && a_err <= 1e-3 && v_err <= 1e-3 && shrink > 2.5 &&
           shrink < 6.0;
  });

  h.run(2, "isoperimetric inequality suite", [&](std::ostringstream& out) {
    std::mt19937_64 rng(42);
    double worst_iso = 0.0, worst_ad = 0.0;
    for (int i = 0; i < 200; ++i) {
      SurfaceMap u = random_test_surface(mesh5, rng);
      double a = area(u), d = dirichlet(u), v = std::abs(volume(u));
      worst_iso = std::max(worst_iso, S * std::pow(v, 2.0 / 3.0) / a);
      worst_ad = std::max(worst_ad, a / d);
    }
    out << "max S|V|^{2/3}/A=" << worst_iso << " max A/D=" << worst_ad;
    return worst_iso <= 1.005 && worst_ad <= 1.005;
  });

  h.run(3, "gradient checks", [&](std::ostringstream& out) {
    auto mesh3 = build_icosphere(3);
    auto field = make_radial_well(1.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double step = 1e-5;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      SurfaceMap u = random_test_surface(mesh3, rng);
      std::vector<Vec3> phi(u.positions.size());
      for (auto& p : phi) p = Vec3(unif(rng), unif(rng), unif(rng));
      auto directional = [&](auto&& fn, const std::vector<Vec3>& grad) {
        SurfaceMap up = u, um = u;
        for (size_t i = 0; i < phi.size(); ++i) {
          up.positions[i] += step * phi[i];
          um.positions[i] -= step * phi[i];
        }
        double fd = (fn(up) - fn(um)) / (2.0 * step);
        double an = 0.0;
        for (size_t i = 0; i < phi.size(); ++i) an += grad[i].dot(phi[i]);
        return std::abs(fd - an) / std::max(1e-12, std::abs(an));
      };
      worst = std::max(worst, directional([](const SurfaceMap& s) {
                         return dirichlet(s);
                       }, grad_dirichlet(u)));
      worst = std::max(worst, directional([](const SurfaceMap& s) {
                         return volume(s);
                       }, grad_volume(u)));
      worst = std::max(worst, directional([&](const SurfaceMap& s) {
                         return q_term(s, field);
                       }, grad_q(u, field)));
    }
    // radial derivative identity
    double worst_radial = 0.0;
    SurfaceMap u = random_test_surface(mesh3, rng);
    for (double s : {0.5, 1.0, 2.0}) {
      auto scale_q = [&](double sv) {
        SurfaceMap su = u;
        for (auto& p : su.positions) p *= sv;
        return q_term(su, field);
      };
      double fd = (scale_q(s + step) - scale_q(s - step)) / (2.0 * step);
      double an = radial_q_derivative(u, field, s);
      worst_radial =
          std::max(worst_radial, std::abs(fd - an) / std::abs(an));
    }
    out << "max grad rel err=" << worst << " radial rel err=" << worst_radial;
    return worst <= 1e-6 && worst_radial <= 1e-6;
  });

  h.run(4, "Q_K construction identities", [&](std::ostringstream& out) {
    auto field = make_radial_well(0.5);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    double worst_trace = 0.0, worst_bound = 0.0;
    const double k0 = 0.25;  // a/2
    for (int i = 0; i < 200; ++i) {
      Vec3 p(unif(rng), unif(rng), unif(rng));
      worst_trace = std::max(
          worst_trace, std::abs(jacobian_QK(field, p).trace() - field.eval(p)));
      worst_bound = std::max(worst_bound, eval_QK(field, p).norm());
    }
    SurfaceMap sphere = init_sphere(mesh5, 4.0 * kPi / 3.0);
    double q = q_term(sphere, field);
    double closed_form = -4.0 * kPi * 0.5 * (1.0 - kPi / 4.0);
    double q_err = std::abs(q - closed_form) / std::abs(closed_form);
    out << "max |tr J - K|=" << worst_trace << " sup |Q_K|=" << worst_bound
        << " q_term rel err=" << q_err;
    return worst_trace <= 1e-9 && worst_bound <= k0 / 2.0 + 1e-12 &&
           q_err <= 1e-3;
  });

  auto zero = make_zero_field();
  SolverConfig cfg;

  h.run(5, "K = 0 solver closed forms", [&](std::ostringstream& out) {
    bool ok = true;
    for (double t : {0.5, 4.0 * kPi / 3.0, 10.0}) {
      auto t0 = Clock::now();
      double floor_defect = conformality_defect(init_sphere(mesh5, t));
      SolveResult res = minimize_isovolumetric(mesh5, zero, t, cfg);
      double secs = seconds_since(t0);
      double target = S * std::pow(t, 2.0 / 3.0);
      double e_err = std::abs(res.breakdown.energy_E - target) / target;
      double lam_star = (2.0 / 3.0) * S / std::cbrt(t);
      double lam_err = std::abs(res.lambda - lam_star) / lam_star;
      double defect = res.breakdown.conformality_defect;
      bool row = res.status == SolveStatus::converged && e_err <= 0.01 &&
                 lam_err <= 0.10 && defect <= 2.0 * floor_defect + 1e-6 &&
                 secs < 120.0;
      out << " t=" << t << ": e_err=" << e_err << " lam_err=" << lam_err
          << " defect=" << defect << " (" << secs << "s)"
          << (row ? "" : " <-- fail");
      ok = ok && row;
    }
    return ok;
  });

  auto well = make_radial_well(0.5);
  const double k0_well = 0.25;  // sup |K p| = a/2

  h.run(6, "existence regime, radial well", [&](std::ostringstream& out) {
    double t = 4.0 * kPi / 3.0;
    SolveResult res = minimize_isovolumetric(mesh5, well, t, cfg);
    double trial_bound = 4.0 * kPi - 4.0 * kPi * 0.5 * (1.0 - kPi / 4.0);
    auto [lo, hi] = multiplier_bounds(t, 2.0 * k0_well);
    double e = res.breakdown.energy_E;
    out << "E=" << e << " trial=" << trial_bound
        << " S t^{2/3}=" << S * std::pow(t, 2.0 / 3.0)
        << " lambda=" << res.lambda << " bounds=[" << lo << "," << hi << "]";
    return res.status == SolveStatus::converged &&
           e <= trial_bound * 1.01 && e < S * std::pow(t, 2.0 / 3.0) &&
           res.lambda >= lo * 0.85 && res.lambda <= hi * 1.15;
  });

  SolverConfig scan_cfg = cfg;
  ScanTable scan;

  h.run(7, "derivative identity on scan", [&](std::ostringstream& out) {
    scan = scan_isovolumetric(well, log_grid(0.05, 50.0, 25), 4, scan_cfg);
    auto rep = derivative_identity_check(scan);
    out << "rows=" << scan.rows.size()
        << " median |lam - dS/dt|/lam=" << rep.median_rel_deviation;
    return rep.median_rel_deviation <= 0.10;
  });

  h.run(8, "isoperimetric ratio minimization", [&](std::ostringstream& out) {
    auto rr = minimize_isoperimetric_ratio(well, log_grid(0.3, 30.0, 9), 4,
                                           scan_cfg);
    out << "t0=" << rr.t0 << " S_K=" << rr.S_K_const
        << " window=[" << 0.75 * S << "," << S << "]"
        << " multiplier identity res=" << rr.multiplier_identity_residual;
    return rr.S_K_const >= 0.75 * S && rr.S_K_const <= S &&
           rr.multiplier_identity_residual <= 0.10;
  });

  h.run(9, "gluing concavity", [&](std::ostringstream& out) {
    SurfaceMap u1 = init_sphere(mesh4, 4.0 * kPi / 3.0);
    SurfaceMap u2 = init_sphere(mesh4, 4.0 * kPi / 3.0);
    auto rep = gluing_concavity(well, u1, u2, 41);
    out << "c=" << rep.concavity_c
        << " max volume drift=" << rep.max_volume_drift
        << " f' diverges=" << rep.fprime_diverges;
    return rep.concave && rep.concavity_c > 0.0 &&
           rep.max_volume_drift <= 1e-12 * (8.0 * kPi / 3.0) &&
           rep.fprime_diverges;
  });

  h.run(10, "nonexistence probe", [&](std::ostringstream& out) {
    double t = -(4.0 * kPi / 3.0) * 1e-3;
    SolverConfig probe_cfg = cfg;
    probe_cfg.max_iters = 1500;
    auto rep = nonexistence_probe(well, {t}, 4, probe_cfg);
    const auto& pc = rep.cases.front();
    SolveResult control = minimize_isovolumetric(mesh4, zero, t, probe_cfg);
    double control_ratio = control.breakdown.energy_E /
                           (S * std::pow(std::abs(t), 2.0 / 3.0));
    out << "status=" << to_string(pc.status)
        << " min E ratio=" << pc.min_energy_ratio
        << " monotone tail=" << pc.centroid_monotone_tail
        << " centroid=" << pc.final_centroid_norm
        << " control ratio=" << control_ratio;
    return pc.status != SolveStatus::converged && pc.energy_always_above &&
           pc.centroid_monotone_tail && pc.min_energy_ratio > 1.0 &&
           control.status == SolveStatus::converged &&
           std::abs(control_ratio - 1.0) <= 0.01;
  });

  h.run(11, "wall clock budget", [&](std::ostringstream& out) {
    double total = seconds_since(suite_start);
    out << "total=" << total << " s (budget 900)";
    return total < 900.0;
  });

  return h.results;
}

}  // namespace isocap
