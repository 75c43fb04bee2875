#include "isocap/lab.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace isocap {

using nlohmann::json;

namespace {

json breakdown_to_json(const EnergyBreakdown& b) {
  return json{{"dirichlet", b.dirichlet},
              {"area", b.area},
              {"volume", b.volume},
              {"q_term", b.q_term},
              {"energy_E", b.energy_E},
              {"capillary_F", b.capillary_F},
              {"conformality_defect", b.conformality_defect}};
}

}  // namespace

std::string solve_result_to_json(const SolveResult& result) {
  json j;
  j["status"] = to_string(result.status);
  j["lambda"] = result.lambda;
  j["residual"] = result.residual;
  j["breakdown"] = breakdown_to_json(result.breakdown);
  j["iterations"] = result.history.size();
  if (!result.history.empty()) {
    const auto& last = result.history.back();
    j["final"] = {{"energy", last.energy},
                  {"volume_drift", last.volume_drift},
                  {"centroid_norm", last.centroid_norm},
                  {"step", last.step}};
  }
  return j.dump(2);
}

void write_solve_result_json(const SolveResult& result,
                             const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << solve_result_to_json(result) << "\n";
}

std::string field_check_report_to_json(const FieldCheckReport& report) {
  json j;
  j["k0_estimate"] = report.k0_estimate;
  j["k3_estimate"] = report.k3_estimate;
  j["k4_holds"] = report.k4_holds;
  json decay = json::array();
  for (const auto& [r, v] : report.k2_decay)
    decay.push_back({{"radius", r}, {"sup_Kp", v}});
  j["k2_decay"] = decay;
  j["sample_spec"] = {{"radii_count", report.spec.radii.size()},
                      {"radius_max", report.spec.radii.empty()
                                         ? 0.0
                                         : report.spec.radii.back()},
                      {"directions_per_radius",
                       report.spec.directions_per_radius},
                      {"seed", report.spec.seed}};
  return j.dump(2);
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<SvgSeries>& series, bool log_x) {
  const int width = 720, height = 480, margin = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      double xv = log_x ? std::log10(s.x[i]) : s.x[i];
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  auto px = [&](double x) {
    double xv = log_x ? std::log10(x) : x;
    return margin + (xv - xmin) / (xmax - xmin) * (width - 2 * margin);
  };
  auto py = [&](double y) {
    return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
  };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
     << "' height='" << height << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
     << "font-family='sans-serif' font-size='15'>" << title << "</text>\n";
  os << "<line x1='" << margin << "' y1='" << height - margin << "' x2='"
     << width - margin << "' y2='" << height - margin
     << "' stroke='black'/>\n";
  os << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
     << "' y2='" << height - margin << "' stroke='black'/>\n";
  os << "<text x='" << margin - 8 << "' y='" << py(ymin)
     << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
     << ymin << "</text>\n";
  os << "<text x='" << margin - 8 << "' y='" << py(ymax)
     << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
     << ymax << "</text>\n";

  int legend_y = margin;
  for (const auto& s : series) {
    os << "<polyline fill='none' stroke='" << s.color
       << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    os << "'/>\n";
    os << "<text x='" << width - margin - 4 << "' y='" << legend_y
       << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='"
       << s.color << "'>" << s.label << "</text>\n";
    legend_y += 16;
  }
  os << "</svg>\n";
}

}  // namespace isocap
