#pragma once

#include <koranyi/ball.hpp>
#include <koranyi/measure_json.hpp>
#include <koranyi/uniformity.hpp>

#include <string>
#include <vector>

// Report assembly for the batch front end.  Every command's outcome is packed
// into an insertion-ordered JSON document that embeds the fully resolved
// configuration, so a report is self-describing.  No wall-clock data is ever
// recorded: identical configuration and seed must produce byte-identical
// output.  The CSV view prints numbers through the same shortest round-trip
// encoder as the JSON dump, so it is byte-stable too.

namespace koranyi {

inline constexpr const char* tool_name = "koranyi-lab";
inline constexpr const char* tool_version = "1.0.0";

inline ordered_json ball_estimate_to_json(const BallEstimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["abs_error"] = e.abs_error;
  j["method"] = ball_method_name(e.method);
  j["evaluations"] = e.evaluations;
  j["converged"] = e.converged;
  return j;
}

inline ordered_json uniformity_to_json(const UniformityReport& rep) {
  ordered_json j;
  j["verdict"] = verdict_name(rep.verdict);
  j["max_rel_deviation"] = rep.max_rel_deviation;
  j["error_budget"] = rep.error_budget;
  j["fitted_exponent"] = rep.fitted_exponent;
  j["fitted_constant"] = rep.fitted_constant;
  j["fit_residual"] = rep.fit_residual;
  ordered_json pts = ordered_json::array();
  for (const auto& p : rep.points) pts.push_back(point_to_json(p));
  j["points"] = std::move(pts);
  j["radii"] = rep.radii;
  ordered_json values = ordered_json::array();
  for (const auto& row : rep.values) {
    ordered_json vr = ordered_json::array();
    for (const auto& est : row) vr.push_back(ball_estimate_to_json(est));
    values.push_back(std::move(vr));
  }
  j["values"] = std::move(values);
  return j;
}

inline ordered_json density_to_json(const DensityEstimate& d) {
  ordered_json j;
  j["point"] = point_to_json(d.point);
  j["s"] = d.s;
  j["upper"] = d.upper;
  j["lower"] = d.lower;
  j["trend"] = d.trend;
  j["converged"] = d.converged;
  j["radii"] = d.radii_used;
  j["ratios"] = d.ratios;
  return j;
}

// ---------------------------------------------------------------------------
// Plot tables: the flat (point_index, r, value, abs_error) view of profile
// data, in stable point-major order.

struct PlotRow {
  int point_index = 0;
  double r = 0.0;
  double value = 0.0;
  double abs_error = 0.0;
};

inline std::vector<PlotRow> plot_rows(const UniformityReport& rep) {
  std::vector<PlotRow> rows;
  for (std::size_t p = 0; p < rep.values.size(); ++p)
    for (std::size_t i = 0; i < rep.values[p].size(); ++i)
      rows.push_back({static_cast<int>(p), rep.radii[i], rep.values[p][i].value,
                      rep.values[p][i].abs_error});
  return rows;
}

inline ordered_json plot_to_json(const std::vector<PlotRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json j;
    j["point_index"] = row.point_index;
    j["r"] = row.r;
    j["value"] = row.value;
    j["abs_error"] = row.abs_error;
    arr.push_back(std::move(j));
  }
  return arr;
}

/// CSV rendering of a report's "plot" array.  Reports without plot data are
/// refused (not every command produces profile rows).
inline std::string emit_plot_table(const ordered_json& report) {
  if (!report.contains("plot") || !report.at("plot").is_array())
    throw spec_error("emit_plot_table: report carries no plot table");
  std::string out = "point_index,r,value,abs_error\n";
  for (const auto& row : report.at("plot")) {
    out += row.at("point_index").dump();
    out += ',';
    out += row.at("r").dump();
    out += ',';
    out += row.at("value").dump();
    out += ',';
    out += row.at("abs_error").dump();
    out += '\n';
  }
  return out;
}

/// Convergence across every estimate in a scan: drives the --strict exit.
inline bool report_converged(const UniformityReport& rep) {
  for (const auto& row : rep.values)
    for (const auto& est : row)
      if (!est.converged) return false;
  return true;
}

}  // namespace koranyi
