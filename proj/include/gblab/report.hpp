#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "gblab/config.hpp"
#include "gblab/experiments.hpp"

namespace gblab::report {

using json = nlohmann::ordered_json;

/// Canonical decimal rendering shared by the CSV and JSON writers, so both
/// formats carry bit-identical numeric text (shortest round-trip form).
inline std::string num_str(double v) { return nlohmann::json(v).dump(); }

inline json spec_json(const experiments::ExperimentSpec& s) {
  json j;
  j["kind"] = experiments::kind_name(s.kind);
  j["X1"] = s.X1;
  j["X2"] = s.X2;
  j["Y"] = s.Y;
  j["Y1"] = s.Y1;
  j["Y2"] = s.Y2;
  j["R"] = s.R;
  j["n"] = s.n;
  j["Q"] = s.Q;
  j["Q1"] = s.Q1;
  j["Q2"] = s.Q2;
  j["a"] = s.a;
  j["a1"] = s.a1;
  j["a2"] = s.a2;
  j["weighted"] = s.weighted;
  j["max_over_a"] = s.max_over_a;
  j["a_display"] = s.a_display;
  j["pmax"] = s.pmax;
  j["M"] = s.M;
  j["N"] = s.N;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  return j;
}

/// JSON summary of one run; embeds the resolved configuration so the run is
/// reproducible from the report alone.
inline json summary_json(const experiments::ExperimentReport& rep,
                         const experiments::ExperimentSpec& spec,
                         unsigned workers) {
  json j;
  j["kind"] = experiments::kind_name(rep.kind);
  j["lhs"] = rep.lhs;
  j["main_scale"] = rep.main_scale;
  j["normalized"] = rep.normalized;
  j["L"] = rep.log_scale;
  j["a_display"] = rep.a_display;
  j["log_power_scaled"] = rep.log_power_scaled;
  j["cutoff_terms"] = rep.cutoff_terms;
  j["rows"] = rep.breakdown.size();
  j["warnings"] = rep.warnings;
  j["config"] = spec_json(spec);
  j["config"]["workers"] = workers;
  return j;
}

/// One breakdown row per outer index.
inline std::string breakdown_csv(const experiments::ExperimentReport& rep) {
  std::string out = "index,value\n";
  for (const auto& row : rep.breakdown) {
    out += std::to_string(row.index);
    out += ',';
    out += num_str(row.value);
    out += '\n';
  }
  return out;
}

inline json decay_json(const std::vector<experiments::DecayRow>& rows,
                       const experiments::ExperimentSpec& base,
                       unsigned workers) {
  json j;
  j["kind"] = experiments::kind_name(base.kind);
  json arr = json::array();
  for (const auto& r : rows) {
    json e;
    e["Y"] = r.Y;
    e["normalized"] = r.normalized;
    e["ratio_to_prev"] = r.ratio_to_prev;
    e["lhs"] = r.report.lhs;
    e["main_scale"] = r.report.main_scale;
    e["L"] = r.report.log_scale;
    e["warnings"] = r.report.warnings;
    arr.push_back(std::move(e));
  }
  j["ladder"] = std::move(arr);
  j["config"] = spec_json(base);
  j["config"]["workers"] = workers;
  return j;
}

inline std::string decay_csv(const std::vector<experiments::DecayRow>& rows) {
  std::string out = "Y,normalized,ratio_to_prev\n";
  for (const auto& r : rows) {
    out += std::to_string(r.Y);
    out += ',';
    out += num_str(r.normalized);
    out += ',';
    out += num_str(r.ratio_to_prev);
    out += '\n';
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) reject("report: cannot open '" + path + "' for writing");
  out << content;
  if (!out) reject("report: write failed for '" + path + "'");
}

}  // namespace gblab::report
