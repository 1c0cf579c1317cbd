#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gblab/common.hpp"
#include "gblab/experiments.hpp"
#include "gblab/toml.hpp"

namespace gblab::config {

struct OutputConfig {
  std::string format = "json";  // "json" or "csv"
  std::string path;             // empty -> stdout only
};

/// Fully resolved run description: one experiment spec, an optional decay
/// ladder, and the plumbing (workers, cache directory, output routing).
struct RunConfig {
  experiments::ExperimentSpec spec;
  std::vector<u64> decay_ladder;  // empty -> single run
  OutputConfig output;
  unsigned workers = 1;
  std::string cache_dir;
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"run", {"kind", "workers", "seed", "cache_dir"}},
      {"geometry", {"X1", "X2", "Y", "Y1", "Y2", "R", "n"}},
      {"moduli", {"Q", "Q1", "Q2", "a", "a1", "a2"}},
      {"options", {"weighted", "max_over_a", "a_display", "pmax"}},
      {"lemma", {"M", "N", "trials"}},
      {"decay", {"ladder"}},
      {"output", {"format", "path"}},
  };
  return s;
}

inline void check_unknown(const toml::Document& doc) {
  const auto& s = schema();
  for (const auto& [table, keys] : doc.tables) {
    auto it = s.find(table);
    if (it == s.end()) {
      int line = keys.empty() ? 0 : keys.begin()->second.line;
      reject("config: unknown table '[" + table + "]'" +
             (line ? " (near line " + std::to_string(line) + ")" : ""));
    }
    for (const auto& [key, value] : keys) {
      if (!it->second.count(key))
        reject("config: unknown key '" + table + "." + key + "' at line " +
               std::to_string(value.line));
    }
  }
}

inline const toml::Value* find(const toml::Document& doc,
                               const std::string& table,
                               const std::string& key) {
  auto t = doc.tables.find(table);
  if (t == doc.tables.end()) return nullptr;
  auto k = t->second.find(key);
  if (k == t->second.end()) return nullptr;
  return &k->second;
}

}  // namespace detail

/// Builds a RunConfig from parsed TOML, rejecting unknown tables/keys with
/// their source line.  Numeric preconditions are left to the module the run
/// dispatches into, so rejects carry the owning operation's message.
inline RunConfig from_document(const toml::Document& doc) {
  detail::check_unknown(doc);
  RunConfig rc;

  const toml::Value* kind = detail::find(doc, "run", "kind");
  if (!kind) reject("config: missing required key 'run.kind'");
  const std::string kind_name = kind->as_string("run.kind");
  auto parsed = experiments::kind_from_name(kind_name);
  if (!parsed)
    reject("config: unknown kind '" + kind_name + "' at line " +
           std::to_string(kind->line));
  rc.spec.kind = *parsed;

  if (const auto* v = detail::find(doc, "run", "workers"))
    rc.workers = static_cast<unsigned>(v->as_uint("run.workers"));
  if (const auto* v = detail::find(doc, "run", "seed"))
    rc.spec.seed = v->as_uint("run.seed");
  if (const auto* v = detail::find(doc, "run", "cache_dir"))
    rc.cache_dir = v->as_string("run.cache_dir");

  auto geo = [&](const char* key, u64* out) {
    if (const auto* v = detail::find(doc, "geometry", key))
      *out = v->as_uint(std::string("geometry.") + key);
  };
  geo("X1", &rc.spec.X1);
  geo("X2", &rc.spec.X2);
  geo("Y", &rc.spec.Y);
  geo("Y1", &rc.spec.Y1);
  geo("Y2", &rc.spec.Y2);
  geo("R", &rc.spec.R);
  geo("n", &rc.spec.n);

  auto mod_u = [&](const char* key, u64* out) {
    if (const auto* v = detail::find(doc, "moduli", key))
      *out = v->as_uint(std::string("moduli.") + key);
  };
  auto mod_i = [&](const char* key, i64* out) {
    if (const auto* v = detail::find(doc, "moduli", key))
      *out = v->as_int(std::string("moduli.") + key);
  };
  mod_u("Q", &rc.spec.Q);
  mod_u("Q1", &rc.spec.Q1);
  mod_u("Q2", &rc.spec.Q2);
  mod_i("a", &rc.spec.a);
  mod_i("a1", &rc.spec.a1);
  mod_i("a2", &rc.spec.a2);

  if (const auto* v = detail::find(doc, "options", "weighted"))
    rc.spec.weighted = v->as_bool("options.weighted");
  if (const auto* v = detail::find(doc, "options", "max_over_a"))
    rc.spec.max_over_a = v->as_bool("options.max_over_a");
  if (const auto* v = detail::find(doc, "options", "a_display"))
    rc.spec.a_display = v->as_float("options.a_display");
  if (const auto* v = detail::find(doc, "options", "pmax"))
    rc.spec.pmax = v->as_uint("options.pmax");

  if (const auto* v = detail::find(doc, "lemma", "M"))
    rc.spec.M = v->as_uint("lemma.M");
  if (const auto* v = detail::find(doc, "lemma", "N"))
    rc.spec.N = v->as_uint("lemma.N");
  if (const auto* v = detail::find(doc, "lemma", "trials"))
    rc.spec.trials = v->as_uint("lemma.trials");

  if (const auto* v = detail::find(doc, "decay", "ladder")) {
    for (i64 y : v->as_int_array("decay.ladder")) {
      if (y <= 0)
        reject("config: decay.ladder entries must be positive (line " +
               std::to_string(v->line) + ")");
      rc.decay_ladder.push_back(static_cast<u64>(y));
    }
  }

  if (const auto* v = detail::find(doc, "output", "format")) {
    rc.output.format = v->as_string("output.format");
    if (rc.output.format != "json" && rc.output.format != "csv")
      reject("config: output.format must be \"json\" or \"csv\" (line " +
             std::to_string(v->line) + ")");
  }
  if (const auto* v = detail::find(doc, "output", "path"))
    rc.output.path = v->as_string("output.path");

  return rc;
}

inline RunConfig load(const std::string& path) {
  return from_document(toml::parse_file(path));
}

}  // namespace gblab::config
