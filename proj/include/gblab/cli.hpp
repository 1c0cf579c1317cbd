#pragma once

// Command-line front end: one subcommand per module operation, TOML-driven
// experiment runs, and the prime-window cache manager.  Exit codes: 0 on
// success, 1 when inputs are rejected (including malformed configs and
// command lines), 2 on internal errors such as cache corruption.

#include <cstdlib>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gblab/bounds.hpp"
#include "gblab/config.hpp"
#include "gblab/experiments.hpp"
#include "gblab/finder.hpp"
#include "gblab/omega.hpp"
#include "gblab/report.hpp"
#include "gblab/singular.hpp"
#include "gblab/version.hpp"
#include "gblab/window_cache.hpp"

namespace gblab::cli {

using json = nlohmann::ordered_json;

namespace detail {

inline std::pair<u64, u64> parse_window_arg(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    reject("window must be X:Y (got '" + s + "')");
  const std::string xs = s.substr(0, colon), ys = s.substr(colon + 1);
  char* end = nullptr;
  const u64 X = std::strtoull(xs.c_str(), &end, 10);
  if (end == xs.c_str() || *end != '\0')
    reject("window base '" + xs + "' is not an unsigned integer");
  const u64 Y = std::strtoull(ys.c_str(), &end, 10);
  if (end == ys.c_str() || *end != '\0')
    reject("window length '" + ys + "' is not an unsigned integer");
  return {X, Y};
}

// Renders a flat JSON object (scalar values only) as a two-line CSV table.
// Numeric text comes from the same dump() the JSON path uses, so both
// formats carry identical digits.
inline std::string csv_of(const json& j) {
  std::string header, row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += it.key();
    row += it->is_string() ? it->get<std::string>() : it->dump();
  }
  return header + "\n" + row + "\n";
}

inline void emit_row(const json& j, const std::string& format) {
  if (format == "csv")
    std::cout << csv_of(j);
  else
    std::cout << j.dump() << "\n";
}

inline const char* truncation_name(TruncationKind k) {
  return k == TruncationKind::prime_cutoff ? "prime_cutoff" : "series_cutoff";
}

inline json singular_row(const char* kind, const SingularValue& sv) {
  json j;
  j["kind"] = kind;
  j["value"] = sv.value;
  j["truncation"] = truncation_name(sv.truncation.kind);
  j["cutoff"] = sv.truncation.cutoff;
  j["tail_bound"] = sv.tail_bound;
  return j;
}

inline std::string cache_dir_or_default(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("GBLAB_CACHE_DIR"))
    if (*env) return env;
  return "gblab-cache";
}

}  // namespace detail

/// Loads a TOML run description, executes the single run or decay ladder,
/// writes <path>.json / <path>.csv when an output path is configured, and
/// prints the selected format to stdout.
inline int run_experiment_command(const std::string& cfg_path) {
  const config::RunConfig rc = config::load(cfg_path);
  const unsigned workers = resolve_workers(rc.workers);
  json summary;
  std::string csv;
  if (!rc.decay_ladder.empty()) {
    const auto rows =
        experiments::decay_report(rc.spec, rc.decay_ladder, workers);
    summary = report::decay_json(rows, rc.spec, workers);
    csv = report::decay_csv(rows);
  } else {
    const auto rep = experiments::run_experiment(rc.spec, workers);
    summary = report::summary_json(rep, rc.spec, workers);
    csv = report::breakdown_csv(rep);
  }
  if (!rc.output.path.empty()) {
    report::write_file(rc.output.path + ".json", summary.dump(2) + "\n");
    report::write_file(rc.output.path + ".csv", csv);
  }
  if (rc.output.format == "csv")
    std::cout << csv;
  else
    std::cout << summary.dump() << "\n";
  return 0;
}

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"windowed prime experiments, singular-series constants, and "
               "sieve admissibility thresholds"};
  app.set_version_flag("--version", std::string(kVersionLine));
  app.require_subcommand(0, 1);
  int exit_code = 0;

  // ---- series ------------------------------------------------------------
  auto* series = app.add_subcommand(
      "series", "evaluate a singular series/product constant");
  struct SeriesOpts {
    std::string kind;
    std::string format = "json";
    i64 r = 2;
    u64 n = 0;
    u64 q = 1, q1 = 1, q2 = 1;
    i64 a = 0, a1 = 0, a2 = 0;
    u64 pmax = kDefaultPrimeCutoff;
    u64 terms = kDefaultSeriesCutoff;
  };
  auto sop = std::make_shared<SeriesOpts>();
  series->add_option("--kind", sop->kind, "one of: binary, binary-series, "
                     "binary-ap, hs, ternary-one, ternary-two, "
                     "ternary-one-series, ternary-two-series")
      ->required();
  series->add_option("--r", sop->r, "even shift / pair sum");
  series->add_option("--n", sop->n, "odd ternary target");
  series->add_option("--q", sop->q, "modulus");
  series->add_option("--a", sop->a, "residue");
  series->add_option("--q1", sop->q1, "first modulus");
  series->add_option("--a1", sop->a1, "first residue");
  series->add_option("--q2", sop->q2, "second modulus");
  series->add_option("--a2", sop->a2, "second residue");
  series->add_option("--pmax", sop->pmax, "Euler-product prime cutoff");
  series->add_option("--terms", sop->terms, "series term cutoff");
  series->add_option("--format", sop->format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  series->callback([sop]() {
    SingularValue sv;
    if (sop->kind == "binary")
      sv = binary_sing(sop->r, sop->pmax);
    else if (sop->kind == "binary-series")
      sv = binary_sing_series(sop->r, sop->terms);
    else if (sop->kind == "binary-ap")
      sv = binary_sing_ap(sop->r, sop->q, sop->a, sop->pmax);
    else if (sop->kind == "hs")
      sv = hs_series(sop->r, sop->q, sop->a, sop->terms);
    else if (sop->kind == "ternary-one")
      sv = ternary_one_ap(sop->n, sop->q, sop->a, sop->pmax);
    else if (sop->kind == "ternary-two")
      sv = ternary_two_ap(sop->n, sop->q1, sop->a1, sop->q2, sop->a2, sop->pmax);
    else if (sop->kind == "ternary-one-series")
      sv = ternary_one_ap_series(sop->n, sop->q, sop->a, sop->terms);
    else if (sop->kind == "ternary-two-series")
      sv = ternary_two_ap_series(sop->n, sop->q1, sop->a1, sop->q2, sop->a2,
                                 sop->terms);
    else
      reject("series: unknown kind '" + sop->kind + "'");
    detail::emit_row(detail::singular_row(sop->kind.c_str(), sv), sop->format);
  });

  // ---- omega -------------------------------------------------------------
  auto* om = app.add_subcommand(
      "omega", "exact sieve density omega(d) or the xi main-term constant");
  struct OmegaOpts {
    u64 d = 0, n = 0;
    bool xi = false;
    double x1 = 0, x2 = 0, y = 0;
    u64 pmax = kDefaultPrimeCutoff;
    std::string format = "json";
  };
  auto oop = std::make_shared<OmegaOpts>();
  om->add_option("--d", oop->d, "squarefree odd modulus");
  om->add_option("--n", oop->n, "ternary target");
  om->add_flag("--xi", oop->xi, "evaluate xi(X1, X2, Y, n) instead");
  om->add_option("--x1", oop->x1, "first window base");
  om->add_option("--x2", oop->x2, "second window base");
  om->add_option("--y", oop->y, "window length");
  om->add_option("--pmax", oop->pmax, "Euler-product prime cutoff");
  om->add_option("--format", oop->format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  om->callback([oop]() {
    json j;
    if (oop->xi) {
      const double v = omega::xi(oop->x1, oop->x2, oop->y, oop->n, oop->pmax);
      j["kind"] = "xi";
      j["x1"] = oop->x1;
      j["x2"] = oop->x2;
      j["y"] = oop->y;
      j["n"] = oop->n;
      j["value"] = v;
      j["truncation"] = "prime_cutoff";
      j["cutoff"] = oop->pmax;
      j["tail_bound"] = gblab::detail::prime_tail_bound(oop->pmax);
    } else {
      if (oop->d == 0) reject("omega: --d is required (or pass --xi)");
      const auto r = omega::omega_d(oop->d, oop->n);
      j["kind"] = "omega_d";
      j["d"] = oop->d;
      j["n"] = oop->n;
      j["numerator"] = boost::multiprecision::numerator(r).str();
      j["denominator"] = boost::multiprecision::denominator(r).str();
      j["value"] = r.convert_to<double>();
      j["tail_bound"] = 0.0;  // exact rational
    }
    detail::emit_row(j, oop->format);
  });

  // ---- experiment --------------------------------------------------------
  auto* exp = app.add_subcommand(
      "experiment", "run a mean-value experiment from a TOML config");
  auto* exp_run = exp->add_subcommand("run", "execute one configured run");
  auto cfg_path = std::make_shared<std::string>();
  exp_run->add_option("config", *cfg_path, "TOML config file")->required();
  exp_run->callback([cfg_path, &exit_code]() {
    exit_code = run_experiment_command(*cfg_path);
  });

  // ---- sieveparams -------------------------------------------------------
  auto* sp = app.add_subcommand(
      "sieveparams", "sieve admissibility constants and thresholds");
  struct SpOpts {
    u64 s = 3, s_max = 10;
    double kappa = 2.0, zeta = 0.360, mu = 4.628, nu = bounds::kDefaultNuKappa2;
    double zeta_lo = 0.05, zeta_hi = 0.95, zeta_step = 0.05;
    double theta = 0.0, theta1 = 0.861, eta = 0.0;
    i64 r_max = 9;
    bool scan = false;
  };
  auto pop = std::make_shared<SpOpts>();

  auto* sp_lambda = sp->add_subcommand("lambda", "Lambda_s constant");
  sp_lambda->add_option("--s", pop->s, "almost-prime order");
  sp_lambda->add_flag("--scan", pop->scan, "CSV over s = 1..s-max");
  sp_lambda->add_option("--s-max", pop->s_max, "scan upper bound");
  sp_lambda->callback([pop]() {
    if (pop->scan) {
      std::cout << "s,lambda\n";
      for (u64 s = 1; s <= pop->s_max; ++s)
        std::cout << s << ',' << report::num_str(bounds::lambda_s(s)) << "\n";
      return;
    }
    json j;
    j["s"] = pop->s;
    j["lambda"] = bounds::lambda_s(pop->s);
    detail::emit_row(j, "json");
  });

  auto* sp_rhs = sp->add_subcommand("rhs", "sieve upper-bound right-hand side");
  sp_rhs->add_option("--kappa", pop->kappa, "sieve dimension");
  sp_rhs->add_option("--zeta", pop->zeta, "free parameter");
  sp_rhs->add_option("--mu", pop->mu, "level exponent");
  sp_rhs->add_option("--nu", pop->nu, "sifting-limit constant");
  sp_rhs->add_flag("--scan", pop->scan, "CSV over a zeta grid");
  sp_rhs->add_option("--zeta-lo", pop->zeta_lo, "scan start");
  sp_rhs->add_option("--zeta-hi", pop->zeta_hi, "scan end");
  sp_rhs->add_option("--zeta-step", pop->zeta_step, "scan step");
  sp_rhs->callback([pop]() {
    if (pop->scan) {
      std::cout << "zeta,rhs\n";
      for (double z = pop->zeta_lo; z <= pop->zeta_hi + 1e-12;
           z += pop->zeta_step)
        std::cout << report::num_str(z) << ','
                  << report::num_str(
                         bounds::hr_rhs(pop->kappa, z, pop->mu, pop->nu))
                  << "\n";
      return;
    }
    json j;
    j["kappa"] = pop->kappa;
    j["zeta"] = pop->zeta;
    j["mu"] = pop->mu;
    j["nu"] = pop->nu;
    j["rhs"] = bounds::hr_rhs(pop->kappa, pop->zeta, pop->mu, pop->nu);
    detail::emit_row(j, "json");
  });

  auto* sp_minr = sp->add_subcommand(
      "minr", "smallest admissible r at a given level exponent");
  sp_minr->add_option("--kappa", pop->kappa, "sieve dimension");
  sp_minr->add_option("--mu", pop->mu, "level exponent");
  sp_minr->add_option("--nu", pop->nu, "sifting-limit constant");
  sp_minr->callback([pop]() {
    const auto res = bounds::min_r(pop->kappa, pop->mu, pop->nu);
    json j;
    j["kappa"] = pop->kappa;
    j["mu"] = pop->mu;
    j["nu"] = pop->nu;
    j["r"] = res.r;
    j["zeta_star"] = res.zeta_star;
    j["rhs_min"] = res.rhs_min;
    detail::emit_row(j, "json");
  });

  auto* sp_cor1 = sp->add_subcommand(
      "cor1", "smallest feasible interval exponent for the r = 9 bound");
  sp_cor1->add_option("--r-max", pop->r_max, "largest admissible r");
  sp_cor1->add_option("--nu", pop->nu, "sifting-limit constant");
  sp_cor1->add_option("--theta", pop->theta, "also test this theta");
  sp_cor1->add_flag("--scan", pop->scan, "CSV over theta near the threshold");
  sp_cor1->callback([pop]() {
    if (pop->scan) {
      std::cout << "theta,mu,feasible\n";
      for (i64 k = 920; k <= 940; ++k) {
        const double th = k * 1e-3;
        std::cout << report::num_str(th) << ','
                  << report::num_str(bounds::cor1_mu(th)) << ','
                  << (bounds::cor1_feasible(th, pop->r_max, pop->nu) ? 1 : 0)
                  << "\n";
      }
      return;
    }
    const auto t = bounds::cor1_thresholds(pop->r_max, pop->nu);
    json j;
    j["r_max"] = pop->r_max;
    j["theta_min"] = t.theta_min;
    j["mu_at_theta_min"] = bounds::cor1_mu(t.theta_min);
    if (pop->theta > 0.0) {
      j["theta"] = pop->theta;
      j["feasible"] = bounds::cor1_feasible(pop->theta, pop->r_max, pop->nu);
    }
    detail::emit_row(j, "json");
  });

  auto* sp_cor2 = sp->add_subcommand(
      "cor2", "interval-exponent threshold and eta floor at order s");
  sp_cor2->add_option("--s", pop->s, "almost-prime order");
  sp_cor2->add_flag("--scan", pop->scan, "CSV over s = 2..s-max");
  sp_cor2->add_option("--s-max", pop->s_max, "scan upper bound");
  sp_cor2->callback([pop]() {
    if (pop->scan) {
      std::cout << "s,theta_threshold,eta_floor\n";
      for (u64 s = 2; s <= pop->s_max; ++s)
        std::cout << s << ','
                  << report::num_str(bounds::cor2_theta_threshold(s)) << ','
                  << report::num_str(bounds::cor2_eta_floor(s)) << "\n";
      return;
    }
    json j;
    j["s"] = pop->s;
    j["theta_threshold"] = bounds::cor2_theta_threshold(pop->s);
    j["eta_floor"] = bounds::cor2_eta_floor(pop->s);
    detail::emit_row(j, "json");
  });

  auto* sp_cor4 = sp->add_subcommand(
      "cor4", "two-case (eta, theta1) admissibility thresholds");
  sp_cor4->add_option("--theta1", pop->theta1, "first-window exponent");
  sp_cor4->add_option("--eta", pop->eta, "second-window exponent ratio");
  sp_cor4->add_option("--s", pop->s, "almost-prime order");
  sp_cor4->add_flag("--scan", pop->scan, "CSV of case-1 threshold over theta1");
  sp_cor4->callback([pop]() {
    if (pop->scan) {
      std::cout << "theta1,case1_threshold\n";
      for (i64 k = 861; k <= 1000; k += 10) {
        const double th = k * 1e-3;
        std::cout << report::num_str(th) << ','
                  << report::num_str(bounds::cor4_case1_threshold(th)) << "\n";
      }
      return;
    }
    const auto inf = bounds::cor4_case2_infimum(pop->s);
    json j;
    j["theta1"] = pop->theta1;
    j["s"] = pop->s;
    j["case1_threshold"] = bounds::cor4_case1_threshold(pop->theta1);
    j["case2_crossing_eta"] = inf.crossing_eta;
    j["case2_value_at_crossing"] = inf.value_at_crossing;
    j["case2_min_over_range"] = inf.min_over_range;
    j["case2_argmin_eta"] = inf.argmin_eta;
    if (pop->eta > 0.0) {
      const auto reg = bounds::cor4_region(pop->eta, pop->theta1, pop->s);
      j["eta"] = pop->eta;
      j["feasible"] = reg.feasible;
      j["binding"] = bounds::to_string(reg.binding);
      j["threshold"] = reg.threshold;
    }
    detail::emit_row(j, "json");
  });

  // ---- find --------------------------------------------------------------
  auto* fd = app.add_subcommand(
      "find", "search ternary representations under almost-prime conditions");
  struct FindOpts {
    u64 n = 0;
    std::string w1, w2;
    u64 ps1 = 0, ps2 = 0, ps3 = 0, ps_product = 0;
    std::string mode = "all";
    unsigned workers = 1;
  };
  auto fop = std::make_shared<FindOpts>();
  fd->add_option("--n", fop->n, "odd target")->required();
  fd->add_option("--window1", fop->w1, "p1 window X:Y")->required();
  fd->add_option("--window2", fop->w2, "p2 window X:Y")->required();
  fd->add_option("--ps1", fop->ps1, "require p1+2 = P_s (0 = off)");
  fd->add_option("--ps2", fop->ps2, "require p2+2 = P_s (0 = off)");
  fd->add_option("--ps3", fop->ps3, "require p3+2 = P_s (0 = off)");
  fd->add_option("--ps-product", fop->ps_product,
                 "require (p1+2)(p2+2) = P_s (0 = off)");
  fd->add_option("--mode", fop->mode, "first, all, or count")
      ->check(CLI::IsMember({"first", "all", "count"}));
  fd->add_option("--workers", fop->workers, "worker threads");
  fd->callback([fop]() {
    finder::RepresentationQuery q;
    q.n = fop->n;
    const auto [x1, y1] = detail::parse_window_arg(fop->w1);
    const auto [x2, y2] = detail::parse_window_arg(fop->w2);
    q.windows = {{x1, y1}, {x2, y2}};
    if (fop->ps1) q.almost_prime_conditions.emplace_back(1, fop->ps1);
    if (fop->ps2) q.almost_prime_conditions.emplace_back(2, fop->ps2);
    if (fop->ps3) q.almost_prime_conditions.emplace_back(3, fop->ps3);
    if (fop->ps_product) q.product_s = fop->ps_product;
    q.mode = fop->mode == "first"  ? finder::SearchMode::first
             : fop->mode == "count" ? finder::SearchMode::count
                                     : finder::SearchMode::all;
    const auto res = finder::find_ternary(q, fop->workers);
    for (const auto& t : res.solutions) {
      json line;
      line["p1"] = t.p1;
      line["p2"] = t.p2;
      line["p3"] = t.p3;
      std::cout << line.dump() << "\n";
    }
    json tail;
    tail["n"] = fop->n;
    tail["count"] = res.count;
    tail["warnings"] = res.warnings;
    std::cout << tail.dump() << "\n";
  });

  // ---- chen-count ----------------------------------------------------------
  auto* cc = app.add_subcommand(
      "chen-count", "count primes p with p+2 having at most two prime factors");
  auto cc_window = std::make_shared<std::string>();
  auto cc_workers = std::make_shared<unsigned>(1);
  cc->add_option("--window", *cc_window, "window X:Y")->required();
  cc->add_option("--workers", *cc_workers, "worker threads");
  cc->callback([cc_window, cc_workers]() {
    const auto [X, Y] = detail::parse_window_arg(*cc_window);
    const auto w = sieve_window(X, Y, *cc_workers);
    json j;
    j["X"] = X;
    j["Y"] = Y;
    j["count"] = finder::count_chen(w);
    std::cout << j.dump() << "\n";
  });

  // ---- exceptions ----------------------------------------------------------
  auto* ex = app.add_subcommand(
      "exceptions", "scan even targets lacking a constrained representation");
  struct ExOpts {
    u64 x1 = 0, x2 = 0, y = 0, s = 3;
    double theta = 0.0;
    unsigned workers = 1;
  };
  auto xop = std::make_shared<ExOpts>();
  ex->add_option("--x1", xop->x1, "target window base (targets 2k)")->required();
  ex->add_option("--x2", xop->x2, "p2 window base")->required();
  ex->add_option("--y", xop->y, "window length")->required();
  ex->add_option("--s", xop->s, "almost-prime order for p2+2");
  ex->add_option("--theta", xop->theta, "reported interval exponent");
  ex->add_option("--workers", xop->workers, "worker threads");
  ex->callback([xop]() {
    const auto rep = finder::cor2_exceptions(xop->x1, xop->x2, xop->y, xop->s,
                                             xop->theta, xop->workers);
    json j;
    j["exceptional_count"] = rep.exceptional_count;
    j["total"] = rep.total;
    j["fraction"] = rep.total
                        ? static_cast<double>(rep.exceptional_count) /
                              static_cast<double>(rep.total)
                        : 0.0;
    j["theta_report"] = rep.theta_report;
    j["warnings"] = rep.warnings;
    j["exceptional"] = rep.exceptional;
    std::cout << j.dump() << "\n";
  });

  // ---- cache ---------------------------------------------------------------
  auto* ca = app.add_subcommand("cache", "prime-window cache management");
  struct CacheOpts {
    u64 x = 0, y = 0;
    std::string dir;
    unsigned workers = 1;
  };
  auto kop = std::make_shared<CacheOpts>();
  auto add_cache_sub = [&](const char* name, const char* desc) {
    auto* sub = ca->add_subcommand(name, desc);
    sub->add_option("--x", kop->x, "window base")->required();
    sub->add_option("--y", kop->y, "window length")->required();
    sub->add_option("--dir", kop->dir, "cache directory");
    sub->add_option("--workers", kop->workers, "worker threads");
    return sub;
  };
  add_cache_sub("build", "sieve and store a window")->callback([kop]() {
    WindowCache cache(detail::cache_dir_or_default(kop->dir));
    const auto path = cache.build(kop->x, kop->y, kop->workers);
    const auto w = cache.load(kop->x, kop->y);
    json j;
    j["action"] = "build";
    j["path"] = path.string();
    j["popcount"] = w.popcount();
    std::cout << j.dump() << "\n";
  });
  add_cache_sub("verify", "re-sieve and byte-compare a stored window")
      ->callback([kop, &exit_code]() {
        WindowCache cache(detail::cache_dir_or_default(kop->dir));
        std::string diag;
        const bool ok = cache.verify(kop->x, kop->y, &diag, kop->workers);
        json j;
        j["action"] = "verify";
        j["path"] = cache.path_for(kop->x, kop->y).string();
        j["ok"] = ok;
        if (!ok) j["diagnostic"] = diag;
        std::cout << j.dump() << "\n";
        if (!ok) {
          std::cerr << "cache verify failed: " << diag << "\n";
          exit_code = 2;
        }
      });
  add_cache_sub("purge", "delete a stored window")->callback([kop]() {
    WindowCache cache(detail::cache_dir_or_default(kop->dir));
    json j;
    j["action"] = "purge";
    j["path"] = cache.path_for(kop->x, kop->y).string();
    j["removed"] = cache.purge(kop->x, kop->y);
    std::cout << j.dump() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 1;
  }
  return exit_code;
}

}  // namespace gblab::cli
