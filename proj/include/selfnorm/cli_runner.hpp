#pragma once

// Experiment configuration, result emission and the reproduction suites
// S1..S6 behind the selfnorm_lab command-line tool.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "selfnorm/class_diagnostics.hpp"
#include "selfnorm/config.hpp"
#include "selfnorm/distributions.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/levy_calculus.hpp"
#include "selfnorm/limit_laws.hpp"
#include "selfnorm/montecarlo.hpp"

namespace selfnorm {

using ojson = nlohmann::ordered_json;

enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitIo = 2, kExitConfig = 3 };

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// 17 significant digits: round-trip exact for doubles.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct Tolerances {
  double ks_tol = 0.02;
  double quad_tol = 1e-9;
  double cutoff = 1e-4;
};

struct ExperimentConfig {
  std::string scenario = "custom";
  std::optional<WeightSpec> x_law;
  std::optional<MultiplierSpec> y_law;
  std::uint64_t n = 10'000;
  std::uint64_t reps = 20'000;
  std::uint64_t seed = kDefaultSeed;
  std::string outputs = ".";
  Tolerances tol;
  FlatConfig raw;
  /// Everything that determines the results (no output path, no thread count).
  std::map<std::string, std::string> resolved;

  WeightLawPtr weight() const {
    if (!x_law) throw config_error("x_law.kind: required for this command");
    return make_weight_law(*x_law);
  }
  MultiplierLawPtr multiplier() const {
    if (!y_law) throw config_error("y_law.kind: required for this command");
    return make_multiplier_law(*y_law);
  }
  SimConfig sim(int threads, std::uint64_t stream = 0) const {
    SimConfig s;
    s.n = n;
    s.reps = reps;
    s.seed = SeedStream{seed, stream};
    s.cutoff = tol.cutoff;
    s.threads = threads;
    return s;
  }
};

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "scenario", "n", "reps", "seed", "outputs",
      "x_law.kind", "x_law.c", "x_law.p", "x_law.x0", "x_law.x1", "x_law.gamma",
      "y_law.kind", "y_law.beta", "y_law.rate", "y_law.scale",
      "tolerances.ks_tol", "tolerances.quad_tol", "tolerances.cutoff",
      "simulate.mode", "simulate.eps_list",
      "limit.beta", "limit.x_min", "limit.x_max", "limit.points", "limit.moment_margin",
      "diagnose.lo_exp", "diagnose.hi_exp", "diagnose.per_decade",
      "levy.beta", "levy.alpha", "levy.n_list", "levy.v_grid", "levy.u_grid", "levy.pi_v",
      "levy.h_list", "levy.mc_draws", "levy.k_max"};
  return keys;
}

namespace detail {

inline const char* weight_kind_name(WeightSpec::Kind k) {
  using K = WeightSpec::Kind;
  switch (k) {
    case K::uniform01: return "uniform01";
    case K::standard_gaussian: return "standard_gaussian";
    case K::rademacher: return "rademacher";
    case K::point_mass: return "point_mass";
    case K::bernoulli: return "bernoulli";
    case K::symmetric_pareto: return "symmetric_pareto";
    case K::pareto_abs: return "pareto_abs";
  }
  return "unknown";
}

inline const char* multiplier_kind_name(MultiplierSpec::Kind k) {
  using K = MultiplierSpec::Kind;
  switch (k) {
    case K::pareto: return "pareto";
    case K::slowly_varying: return "slowly_varying";
    case K::exponential: return "exponential";
    case K::uniform01: return "uniform01";
  }
  return "unknown";
}

}  // namespace detail

/// Builds and validates the experiment; --seed and --out override the file.
inline ExperimentConfig load_experiment(const FlatConfig& raw, std::optional<std::uint64_t> seed_override = {},
                                        std::optional<std::string> out_override = {}) {
  const auto unknown = raw.unknown_keys(known_config_keys());
  if (!unknown.empty()) throw config_error(unknown.front() + ": unknown configuration key");
  ExperimentConfig e;
  e.raw = raw;
  e.scenario = raw.get_string("scenario", e.scenario);
  e.n = raw.get_uint("n", e.n);
  e.reps = raw.get_uint("reps", e.reps);
  e.seed = raw.get_uint("seed", e.seed);
  if (seed_override) e.seed = *seed_override;
  e.outputs = raw.get_string("outputs", e.outputs);
  if (out_override) e.outputs = *out_override;
  e.tol.ks_tol = raw.get_double("tolerances.ks_tol", e.tol.ks_tol);
  e.tol.quad_tol = raw.get_double("tolerances.quad_tol", e.tol.quad_tol);
  e.tol.cutoff = raw.get_double("tolerances.cutoff", e.tol.cutoff);
  if (e.n < 1) throw config_error("n: must be >= 1");
  if (e.reps < 1) throw config_error("reps: must be >= 1");
  if (!(e.tol.ks_tol > 0.0 && e.tol.ks_tol <= 1.0)) throw config_error("tolerances.ks_tol: must lie in (0,1]");
  if (!(e.tol.quad_tol > 0.0)) throw config_error("tolerances.quad_tol: must be positive");
  if (!(e.tol.cutoff > 0.0 && e.tol.cutoff < 1.0)) throw config_error("tolerances.cutoff: must lie in (0,1)");

  for (const auto& [k, v] : raw.values()) {
    if (k != "outputs") e.resolved[k] = v;
  }
  e.resolved["scenario"] = e.scenario;
  e.resolved["n"] = std::to_string(e.n);
  e.resolved["reps"] = std::to_string(e.reps);
  e.resolved["seed"] = std::to_string(e.seed);
  e.resolved["tolerances.ks_tol"] = fmt17(e.tol.ks_tol);
  e.resolved["tolerances.quad_tol"] = fmt17(e.tol.quad_tol);
  e.resolved["tolerances.cutoff"] = fmt17(e.tol.cutoff);

  auto law_error = [](const std::string& prefix, const std::exception& ex) {
    return config_error(prefix + ": " + ex.what());
  };
  if (raw.has("x_law.kind")) {
    e.x_law = parse_weight_spec(raw);
    try {
      (void)make_weight_law(*e.x_law);
    } catch (const parameter_error& ex) {
      throw law_error("x_law", ex);
    }
    const auto& s = *e.x_law;
    e.resolved["x_law.kind"] = detail::weight_kind_name(s.kind);
    using K = WeightSpec::Kind;
    if (s.kind == K::point_mass) e.resolved["x_law.c"] = fmt17(s.c);
    if (s.kind == K::bernoulli) {
      e.resolved["x_law.p"] = fmt17(s.p);
      e.resolved["x_law.x0"] = fmt17(s.x0);
      e.resolved["x_law.x1"] = fmt17(s.x1);
    }
    if (s.kind == K::symmetric_pareto || s.kind == K::pareto_abs) e.resolved["x_law.gamma"] = fmt17(s.gamma);
  }
  if (raw.has("y_law.kind")) {
    e.y_law = parse_multiplier_spec(raw);
    try {
      (void)make_multiplier_law(*e.y_law);
    } catch (const parameter_error& ex) {
      throw law_error("y_law", ex);
    }
    const auto& s = *e.y_law;
    e.resolved["y_law.kind"] = detail::multiplier_kind_name(s.kind);
    if (s.kind == MultiplierSpec::Kind::pareto) e.resolved["y_law.beta"] = fmt17(s.beta);
    if (s.kind == MultiplierSpec::Kind::exponential) e.resolved["y_law.rate"] = fmt17(s.rate);
    e.resolved["y_law.scale"] = fmt17(s.scale);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) {
      throw io_error("cannot create output directory " + root_.string() + (ec ? ": " + ec.message() : ""));
    }
  }

  std::filesystem::path path(const std::string& name) const { return root_ / name; }

  void write(const std::string& name, const std::string& content) const {
    const auto p = path(name);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + p.string());
    out << content;
    out.flush();
    if (!out) throw io_error("write failed for " + p.string());
  }

  void write_json(const std::string& name, const ojson& j) const { write(name, j.dump(2) + "\n"); }

 private:
  std::filesystem::path root_;
};

inline ojson config_json(const std::map<std::string, std::string>& resolved) {
  ojson j = ojson::object();
  for (const auto& [k, v] : resolved) j[k] = v;
  return j;
}

/// CSV with '#'-prefixed lines carrying the resolved configuration.
class CsvTable {
 public:
  CsvTable(const std::map<std::string, std::string>& resolved, std::vector<std::string> header) {
    for (const auto& [k, v] : resolved) out_ << "# " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt17(values[i]);
    out_ << "\n";
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline ojson to_json(const ConvergenceReport& r) {
  ojson j;
  j["label"] = r.label;
  j["coordinate"] = r.coordinate;
  if (r.n) j["n"] = *r.n;
  if (r.fixed_value) j["fixed_value"] = *r.fixed_value;
  j["grid"] = r.grid;
  j["prelimit"] = r.prelimit;
  j["limit"] = r.limit;
  if (!r.std_error.empty()) j["std_error"] = r.std_error;
  j["sup_abs_gap"] = r.sup_abs_gap;
  j["tolerance"] = r.tolerance;
  j["verdict"] = r.pass ? "pass" : "fail";
  return j;
}

inline ojson to_json(const Estimate& e) { return ojson{{"value", e.value}, {"std_error", e.std_error}, {"draws", e.draws}}; }

inline ojson to_json(const RatioTrack& t) {
  return ojson{{"first_decade_max", t.first_decade_max}, {"last_decade_max", t.last_decade_max}, {"growing", t.growing}};
}

inline ojson to_json(const ClassVerdict& v) {
  ojson j;
  j["label"] = to_string(v.label);
  j["feller_limsup_proxy"] = v.feller_limsup_proxy;
  j["centered_limsup_proxy"] = v.centered_limsup_proxy;
  j["grif_limsup_proxy"] = v.grif_limsup_proxy;
  j["feller"] = to_json(v.feller);
  j["centered"] = to_json(v.centered);
  j["grif"] = to_json(v.grif);
  j["x_min"] = v.x_grid.front();
  j["x_max"] = v.x_grid.back();
  j["grid_points"] = v.x_grid.size();
  return j;
}

inline ojson to_json(const std::vector<DetectedAtom>& atoms) {
  ojson j = ojson::array();
  for (const auto& a : atoms) {
    j.push_back({{"location", a.location}, {"mass", a.mass}, {"window_mass", a.window_mass}, {"baseline", a.baseline}});
  }
  return j;
}

inline ojson sample_summary(const EmpiricalSample& s) {
  double mean = 0.0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(std::max<std::size_t>(s.size(), 2) - 1);
  return ojson{{"count", s.size()},
               {"mean", mean},
               {"variance", var},
               {"q05", s.quantile(0.05)},
               {"median", s.quantile(0.5)},
               {"q95", s.quantile(0.95)}};
}

inline ojson laws_json(const WeightLaw& x, const MultiplierLaw& y) {
  ojson j;
  j["x_law"] = {{"name", x.name()}, {"params", x.params()}};
  j["y_law"] = {{"name", y.name()}, {"params", y.params()}, {"tail_class", to_string(y.tail_class().kind)}};
  return j;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct RunOptions {
  int threads = 0;  // 0: SELFNORM_LAB_THREADS or hardware concurrency
};

inline int run_simulate(const ExperimentConfig& e, const RunOptions& opt = {}) {
  const OutputDir out(e.outputs);
  const std::string mode = e.raw.get_string("simulate.mode", "tn");
  const auto x = e.weight();
  const SimConfig sim = e.sim(opt.threads);
  ojson meta;
  meta["config"] = config_json(e.resolved);
  meta["mode"] = mode;
  if (mode == "tn") {
    const auto y = e.multiplier();
    const auto s = simulate_tn(*x, *y, sim);
    CsvTable csv(e.resolved, {"t_n"});
    for (double v : s.values) csv.row({v});
    out.write("tn_sample.csv", csv.str());
    meta["laws"] = laws_json(*x, *y);
    meta["summary"] = sample_summary(s);
    out.write_json("tn_sample.json", meta);
  } else if (mode == "pair") {
    const auto y = e.multiplier();
    const auto p = simulate_normed_pair(*x, *y, sim);
    CsvTable csv(e.resolved, {"w1", "w2"});
    for (std::size_t i = 0; i < p.size(); ++i) csv.row({p.w1[i], p.w2[i]});
    out.write("pair_sample.csv", csv.str());
    meta["laws"] = laws_json(*x, *y);
    meta["log_norming"] = y->log_norming(static_cast<double>(e.n));
    out.write_json("pair_sample.json", meta);
  } else if (mode == "limit_pair") {
    if (!e.y_law || e.y_law->kind != MultiplierSpec::Kind::pareto || !(e.y_law->beta < 1.0)) {
      throw config_error("simulate.mode: limit_pair needs y_law.kind = pareto with beta < 1");
    }
    BivariateLevyView view{x, stable_levy_tail(e.y_law->beta, e.raw.get_double("levy.alpha", 0.0))};
    const auto p = simulate_limit_pair(view, sim);
    CsvTable csv(e.resolved, {"w1", "w2"});
    for (std::size_t i = 0; i < p.size(); ++i) csv.row({p.w1[i], p.w2[i]});
    out.write("limit_pair.csv", csv.str());
    meta["levy"] = {{"name", view.levy.name}, {"beta", e.y_law->beta}, {"drift_alpha", view.levy.drift_alpha}};
    meta["cutoff"] = e.tol.cutoff;
    meta["poisson_mean"] = lambda_bar(view.levy, e.tol.cutoff);
    meta["bias_bound"] = {{"w1", p.bias_w1}, {"w2", p.bias_w2}};
    out.write_json("limit_pair.json", meta);
  } else if (mode == "max_share") {
    const auto y = e.multiplier();
    const auto eps = e.raw.get_list("simulate.eps_list", {0.01, 0.05, 0.1});
    const auto st = max_share_stats(*x, *y, sim, eps);
    CsvTable rn(e.resolved, {"r_n"});
    for (double v : st.r_n_sample.values) rn.row({v});
    out.write("r_n_sample.csv", rn.str());
    CsvTable dl(e.resolved, {"delta_n"});
    for (double v : st.delta_sample.values) dl.row({v});
    out.write("delta_sample.csv", dl.str());
    meta["laws"] = laws_json(*x, *y);
    meta["eps_list"] = st.eps_list;
    meta["a_n_eps_prob"] = st.a_n_eps_prob;
    meta["delta_le_eps_prob"] = st.delta_le_eps_prob;
    meta["delta_levels"] = st.delta_levels;
    meta["delta_quantiles"] = st.delta_quantiles;
    meta["r_n_summary"] = sample_summary(st.r_n_sample);
    out.write_json("max_share.json", meta);
  } else {
    throw config_error("simulate.mode: unknown mode '" + mode + "' (tn, pair, limit_pair, max_share)");
  }
  return kExitOk;
}

inline double config_beta(const ExperimentConfig& e, const std::string& key) {
  if (e.raw.has(key)) return e.raw.get_double(key, 0.5);
  if (e.y_law && e.y_law->kind == MultiplierSpec::Kind::pareto) return e.y_law->beta;
  throw config_error(key + ": required unless y_law.kind = pareto");
}

inline int run_limit(const ExperimentConfig& e, const RunOptions& = {}) {
  const OutputDir out(e.outputs);
  const double beta = config_beta(e, "limit.beta");
  if (!(beta > 0.0 && beta < 1.0)) throw config_error("limit.beta: must lie in (0,1)");
  const double lo = e.raw.get_double("limit.x_min", -1.0);
  const double hi = e.raw.get_double("limit.x_max", 2.0);
  const auto points = e.raw.get_uint("limit.points", 301);
  if (!(hi > lo) || points < 2) throw config_error("limit.x_min/limit.x_max/limit.points: need x_min < x_max and points >= 2");
  QuadOptions q{e.tol.quad_tol, 1e-12, 4000};
  BreimanLimit lim(beta, e.weight(), q, e.raw.get_double("limit.moment_margin", 0.05));
  CsvTable csv(e.resolved, {"x", "cdf", "tail_asym", "degenerate"});
  bool monotone = true;
  double prev = -1.0;
  for (std::uint64_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const auto c = breiman_cdf_checked(lim, x);
    const double tail = x > 0.0 ? breiman_tail(lim, x) : kNaN;
    csv.row({x, c.value, tail, c.degenerate ? 1.0 : 0.0});
    if (c.value < prev - 1e-12) monotone = false;
    prev = c.value;
  }
  out.write("limit_table.csv", csv.str());
  ojson meta;
  meta["config"] = config_json(e.resolved);
  meta["beta"] = beta;
  meta["tail_prefactor"] = breiman_tail_prefactor(beta);
  meta["monotone"] = monotone;
  out.write_json("limit.json", meta);
  return kExitOk;
}

inline int run_diagnose(const ExperimentConfig& e, const RunOptions& = {}) {
  const OutputDir out(e.outputs);
  const auto y = e.multiplier();
  const auto grid = decade_grid(static_cast<int>(e.raw.get_int("diagnose.lo_exp", 1)),
                                static_cast<int>(e.raw.get_int("diagnose.hi_exp", 15)),
                                static_cast<int>(e.raw.get_int("diagnose.per_decade", 10)));
  const auto v = classify(*y, grid);
  CsvTable csv(e.resolved, {"x", "feller", "centered", "grif"});
  for (std::size_t i = 0; i < grid.size(); ++i) csv.row({grid[i], v.feller.values[i], v.centered.values[i], v.grif.values[i]});
  out.write("ratio_scan.csv", csv.str());
  ojson meta;
  meta["config"] = config_json(e.resolved);
  meta["y_law"] = {{"name", y->name()}, {"params", y->params()}};
  meta["verdict"] = to_json(v);
  out.write_json("verdict.json", meta);
  return kExitOk;
}

/// Levy-measure and truncated-moment diagnostics as one JSON document.
inline ojson levy_report(const ExperimentConfig& e, SeedStream stream) {
  const auto x = e.weight();
  const auto y = e.multiplier();
  const auto n_list = e.raw.get_list("levy.n_list", {1e3, 1e4, 1e5});
  LevyGrid grid;
  grid.v_grid = e.raw.get_list("levy.v_grid", grid.v_grid);
  grid.u_grid = e.raw.get_list("levy.u_grid", grid.u_grid);
  grid.pi_v = e.raw.get_double("levy.pi_v", grid.pi_v);
  grid.mc_draws = e.raw.get_uint("levy.mc_draws", 1'000'000);
  ojson j;
  j["config"] = config_json(e.resolved);

  if (y->tail_class().kind != TailKind::pareto || !(y->tail_class().beta < 1.0)) {
    // No stable Levy limit: record the prelimit tails so the escape of mass
    // to infinity (or its absence) is visible.
    ojson rows = ojson::array();
    for (double n : n_list) {
      ojson r;
      r["n"] = n;
      std::vector<double> vals;
      for (double v : grid.v_grid) vals.push_back(prelimit_lambda_n(*y, n, v));
      r["v_grid"] = grid.v_grid;
      r["lambda_n_bar"] = vals;
      rows.push_back(r);
    }
    j["lambda_n"] = rows;
    j["stable_limit"] = false;
    j["note"] = y->tail_class().kind == TailKind::slowly_varying
                    ? "Lambda_n-bar(v) tends to 1 for every v > 0: mass escapes to infinity, no nondegenerate Levy limit"
                    : "Y outside D(beta) with beta < 1: no stable Levy limit";
    return j;
  }

  const double beta = e.raw.get_double("levy.beta", y->tail_class().beta);
  BivariateLevyView view{x, stable_levy_tail(beta, e.raw.get_double("levy.alpha", 0.0)),
                         QuadOptions{e.tol.quad_tol, 1e-12, 4000}};
  j["stable_limit"] = true;
  const auto scan = check_levy_convergence(*x, *y, view, n_list, grid, stream.substream(0));
  ojson lam = ojson::array(), pis = ojson::array(), inc = ojson::array();
  for (const auto& r : scan.lambda_reports) lam.push_back(to_json(r));
  for (const auto& r : scan.pi_reports) pis.push_back(to_json(r));
  for (const auto& r : scan.increment_reports) inc.push_back(to_json(r));
  j["lambda_reports"] = lam;
  j["lambda_increment_reports"] = inc;
  j["pi_bar_reports"] = pis;
  j["monotone_improvement"] = scan.monotone_improvement;
  j["convergence_pass"] = scan.all_pass;

  ojson neg = ojson::array();
  for (double u : grid.u_grid) neg.push_back({{"u", u}, {"v", grid.pi_v}, {"pi_neg", pi_neg(view, u, grid.pi_v)}});
  j["pi_neg"] = neg;

  const auto h_list = e.raw.get_list("levy.h_list", {0.25, 1.0});
  ojson alphas = ojson::array(), moments = ojson::array();
  const double n_big = n_list.back();
  for (std::size_t k = 0; k < h_list.size(); ++k) {
    const double h = h_list[k];
    ojson a{{"h", h}, {"limit", alpha_h(view.levy, h)}};
    ojson pre = ojson::array();
    for (double n : n_list) pre.push_back({{"n", n}, {"value", alpha_h_prelimit(*y, n, h)}});
    a["prelimit"] = pre;
    alphas.push_back(a);

    const auto m1 = truncated_first_moments(view, h);
    const auto m2 = truncated_second_moments(view, h);
    const auto mc = prelimit_truncated_moments(*x, *y, n_big, h, stream.substream(100 + k), grid.mc_draws);
    ojson m;
    m["h"] = h;
    m["n"] = n_big;
    m["limit"] = {{"y_part", m1.y_part}, {"xy_part", m1.xy_part}, {"uu", m2.uu}, {"vv", m2.vv}, {"uv", m2.uv},
                  {"abs_u", m2.abs_u}};
    m["prelimit"] = {{"y_part", to_json(mc.y_part)}, {"xy_part", to_json(mc.xy_part)}, {"uu", to_json(mc.uu)},
                     {"vv", to_json(mc.vv)}, {"uv", to_json(mc.uv)}};
    m["bounds"] = {{"vv_le_h_y_part", m2.vv <= h * m1.y_part}, {"uu_le_h_abs_u", m2.uu <= h * m2.abs_u}};
    moments.push_back(m);
  }
  j["alpha_h"] = alphas;
  j["truncated_moments"] = moments;

  ojson scan_rows = ojson::array();
  for (const auto& row : small_h_scan(view, static_cast<int>(e.raw.get_int("levy.k_max", 10)))) {
    scan_rows.push_back({{"h", row.h}, {"uu", row.moments.uu}, {"vv", row.moments.vv}, {"uv", row.moments.uv}});
  }
  j["small_h_scan"] = scan_rows;
  return j;
}

inline int run_levy(const ExperimentConfig& e, const RunOptions& = {}) {
  const OutputDir out(e.outputs);
  out.write_json("levy_report.json", levy_report(e, SeedStream{e.seed, 0}));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Reproduction suites
// ---------------------------------------------------------------------------

struct Check {
  int criterion;
  std::string name;
  double value;
  std::string relation;  // "<=", ">=", "in"
  double bound;
  double bound_hi = kNaN;  // upper end for "in"
  bool pass;
  ojson details = ojson::object();
};

inline Check check_le(int crit, std::string name, double value, double bound, ojson details = ojson::object()) {
  return {crit, std::move(name), value, "<=", bound, kNaN, value <= bound, std::move(details)};
}

inline Check check_ge(int crit, std::string name, double value, double bound, ojson details = ojson::object()) {
  return {crit, std::move(name), value, ">=", bound, kNaN, value >= bound, std::move(details)};
}

inline Check check_in(int crit, std::string name, double value, double lo, double hi, ojson details = ojson::object()) {
  return {crit, std::move(name), value, "in", lo, hi, value >= lo && value <= hi, std::move(details)};
}

inline Check check_true(int crit, std::string name, bool ok, ojson details = ojson::object()) {
  return {crit, std::move(name), ok ? 1.0 : 0.0, ">=", 1.0, kNaN, ok, std::move(details)};
}

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

inline ojson to_json(const Check& c) {
  ojson j;
  j["criterion"] = c.criterion;
  j["name"] = c.name;
  j["value"] = c.value;
  j["relation"] = c.relation;
  if (c.relation == "in") {
    j["bound"] = {c.bound, c.bound_hi};
  } else {
    j["bound"] = c.bound;
  }
  j["pass"] = c.pass;
  j["details"] = c.details;
  return j;
}

inline ojson to_json(const SuiteResult& r) {
  ojson j;
  j["suite"] = r.suite;
  j["pass"] = r.pass();
  ojson checks = ojson::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  return j;
}

struct SuiteOptions {
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::optional<std::string> out_dir;  // results are written only when set
};

namespace detail {

inline std::map<std::string, std::string> suite_config(const std::string& suite, std::uint64_t seed,
                                                       std::map<std::string, std::string> extra) {
  extra["suite"] = suite;
  extra["seed"] = std::to_string(seed);
  return extra;
}

inline void write_sample(const OutputDir& out, const std::string& name, const std::map<std::string, std::string>& cfg,
                         const std::string& column, const std::vector<double>& v) {
  CsvTable csv(cfg, {column});
  for (double x : v) csv.row({x});
  out.write(name, csv.str());
}

// S1: Breiman limit by three routes and the stable marginal of W2.
inline SuiteResult suite_s1(const SuiteOptions& o) {
  SuiteResult r{"S1", {}};
  const auto x = make_weight_law({WeightSpec::Kind::uniform01});
  const auto y = make_pareto_multiplier(0.5);
  SimConfig sim;
  sim.n = 10'000;
  sim.reps = 20'000;
  sim.cutoff = 1e-4;
  sim.threads = o.threads;
  BreimanLimit lim(0.5, x);
  auto cdf = [&](double t) { return breiman_cdf(lim, t); };

  sim.seed = SeedStream{o.seed, 1};
  const auto tn = simulate_tn(*x, *y, sim);
  const double ks_tn = ks_distance(tn, cdf);
  r.checks.push_back(check_le(1, "ks_tn_vs_breiman_cdf", ks_tn, 0.02, {{"n", sim.n}, {"reps", sim.reps}}));

  sim.seed = SeedStream{o.seed, 2};
  BivariateLevyView view{x, stable_levy_tail(0.5)};
  const auto lp = simulate_limit_pair(view, sim);
  const auto ratio = ratio_sample(lp, 0, "limit_pair");
  const double ks_lp = ks_distance(ratio, cdf);
  r.checks.push_back(check_le(1, "ks_limit_pair_ratio_vs_breiman_cdf", ks_lp, 0.03,
                              {{"cutoff", sim.cutoff}, {"bias_w1", lp.bias_w1}, {"bias_w2", lp.bias_w2}}));

  sim.seed = SeedStream{o.seed, 3};
  const auto pair = simulate_normed_pair(*x, *y, sim);
  const double scale = stable_levy_scale(0.5);
  const auto w2 = EmpiricalSample::from(pair.w2, sim.n, "w2");
  const double ks_w2 = ks_distance(w2, [scale](double w) { return positive_stable_half_cdf(w / scale); });
  r.checks.push_back(check_le(2, "ks_w2_vs_positive_stable_half", ks_w2, 0.02, {{"scale", scale}}));
  const auto pair_ratio = ratio_sample(pair, sim.n, "w1/w2");
  r.checks.push_back(check_le(2, "ks_pair_ratio_vs_breiman_cdf", ks_distance(pair_ratio, cdf), 0.02));

  if (o.out_dir) {
    const OutputDir out(*o.out_dir);
    const auto cfg = suite_config("S1", o.seed, {{"x_law.kind", "uniform01"}, {"y_law.kind", "pareto"},
                                                 {"y_law.beta", "0.5"}, {"n", "10000"}, {"reps", "20000"},
                                                 {"tolerances.cutoff", fmt17(sim.cutoff)}});
    write_sample(out, "S1_tn_sample.csv", cfg, "t_n", tn.values);
    write_sample(out, "S1_limit_ratio_sample.csv", cfg, "w1_over_w2", ratio.values);
    write_sample(out, "S1_w2_sample.csv", cfg, "w2", w2.values);
  }
  return r;
}

// S2: Levy-measure convergence and truncated moments.
inline SuiteResult suite_s2(const SuiteOptions& o) {
  SuiteResult r{"S2", {}};
  const auto x = make_weight_law({WeightSpec::Kind::uniform01});
  const auto y = make_pareto_multiplier(0.5);
  BivariateLevyView view{x, stable_levy_tail(0.5)};
  const std::vector<double> v_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  double worst = 0.0;
  for (double n : {1e3, 1e4, 1e5, 1e6}) {
    for (double v : v_grid) {
      const double pre = prelimit_lambda_n(*y, n, v);
      const double lim = lambda_bar(view.levy, v);
      worst = std::max(worst, std::abs(pre - lim) / lim);
    }
  }
  r.checks.push_back(check_le(3, "lambda_n_relative_gap", worst, 1e-13, {{"v_grid", v_grid}}));

  const auto est = prelimit_pi_n(*x, *y, 1e5, 1.0, 0.0, SeedStream{o.seed, 20}, 1'000'000);
  const double limit = pi_bar(view, 1.0, 0.0);
  r.checks.push_back(check_le(3, "pi_bar_n_gap_in_std_errors", std::abs(est.value - 2.0 / 3.0) / est.std_error, 3.0,
                              {{"estimate", est.value}, {"std_error", est.std_error}, {"quadrature_limit", limit}}));
  r.checks.push_back(check_le(3, "pi_bar_quadrature_vs_two_thirds", std::abs(limit - 2.0 / 3.0), 1e-9));

  const std::vector<double> hs{0.25, 1.0};
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double h = hs[k];
    const auto m1 = truncated_first_moments(view, h);
    const auto m2 = truncated_second_moments(view, h);
    const auto mc = prelimit_truncated_moments(*x, *y, 1e6, h, SeedStream{o.seed, 21 + k}, 1'000'000);
    const std::vector<std::pair<std::string, std::pair<double, Estimate>>> items{
        {"y_part", {m1.y_part, mc.y_part}}, {"xy_part", {m1.xy_part, mc.xy_part}}, {"uu", {m2.uu, mc.uu}},
        {"vv", {m2.vv, mc.vv}}, {"uv", {m2.uv, mc.uv}}};
    for (const auto& [name, pr] : items) {
      const auto& [lim_v, e] = pr;
      r.checks.push_back(check_le(4, "truncated_" + name + "_h" + fmt17(h) + "_gap_in_std_errors",
                                  std::abs(e.value - lim_v) / e.std_error, 3.0,
                                  {{"limit", lim_v}, {"prelimit", e.value}, {"std_error", e.std_error}}));
    }
  }
  const auto scan = small_h_scan(view, 10);
  const auto& top = scan.front().moments;
  const auto& bottom = scan.back().moments;
  const double worst_ratio = std::max({bottom.uu / top.uu, bottom.vv / top.vv, std::abs(bottom.uv / top.uv)});
  r.checks.push_back(check_le(4, "small_h_second_moment_ratio", worst_ratio, 1e-3,
                              {{"h_min", scan.back().h}, {"uu", bottom.uu}, {"vv", bottom.vv}, {"uv", bottom.uv}}));
  return r;
}

// S3: continuity dichotomy via atom scans, and max-share statistics.
inline SuiteResult suite_s3(const SuiteOptions& o) {
  SuiteResult r{"S3", {}};
  SimConfig sim;
  sim.n = 10'000;
  sim.reps = 20'000;
  sim.threads = o.threads;
  const double eps = 0.01;
  const auto uni = make_weight_law({WeightSpec::Kind::uniform01});

  sim.seed = SeedStream{o.seed, 30};
  const auto s_cont = simulate_tn(*uni, *make_pareto_multiplier(0.5), sim);
  const auto a_cont = atom_scan(s_cont, eps);
  r.checks.push_back(check_le(5, "atoms_uniform_pareto_half", static_cast<double>(a_cont.size()), 0.0,
                              {{"atoms", to_json(a_cont)}}));

  sim.seed = SeedStream{o.seed, 31};
  WeightSpec bern{WeightSpec::Kind::bernoulli};
  bern.p = 0.5;
  bern.x0 = 0.0;
  bern.x1 = 1.0;
  const auto s_sv = simulate_tn(*make_weight_law(bern), *make_slowly_varying_multiplier(), sim);
  const auto a_sv = atom_scan(s_sv, eps);
  auto mass_near = [&](const std::vector<DetectedAtom>& atoms, double at) {
    double m = 0.0;
    for (const auto& a : atoms) {
      if (std::abs(a.location - at) <= 2.0 * eps) m = std::max(m, a.mass);
    }
    return m;
  };
  r.checks.push_back(check_ge(5, "atom_mass_near_0_bernoulli_sv", mass_near(a_sv, 0.0), 0.4, {{"atoms", to_json(a_sv)}}));
  r.checks.push_back(check_ge(5, "atom_mass_near_1_bernoulli_sv", mass_near(a_sv, 1.0), 0.4));

  sim.seed = SeedStream{o.seed, 32};
  const auto s_exp = simulate_tn(*uni, *make_finite_mean_multiplier({}), sim);
  const auto a_exp = atom_scan(s_exp, eps);
  r.checks.push_back(check_true(5, "single_atom_uniform_exponential", a_exp.size() == 1, {{"atoms", to_json(a_exp)}}));
  r.checks.push_back(check_ge(5, "atom_mass_at_mean_uniform_exponential", mass_near(a_exp, 0.5), 0.95));

  sim.seed = SeedStream{o.seed, 33};
  const auto gauss = make_weight_law({WeightSpec::Kind::standard_gaussian});
  const auto st = max_share_stats(*gauss, *make_slowly_varying_multiplier(), sim, {0.1});
  r.checks.push_back(check_ge(9, "prob_a_n_0.1_slowly_varying", st.a_n_eps_prob[0], 0.9));
  r.checks.push_back(check_ge(9, "prob_delta_n_le_0.1_slowly_varying", st.delta_le_eps_prob[0], 0.8,
                              {{"delta_quantiles", st.delta_quantiles}, {"r_n_median", st.r_n_sample.quantile(0.5)}}));
  return r;
}

// S4: classification table.
inline SuiteResult suite_s4(const SuiteOptions&) {
  SuiteResult r{"S4", {}};
  const auto grid = decade_grid(1, 15, 10);
  const auto pareto = make_pareto_multiplier(0.5);
  const std::vector<std::pair<MultiplierLawPtr, ClassLabel>> table{
      {pareto, ClassLabel::centered_feller},
      {make_slowly_varying_multiplier(), ClassLabel::not_feller_grif_holds},
      {make_finite_mean_multiplier({}), ClassLabel::grif_fails}};
  for (const auto& [law, expected] : table) {
    const auto v = classify(*law, grid);
    r.checks.push_back(check_true(8, "classify_" + law->name(), v.label == expected,
                                  {{"expected", to_string(expected)}, {"verdict", to_json(v)}}));
  }
  const double x = 1e6;
  const std::vector<std::tuple<std::string, double, double>> limits{
      {"feller", feller_ratio(*pareto, x), 3.0},
      {"centered", centered_feller_ratio(*pareto, x), 6.0},
      {"grif", grif_ratio(*pareto, x), 0.75}};
  for (const auto& [name, value, lim] : limits) {
    r.checks.push_back(check_le(8, "pareto_half_" + name + "_ratio_relative_gap_at_1e6", std::abs(value - lim) / lim, 0.01,
                                {{"value", value}, {"limit", lim}}));
  }
  return r;
}

// S5: divergence of T_n when X has the heavier tail, plus an equal-index control.
inline SuiteResult suite_s5(const SuiteOptions& o) {
  SuiteResult r{"S5", {}};
  SimConfig sim;
  sim.reps = 1'000;
  sim.threads = o.threads;
  const std::vector<std::uint64_t> ns{100, 1'000, 10'000, 100'000};
  WeightSpec xs{WeightSpec::Kind::pareto_abs};
  xs.gamma = 0.4;
  sim.seed = SeedStream{o.seed, 50};
  const auto probe = divergence_probe(*make_weight_law(xs), *make_pareto_multiplier(0.8), sim, ns);
  r.checks.push_back(check_in(6, "divergence_slope_0.4_vs_0.8", probe.slope, 1.10, 1.40,
                              {{"n_list", probe.n_list}, {"median_abs_tn", probe.median_abs_tn}, {"expected", 1.25}}));
  xs.gamma = 0.8;
  sim.seed = SeedStream{o.seed, 51};
  const auto control = divergence_probe(*make_weight_law(xs), *make_pareto_multiplier(0.8), sim, ns);
  r.checks.push_back(check_le(6, "control_slope_0.8_vs_0.8_abs", std::abs(control.slope), 0.3,
                              {{"slope", control.slope}, {"median_abs_tn", control.median_abs_tn}}));
  return r;
}

// S6: Breiman limit when E|X| is infinite.
inline SuiteResult suite_s6(const SuiteOptions& o) {
  SuiteResult r{"S6", {}};
  WeightSpec xs{WeightSpec::Kind::symmetric_pareto};
  xs.gamma = 0.8;
  const auto x = make_weight_law(xs);
  const auto y = make_pareto_multiplier(0.5);
  BreimanLimit lim(0.5, x);
  SimConfig sim;
  sim.n = 10'000;
  sim.reps = 20'000;
  sim.threads = o.threads;
  sim.seed = SeedStream{o.seed, 60};
  const auto tn = simulate_tn(*x, *y, sim);
  const double ks = ks_distance(tn, [&](double t) { return breiman_cdf(lim, t); });
  r.checks.push_back(check_le(7, "ks_tn_vs_breiman_cdf_infinite_mean", ks, 0.03));

  const double xq = breiman_quantile(lim, 0.995);
  const double c = regvar_tail_constant(0.5, 0.8);
  const double analytic = (1.0 - breiman_cdf(lim, xq)) / x->survival(xq);
  const double empirical = (1.0 - tn.ecdf(xq)) / x->survival(xq);
  r.checks.push_back(check_le(7, "tail_ratio_relative_gap_at_cdf_0.995", std::abs(analytic - c) / c, 0.10,
                              {{"x", xq}, {"tail_ratio", analytic}, {"constant", c}, {"empirical_tail_ratio", empirical}}));
  return r;
}

}  // namespace detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"S1", "S2", "S3", "S4", "S5", "S6"};
  return names;
}

/// Runs one suite; with an output directory, writes reproduce_<suite>.json
/// (plus the S1 samples). Throws config_error for an unknown suite id.
inline SuiteResult run_reproduce(const std::string& suite, const SuiteOptions& o = {}) {
  static const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>> table{
      {"S1", detail::suite_s1}, {"S2", detail::suite_s2}, {"S3", detail::suite_s3},
      {"S4", detail::suite_s4}, {"S5", detail::suite_s5}, {"S6", detail::suite_s6}};
  const auto it = table.find(suite);
  if (it == table.end()) throw config_error("suite: unknown suite id '" + suite + "' (S1..S6)");
  std::optional<OutputDir> out;
  if (o.out_dir) out.emplace(*o.out_dir);
  auto result = it->second(o);
  if (out) {
    ojson j = to_json(result);
    j["seed"] = o.seed;
    out->write_json("reproduce_" + suite + ".json", j);
  }
  return result;
}

}  // namespace selfnorm
