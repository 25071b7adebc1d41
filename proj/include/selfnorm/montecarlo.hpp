#pragma once

// Simulation of T_n, of the normed pair (sum X_i Y_i / a_n, sum Y_i / a_n), of
// the limit pair (W1, W2) by compound Poisson, and of max-share statistics.
// Replication r always draws from seed.substream(r), so every result is a
// pure function of the configuration and independent of the thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "selfnorm/distributions.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/levy_calculus.hpp"
#include "selfnorm/parallel.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

struct SimConfig {
  std::uint64_t n = 10'000;
  std::uint64_t reps = 20'000;
  SeedStream seed{};
  double cutoff = 1e-4;
  /// Worker count; 0 defers to resolve_threads(). Never affects results.
  int threads = 0;

  void validate() const {
    if (n < 1) throw parameter_error("n must be >= 1");
    if (reps < 1) throw parameter_error("reps must be >= 1");
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw parameter_error("cutoff must lie in (0,1)");
  }
};

struct EmpiricalSample {
  std::vector<double> values;  // ascending
  std::uint64_t n_meta = 0;
  std::string law_meta;

  std::size_t size() const { return values.size(); }

  /// Fraction of values <= x.
  double ecdf(double x) const {
    if (values.empty()) return 0.0;
    const auto it = std::upper_bound(values.begin(), values.end(), x);
    return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
  }

  /// Type-7 sample quantile.
  double quantile(double p) const {
    if (values.empty()) throw parameter_error("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw parameter_error("quantile level must lie in [0,1]");
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  }

  static EmpiricalSample from(std::vector<double> v, std::uint64_t n, std::string meta) {
    std::sort(v.begin(), v.end());
    return {std::move(v), n, std::move(meta)};
  }
};

struct PairSample {
  std::vector<double> w1;
  std::vector<double> w2;
  /// Upper bounds on the mean of the discarded small-jump totals (limit pair only).
  double bias_w1 = 0.0;
  double bias_w2 = 0.0;
  /// W1/W2 taken before normalization; stays exact when the normed
  /// coordinates overflow (slowly varying Y).
  std::vector<double> ratio;

  std::size_t size() const { return w1.size(); }
};

inline std::string law_label(const WeightLaw& x, const MultiplierLaw& y) { return "X=" + x.name() + ";Y=" + y.name(); }

namespace detail {

// One replication of (sum X_i Y_i, sum Y_i) scaled by exp(-shift), with the
// shift chosen so nothing overflows. Draw order per index: X_i then Y_i.
struct RawSums {
  double xy;
  double y;
  double log_scale;  // true sums are xy * e^log_scale, y * e^log_scale
};

inline RawSums raw_sums(const WeightLaw& x, const MultiplierLaw& y, std::uint64_t n, Rng& rng,
                        std::vector<double>& xs, std::vector<double>& ls) {
  if (!y.log_domain()) {
    double sxy = 0.0, sy = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double xv = x.sample(rng);
      const double yv = y.sample(rng);
      sxy += xv * yv;
      sy += yv;
    }
    return {sxy, sy, 0.0};
  }
  xs.resize(n);
  ls.resize(n);
  double m = -kInf;
  for (std::uint64_t i = 0; i < n; ++i) {
    xs[i] = x.sample(rng);
    ls[i] = y.sample_log(rng);
    m = std::max(m, ls[i]);
  }
  double sxy = 0.0, sy = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double w = std::exp(ls[i] - m);
    sxy += xs[i] * w;
    sy += w;
  }
  return {sxy, sy, m};
}

inline double ratio_or_zero(double num, double den) { return den == 0.0 ? (num == 0.0 ? 0.0 : kNaN) : num / den; }

}  // namespace detail

/// reps i.i.d. draws of T_n = sum X_i Y_i / sum Y_i (0/0 := 0).
inline EmpiricalSample simulate_tn(const WeightLaw& x, const MultiplierLaw& y, const SimConfig& cfg) {
  cfg.validate();
  std::vector<double> out(cfg.reps);
  parallel_for(cfg.reps, resolve_threads(cfg.threads), [&](std::size_t r) {
    Rng rng(cfg.seed.substream(r));
    std::vector<double> xs, ls;
    const auto s = detail::raw_sums(x, y, cfg.n, rng, xs, ls);
    out[r] = detail::ratio_or_zero(s.xy, s.y);
  });
  return EmpiricalSample::from(std::move(out), cfg.n, law_label(x, y));
}

/// reps draws of (sum X_i Y_i / a_n, sum Y_i / a_n) in replication order. Uses
/// the same streams as simulate_tn, so w1/w2 reproduces its draws.
inline PairSample simulate_normed_pair(const WeightLaw& x, const MultiplierLaw& y, const SimConfig& cfg) {
  cfg.validate();
  const double log_a = y.log_norming(static_cast<double>(cfg.n));
  if (!std::isfinite(log_a)) throw parameter_error("simulate_normed_pair: norming constant undefined for " + y.name());
  PairSample p;
  p.w1.resize(cfg.reps);
  p.w2.resize(cfg.reps);
  p.ratio.resize(cfg.reps);
  const double a = y.norming(static_cast<double>(cfg.n));
  const bool linear = !y.log_domain() && std::isfinite(a) && a > 0.0;
  parallel_for(cfg.reps, resolve_threads(cfg.threads), [&](std::size_t r) {
    Rng rng(cfg.seed.substream(r));
    std::vector<double> xs, ls;
    const auto s = detail::raw_sums(x, y, cfg.n, rng, xs, ls);
    p.ratio[r] = detail::ratio_or_zero(s.xy, s.y);
    if (linear) {
      p.w1[r] = s.xy / a;
      p.w2[r] = s.y / a;
    } else {
      const double f = std::exp(s.log_scale - log_a);
      p.w1[r] = s.xy * f;
      p.w2[r] = s.y * f;
    }
  });
  return p;
}

/// Upper bound of the mean total discarded below the cutoff:
/// (int_0^eps s Lambda(ds) E|X|, int_0^eps s Lambda(ds)).
inline std::pair<double, double> small_jump_bias(const BivariateLevyView& view, double cutoff) {
  const double m = alpha_h(view.levy, cutoff) - view.levy.drift_alpha;
  const double ax = view.weight->abs_mean();
  return {m == 0.0 ? 0.0 : m * ax, m};
}

inline constexpr double kMaxPoissonMean = 1e8;

/// Compound Poisson draws of (alpha E X + sum_j X_j y_j, alpha + sum_j y_j) with
/// N ~ Poisson(Lambda-bar(cutoff)) jumps y_j from Lambda restricted to
/// (cutoff, inf), normalized. Jumps below the cutoff are dropped.
inline PairSample simulate_limit_pair(const BivariateLevyView& view, const SimConfig& cfg) {
  cfg.validate();
  const double mass = lambda_bar(view.levy, cfg.cutoff);
  if (!std::isfinite(mass) || mass > kMaxPoissonMean) {
    throw parameter_error("simulate_limit_pair: cutoff too small, Poisson mean Lambda-bar(cutoff) = " +
                          std::to_string(mass));
  }
  const double alpha = view.levy.drift_alpha;
  const double drift_x = alpha == 0.0 ? 0.0 : alpha * view.weight->mean();
  PairSample p;
  p.w1.resize(cfg.reps);
  p.w2.resize(cfg.reps);
  const auto bias = small_jump_bias(view, cfg.cutoff);
  p.bias_w1 = bias.first;
  p.bias_w2 = bias.second;
  const WeightLaw& f = *view.weight;
  const LevyTail& levy = view.levy;
  parallel_for(cfg.reps, resolve_threads(cfg.threads), [&](std::size_t r) {
    Rng rng(cfg.seed.substream(r));
    const std::uint64_t jumps = rng.poisson(mass);
    double s1 = drift_x, s2 = alpha;
    for (std::uint64_t j = 0; j < jumps; ++j) {
      // Lambda-bar(y) = w uniform on (0, Lambda-bar(cutoff)).
      const double yj = inverse_levy_tail(levy, mass * rng.uniform());
      const double xj = f.sample(rng);
      s1 += xj * yj;
      s2 += yj;
    }
    p.w1[r] = s1;
    p.w2[r] = s2;
  });
  return p;
}

/// W1/W2 (0/0 := 0), sorted.
inline EmpiricalSample ratio_sample(const PairSample& p, std::uint64_t n_meta, std::string meta) {
  std::vector<double> v = p.ratio;
  if (v.size() != p.size()) {
    v.resize(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = detail::ratio_or_zero(p.w1[i], p.w2[i]);
  }
  return EmpiricalSample::from(std::move(v), n_meta, std::move(meta));
}

struct MaxShareStats {
  std::vector<double> eps_list;
  std::vector<double> a_n_eps_prob;      // P{Y_m / sum Y > 1 - eps}
  std::vector<double> delta_le_eps_prob; // P{|T_n - X_m| <= eps}
  std::vector<double> delta_levels{0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<double> delta_quantiles;
  EmpiricalSample delta_sample;
  EmpiricalSample r_n_sample;  // sqrt(sum Y^2) / sum Y
};

/// Max-share functionals of one sample: m(n) is the smallest index attaining
/// max Y_i.
inline MaxShareStats max_share_stats(const WeightLaw& x, const MultiplierLaw& y, const SimConfig& cfg,
                                     const std::vector<double>& eps_list) {
  cfg.validate();
  for (double e : eps_list) {
    if (!(e > 0.0 && e < 1.0)) throw parameter_error("max_share_stats: eps values must lie in (0,1)");
  }
  std::vector<double> share(cfg.reps), delta(cfg.reps), rn(cfg.reps);
  const bool log_dom = y.log_domain();
  parallel_for(cfg.reps, resolve_threads(cfg.threads), [&](std::size_t r) {
    Rng rng(cfg.seed.substream(r));
    std::vector<double> xs(cfg.n), ls(cfg.n);
    double top = -kInf;
    std::size_t m = 0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      xs[i] = x.sample(rng);
      ls[i] = log_dom ? y.sample_log(rng) : y.sample(rng);
      if (ls[i] > top) {  // strict: ties keep the smallest index
        top = ls[i];
        m = i;
      }
    }
    double sxy = 0.0, sy = 0.0, syy = 0.0;
    if (log_dom) {
      for (std::size_t i = 0; i < cfg.n; ++i) {
        const double w = std::exp(ls[i] - top);
        sxy += xs[i] * w;
        sy += w;
        syy += w * w;
      }
      share[r] = 1.0 / sy;
    } else {
      for (std::size_t i = 0; i < cfg.n; ++i) {
        sxy += xs[i] * ls[i];
        sy += ls[i];
        syy += ls[i] * ls[i];
      }
      share[r] = sy == 0.0 ? 0.0 : top / sy;
    }
    const double t = detail::ratio_or_zero(sxy, sy);
    delta[r] = std::abs(t - xs[m]);
    rn[r] = sy == 0.0 ? 0.0 : std::sqrt(syy) / sy;
  });
  MaxShareStats out;
  out.eps_list = eps_list;
  for (double e : eps_list) {
    std::size_t a = 0, d = 0;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
      if (share[r] > 1.0 - e) ++a;
      if (delta[r] <= e) ++d;
    }
    out.a_n_eps_prob.push_back(static_cast<double>(a) / static_cast<double>(cfg.reps));
    out.delta_le_eps_prob.push_back(static_cast<double>(d) / static_cast<double>(cfg.reps));
  }
  const auto meta = law_label(x, y);
  out.delta_sample = EmpiricalSample::from(std::move(delta), cfg.n, meta);
  out.r_n_sample = EmpiricalSample::from(std::move(rn), cfg.n, meta);
  for (double p : out.delta_levels) out.delta_quantiles.push_back(out.delta_sample.quantile(p));
  return out;
}

struct DivergenceProbe {
  std::vector<double> n_list;
  std::vector<double> median_abs_tn;
  double slope = kNaN;      // least-squares slope of log median vs log n
  double intercept = kNaN;
};

/// Median |T_n| for each n; sample size index k draws from seed.substream(k).
inline DivergenceProbe divergence_probe(const WeightLaw& x, const MultiplierLaw& y, const SimConfig& cfg,
                                        const std::vector<std::uint64_t>& n_list) {
  if (n_list.size() < 2) throw parameter_error("divergence_probe: need at least two sample sizes");
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) throw parameter_error("divergence_probe: n_list must be increasing");
  }
  DivergenceProbe out;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    SimConfig c = cfg;
    c.n = n_list[k];
    c.seed = cfg.seed.substream(k);
    auto s = simulate_tn(x, y, c);
    for (auto& v : s.values) v = std::abs(v);
    std::sort(s.values.begin(), s.values.end());
    out.n_list.push_back(static_cast<double>(n_list[k]));
    out.median_abs_tn.push_back(s.quantile(0.5));
  }
  const std::size_t m = out.n_list.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double lx = std::log(out.n_list[k]);
    const double ly = std::log(out.median_abs_tn[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double md = static_cast<double>(m);
  out.slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / md;
  return out;
}

}  // namespace selfnorm
