#pragma once

// Ratio statistics that place a non-negative Y in the Feller class, the
// centered Feller class, or neither, plus atom detection and Kolmogorov-Smirnov
// distances on empirical samples.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "selfnorm/distributions.hpp"
#include "selfnorm/errors.hpp"
#include "selfnorm/montecarlo.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

namespace detail {

inline void check_ratio_point(const MultiplierLaw& y, double x, const char* what) {
  if (!(x > 0.0) || x < y.support_min()) {
    throw parameter_error(std::string(what) + ": x must be positive and not below the support of Y");
  }
}

inline double positive_second(const MultiplierLaw& y, double x, const char* what) {
  const double s = y.trunc_second(x);
  if (!(s > 0.0)) throw parameter_error(std::string(what) + ": E[Y^2 ; Y <= x] vanishes");
  return s;
}

}  // namespace detail

/// x^2 P{Y > x} / E[Y^2 ; Y <= x].
inline double feller_ratio(const MultiplierLaw& y, double x) {
  detail::check_ratio_point(y, x, "feller_ratio");
  return x * x * y.survival(x) / detail::positive_second(y, x, "feller_ratio");
}

/// (x^2 P{Y > x} + x E[Y ; Y <= x]) / E[Y^2 ; Y <= x].
inline double centered_feller_ratio(const MultiplierLaw& y, double x) {
  detail::check_ratio_point(y, x, "centered_feller_ratio");
  return (x * x * y.survival(x) + x * y.trunc_mean(x)) / detail::positive_second(y, x, "centered_feller_ratio");
}

/// x E[Y ; Y <= x] / (x^2 P{Y > x} + E[Y^2 ; Y <= x]).
inline double grif_ratio(const MultiplierLaw& y, double x) {
  detail::check_ratio_point(y, x, "grif_ratio");
  const double den = x * x * y.survival(x) + y.trunc_second(x);
  if (!(den > 0.0)) throw parameter_error("grif_ratio: denominator vanishes");
  return x * y.trunc_mean(x) / den;
}

enum class ClassLabel { centered_feller, feller_not_centered, not_feller_grif_holds, grif_fails };

inline const char* to_string(ClassLabel l) {
  switch (l) {
    case ClassLabel::centered_feller: return "centered_feller";
    case ClassLabel::feller_not_centered: return "feller_not_centered";
    case ClassLabel::not_feller_grif_holds: return "not_feller_grif_holds";
    case ClassLabel::grif_fails: return "grif_fails";
  }
  return "unknown";
}

struct GrowthRule {
  double factor = 4.0;   // last-decade max must exceed factor * first-decade max
  double absolute = 50.0;  // ... and this absolute level
};

struct RatioTrack {
  std::vector<double> values;
  double first_decade_max = 0.0;
  double last_decade_max = 0.0;  // the limsup proxy
  bool growing = false;
};

struct ClassVerdict {
  std::vector<double> x_grid;
  RatioTrack feller, centered, grif;
  double feller_limsup_proxy = 0.0;
  double centered_limsup_proxy = 0.0;
  double grif_limsup_proxy = 0.0;
  ClassLabel label = ClassLabel::centered_feller;
};

/// 10^lo_exp .. 10^hi_exp with `per_decade` log-spaced points per decade.
inline std::vector<double> decade_grid(int lo_exp = 1, int hi_exp = 15, int per_decade = 10) {
  if (hi_exp <= lo_exp || per_decade < 1) throw parameter_error("decade_grid: invalid range");
  std::vector<double> g;
  for (int k = 0; k <= (hi_exp - lo_exp) * per_decade; ++k) {
    g.push_back(std::pow(10.0, lo_exp + static_cast<double>(k) / per_decade));
  }
  return g;
}

namespace detail {

inline RatioTrack track_ratio(const std::vector<double>& grid, const std::vector<double>& values, const GrowthRule& rule) {
  RatioTrack t;
  t.values = values;
  const double first_end = grid.front() * 10.0;
  const double last_start = grid.back() / 10.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Relative slack keeps points like 10^k computed via pow inside their decade.
    if (grid[i] <= first_end * (1.0 + 1e-12)) t.first_decade_max = std::max(t.first_decade_max, values[i]);
    if (grid[i] >= last_start * (1.0 - 1e-12)) t.last_decade_max = std::max(t.last_decade_max, values[i]);
  }
  t.growing = t.last_decade_max > rule.factor * t.first_decade_max && t.last_decade_max > rule.absolute;
  return t;
}

}  // namespace detail

/// Decision order: a growing Griffin ratio means (grif) fails; otherwise a
/// bounded centered ratio gives F_c, a bounded Feller ratio gives F \ F_c, and
/// the remaining case is outside F with (grif) holding.
inline ClassVerdict classify(const MultiplierLaw& y, const std::vector<double>& x_grid, const GrowthRule& rule = {}) {
  if (x_grid.size() < 2) throw parameter_error("classify: grid too short");
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw parameter_error("classify: grid must be increasing");
  }
  if (!(x_grid.front() > 0.0) || x_grid.back() / x_grid.front() < 1e6 * (1.0 - 1e-12)) {
    throw parameter_error("classify: grid too short, it must span at least 6 decades");
  }
  std::vector<double> f, c, g;
  for (double x : x_grid) {
    f.push_back(feller_ratio(y, x));
    c.push_back(centered_feller_ratio(y, x));
    g.push_back(grif_ratio(y, x));
  }
  ClassVerdict v;
  v.x_grid = x_grid;
  v.feller = detail::track_ratio(x_grid, f, rule);
  v.centered = detail::track_ratio(x_grid, c, rule);
  v.grif = detail::track_ratio(x_grid, g, rule);
  v.feller_limsup_proxy = v.feller.last_decade_max;
  v.centered_limsup_proxy = v.centered.last_decade_max;
  v.grif_limsup_proxy = v.grif.last_decade_max;
  if (v.grif.growing) {
    v.label = ClassLabel::grif_fails;
  } else if (!v.centered.growing) {
    v.label = ClassLabel::centered_feller;
  } else if (!v.feller.growing) {
    v.label = ClassLabel::feller_not_centered;
  } else {
    v.label = ClassLabel::not_feller_grif_holds;
  }
  return v;
}

/// t^2 P{|X| > t} / E[X^2 ; |X| <= t] by quadrature over F.
inline double weight_feller_ratio(const WeightLaw& x, double t) {
  if (!(t > 0.0)) throw parameter_error("weight_feller_ratio: t must be positive");
  const double tail = x.survival(t) + x.cdf_left(-t);
  auto r = partial_expectation(x, [](double u) { return u * u; }, -t, t, {-1.0, 1.0}, {1e-12, 1e-10, 4000});
  const double second = require_converged(r, "weight_feller_ratio");
  if (!(second > 0.0)) throw parameter_error("weight_feller_ratio: E[X^2 ; |X| <= t] vanishes");
  return t * t * tail / second;
}

struct ProductFellerReport {
  std::vector<double> t_grid;
  std::vector<double> x_ratio;  // |X| alone
  std::vector<double> y_ratio;  // Y alone
  std::vector<double> product_ratio;
  std::vector<double> product_std_error;  // of the tail numerator, relative
  RatioTrack product;
  bool bounded = false;
};

/// Monte Carlo estimate of t^2 P{|XY| > t} / E[X^2 Y^2 ; |XY| <= t], conditional
/// on X: P{Y > t/|X|} and E[Y^2 ; Y <= t/|X|] are exact. Requires both |X| and
/// Y to have bounded Feller ratios on the grid.
inline ProductFellerReport product_feller_check(const WeightLaw& x, const MultiplierLaw& y,
                                                const std::vector<double>& t_grid, SeedStream stream,
                                                std::size_t draws = 200'000, const GrowthRule& rule = {}) {
  if (t_grid.size() < 2) throw parameter_error("product_feller_check: grid too short");
  if (draws < 2) throw parameter_error("product_feller_check: need at least two draws");
  ProductFellerReport rep;
  rep.t_grid = t_grid;
  for (double t : t_grid) {
    rep.x_ratio.push_back(weight_feller_ratio(x, t));
    rep.y_ratio.push_back(feller_ratio(y, std::max(t, y.support_min())));
  }
  if (detail::track_ratio(t_grid, rep.x_ratio, rule).growing) {
    throw parameter_error("product_feller_check: |X| is not in the Feller class on this grid");
  }
  if (detail::track_ratio(t_grid, rep.y_ratio, rule).growing) {
    throw parameter_error("product_feller_check: Y is not in the Feller class on this grid");
  }
  Rng rng(stream);
  std::vector<double> xs(draws);
  for (auto& v : xs) v = std::abs(x.sample(rng));
  for (double t : t_grid) {
    double tail = 0.0, tail2 = 0.0, second = 0.0;
    for (double a : xs) {
      if (a == 0.0) continue;
      const double p = y.survival(t / a);
      tail += p;
      tail2 += p * p;
      second += a * a * y.trunc_second(t / a);
    }
    const double d = static_cast<double>(draws);
    const double mean_tail = tail / d;
    const double var_tail = std::max(0.0, tail2 / d - mean_tail * mean_tail);
    rep.product_ratio.push_back(second > 0.0 ? t * t * mean_tail / (second / d) : kInf);
    rep.product_std_error.push_back(mean_tail > 0.0 ? std::sqrt(var_tail / d) / mean_tail : 0.0);
  }
  rep.product = detail::track_ratio(t_grid, rep.product_ratio, rule);
  rep.bounded = !rep.product.growing && std::all_of(rep.product_ratio.begin(), rep.product_ratio.end(),
                                                    [](double v) { return std::isfinite(v); });
  return rep;
}

struct DetectedAtom {
  double location;
  double mass;       // window mass minus the continuous baseline
  double window_mass;
  double baseline;   // expected window mass from the surrounding density
};

/// Scans the sorted sample for atoms: the window mass #{|v - t| <= eps}/reps at
/// each sample point t is compared with the continuous baseline estimated from
/// the denser one-sided annulus eps < |v - t| <= 10 eps (scaled by 2/9, so an
/// edge of the support does not halve it). Points whose window
/// mass exceeds twice the baseline and holds at least `min_count` draws are
/// candidates; candidates within 2 eps are merged, keeping the heaviest window.
inline std::vector<DetectedAtom> atom_scan(const EmpiricalSample& sample, double eps, std::size_t min_count = 10) {
  if (!(eps > 0.0)) throw parameter_error("atom_scan: eps must be positive");
  const auto& v = sample.values;
  if (v.empty()) return {};
  const double reps = static_cast<double>(v.size());
  auto count_closed = [&](double lo, double hi) {
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), hi) - std::lower_bound(v.begin(), v.end(), lo));
  };
  std::vector<DetectedAtom> cand;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && v[i] == v[i - 1]) continue;
    const double t = v[i];
    const double inner = count_closed(t - eps, t + eps);
    const double left = count_closed(t - 10.0 * eps, t - eps) - count_closed(t - eps, t - eps);
    const double right = count_closed(t + eps, t + 10.0 * eps) - count_closed(t + eps, t + eps);
    const double window = inner / reps;
    const double baseline = 2.0 * std::max(left, right) / reps / 9.0;
    if (inner >= static_cast<double>(min_count) && window > 2.0 * baseline) {
      cand.push_back({t, window - baseline, window, baseline});
    }
  }
  std::vector<DetectedAtom> atoms;
  double previous = -kInf;
  for (const auto& c : cand) {
    if (!atoms.empty() && c.location - previous <= 2.0 * eps) {
      if (c.window_mass > atoms.back().window_mass) atoms.back() = c;
    } else {
      atoms.push_back(c);
    }
    previous = c.location;
  }
  return atoms;
}

/// sup_x |F_n(x) - F(x)| over both one-sided gaps at the sample points.
inline double ks_distance(const EmpiricalSample& sample, const std::function<double(double)>& cdf) {
  const auto& v = sample.values;
  if (v.empty()) throw parameter_error("ks_distance: empty sample");
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.values.empty() || b.values.empty()) throw parameter_error("ks_two_sample: empty sample");
  const auto& x = a.values;
  const auto& y = b.values;
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace selfnorm
