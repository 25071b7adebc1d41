#pragma once

// X (weight) and Y (multiplier) law abstractions and the built-in laws.
//
// Laws are immutable after construction and shared through shared_ptr<const>;
// sampling is a pure function of the Rng handed in, so any law can be used
// from several threads at once.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "selfnorm/errors.hpp"
#include "selfnorm/quadrature.hpp"
#include "selfnorm/rng.hpp"

namespace selfnorm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using LawParams = std::map<std::string, double>;

struct Atom {
  double location;
  double mass;
};

// ---------------------------------------------------------------------------
// Weight laws (X)
// ---------------------------------------------------------------------------

/// Law of the weight X: a finite list of atoms plus an absolutely continuous
/// part whose density integrates to 1 - (sum of atom masses).
class WeightLaw {
 public:
  virtual ~WeightLaw() = default;

  virtual std::string name() const = 0;
  virtual LawParams params() const = 0;

  /// Right-continuous distribution function F(x).
  virtual double cdf(double x) const = 0;
  /// Left limit F(x-).
  virtual double cdf_left(double x) const = 0;
  /// Density of the continuous part (0 for purely atomic laws).
  virtual double density(double x) const = 0;
  virtual std::vector<Atom> atoms() const = 0;
  /// Support of the continuous part; {0,0} when there is none.
  virtual std::pair<double, double> continuous_support() const = 0;
  /// Points where the continuous density is not smooth (support ends, jumps).
  virtual std::vector<double> breakpoints() const = 0;

  /// E X; NaN when undefined (E|X| = infinity with both tails heavy).
  virtual double mean() const = 0;
  virtual double abs_mean() const = 0;
  virtual double second_moment() const = 0;
  /// Integral of x^beta over (0, inf) against F.
  virtual double beta_moment_pos(double beta) const = 0;
  /// Integral of (-x)^beta over (-inf, 0) against F.
  virtual double beta_moment_neg(double beta) const = 0;
  /// sup |X| (infinity when unbounded).
  virtual double sup_abs() const = 0;

  virtual double sample(Rng& rng) const = 0;

  bool has_continuous_part() const {
    auto [lo, hi] = continuous_support();
    return hi > lo;
  }

  bool degenerate() const {
    auto a = atoms();
    return a.size() == 1 && a.front().mass >= 1.0;
  }

  /// P{X > x}; laws with unbounded support override this to avoid cancellation.
  virtual double survival(double x) const { return 1.0 - cdf(x); }

  std::vector<double> sample(SeedStream stream, std::size_t count) const {
    Rng rng(stream);
    std::vector<double> out(count);
    for (auto& v : out) v = sample(rng);
    return out;
  }
};

using WeightLawPtr = std::shared_ptr<const WeightLaw>;

class Uniform01Weight final : public WeightLaw {
 public:
  std::string name() const override { return "uniform01"; }
  LawParams params() const override { return {}; }
  double cdf(double x) const override { return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x); }
  double cdf_left(double x) const override { return cdf(x); }
  double density(double x) const override { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; }
  std::vector<Atom> atoms() const override { return {}; }
  std::pair<double, double> continuous_support() const override { return {0.0, 1.0}; }
  std::vector<double> breakpoints() const override { return {0.0, 1.0}; }
  double mean() const override { return 0.5; }
  double abs_mean() const override { return 0.5; }
  double second_moment() const override { return 1.0 / 3.0; }
  double beta_moment_pos(double beta) const override { return 1.0 / (beta + 1.0); }
  double beta_moment_neg(double) const override { return 0.0; }
  double sup_abs() const override { return 1.0; }
  double sample(Rng& rng) const override { return rng.uniform(); }
};

class StandardGaussianWeight final : public WeightLaw {
 public:
  std::string name() const override { return "standard_gaussian"; }
  LawParams params() const override { return {}; }
  double cdf(double x) const override { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
  double survival(double x) const override { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
  double cdf_left(double x) const override { return cdf(x); }
  double density(double x) const override {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  }
  std::vector<Atom> atoms() const override { return {}; }
  std::pair<double, double> continuous_support() const override { return {-kInf, kInf}; }
  std::vector<double> breakpoints() const override { return {}; }
  double mean() const override { return 0.0; }
  double abs_mean() const override { return std::sqrt(2.0 / std::numbers::pi); }
  double second_moment() const override { return 1.0; }
  // E|Z|^b = 2^{b/2} Gamma((b+1)/2) / sqrt(pi), split evenly between the halves.
  double beta_moment_pos(double beta) const override {
    return 0.5 * std::pow(2.0, 0.5 * beta) * std::tgamma(0.5 * (beta + 1.0)) / std::sqrt(std::numbers::pi);
  }
  double beta_moment_neg(double beta) const override { return beta_moment_pos(beta); }
  double sup_abs() const override { return kInf; }
  double sample(Rng& rng) const override { return rng.normal(); }
};

/// Purely atomic law with finitely many atoms (rademacher, point mass, bernoulli).
class AtomicWeight final : public WeightLaw {
 public:
  AtomicWeight(std::string name, LawParams params, std::vector<Atom> atoms)
      : name_(std::move(name)), params_(std::move(params)), atoms_(std::move(atoms)) {
    double total = 0.0;
    for (const auto& a : atoms_) {
      if (!(a.mass > 0.0 && a.mass <= 1.0) || !std::isfinite(a.location)) {
        throw parameter_error("atomic law: invalid atom");
      }
      total += a.mass;
    }
    if (std::abs(total - 1.0) > 1e-12) throw parameter_error("atomic law: masses must sum to 1");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& l, const Atom& r) { return l.location < r.location; });
  }

  std::string name() const override { return name_; }
  LawParams params() const override { return params_; }
  double cdf(double x) const override {
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (a.location <= x) s += a.mass;
    }
    return std::min(1.0, s);
  }
  double cdf_left(double x) const override {
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (a.location < x) s += a.mass;
    }
    return std::min(1.0, s);
  }
  double density(double) const override { return 0.0; }
  std::vector<Atom> atoms() const override { return atoms_; }
  std::pair<double, double> continuous_support() const override { return {0.0, 0.0}; }
  std::vector<double> breakpoints() const override { return {}; }
  double mean() const override { return moment([](double x) { return x; }); }
  double abs_mean() const override { return moment([](double x) { return std::abs(x); }); }
  double second_moment() const override { return moment([](double x) { return x * x; }); }
  double beta_moment_pos(double beta) const override {
    return moment([beta](double x) { return x > 0.0 ? std::pow(x, beta) : 0.0; });
  }
  double beta_moment_neg(double beta) const override {
    return moment([beta](double x) { return x < 0.0 ? std::pow(-x, beta) : 0.0; });
  }
  double sup_abs() const override {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, std::abs(a.location));
    return m;
  }
  double sample(Rng& rng) const override {
    if (atoms_.size() == 1) return atoms_.front().location;
    double u = rng.uniform();
    for (const auto& a : atoms_) {
      if (u < a.mass) return a.location;
      u -= a.mass;
    }
    return atoms_.back().location;
  }

 private:
  template <class G>
  double moment(G g) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass * g(a.location);
    return s;
  }

  std::string name_;
  LawParams params_;
  std::vector<Atom> atoms_;
};

/// |X| has survival min(1, x^-gamma); the sign is an independent fair coin.
/// With signed = false the law is the one-sided Pareto on [1, inf).
class ParetoWeight final : public WeightLaw {
 public:
  ParetoWeight(double gamma, bool symmetric) : gamma_(gamma), symmetric_(symmetric) {}

  std::string name() const override { return symmetric_ ? "symmetric_pareto" : "pareto_abs"; }
  LawParams params() const override { return {{"gamma", gamma_}}; }
  double cdf(double x) const override {
    if (!symmetric_) return x < 1.0 ? 0.0 : 1.0 - std::pow(x, -gamma_);
    if (x <= -1.0) return 0.5 * std::pow(-x, -gamma_);
    if (x < 1.0) return 0.5;
    return 1.0 - 0.5 * std::pow(x, -gamma_);
  }
  double survival(double x) const override {
    if (x >= 1.0) return (symmetric_ ? 0.5 : 1.0) * std::pow(x, -gamma_);
    return 1.0 - cdf(x);
  }
  double cdf_left(double x) const override { return cdf(x); }
  double density(double x) const override {
    const double ax = std::abs(x);
    if (ax < 1.0 || (!symmetric_ && x < 0.0)) return 0.0;
    return (symmetric_ ? 0.5 : 1.0) * gamma_ * std::pow(ax, -gamma_ - 1.0);
  }
  std::vector<Atom> atoms() const override { return {}; }
  std::pair<double, double> continuous_support() const override {
    return {symmetric_ ? -kInf : 1.0, kInf};
  }
  std::vector<double> breakpoints() const override {
    return symmetric_ ? std::vector<double>{-1.0, 1.0} : std::vector<double>{1.0};
  }
  double mean() const override {
    if (gamma_ <= 1.0) return symmetric_ ? kNaN : kInf;
    return symmetric_ ? 0.0 : gamma_ / (gamma_ - 1.0);
  }
  double abs_mean() const override { return gamma_ <= 1.0 ? kInf : gamma_ / (gamma_ - 1.0); }
  double second_moment() const override { return gamma_ <= 2.0 ? kInf : gamma_ / (gamma_ - 2.0); }
  double beta_moment_pos(double beta) const override {
    if (beta >= gamma_) return kInf;
    return (symmetric_ ? 0.5 : 1.0) * gamma_ / (gamma_ - beta);
  }
  double beta_moment_neg(double beta) const override {
    if (!symmetric_) return 0.0;
    return beta_moment_pos(beta);
  }
  double sup_abs() const override { return kInf; }
  double sample(Rng& rng) const override {
    const double magnitude = std::pow(rng.uniform(), -1.0 / gamma_);
    if (!symmetric_) return magnitude;
    return rng.uniform() < 0.5 ? -magnitude : magnitude;
  }

  double gamma() const { return gamma_; }

 private:
  double gamma_;
  bool symmetric_;
};

struct WeightSpec {
  enum class Kind { uniform01, standard_gaussian, rademacher, point_mass, bernoulli, symmetric_pareto, pareto_abs };
  Kind kind = Kind::uniform01;
  double c = 0.0;      // point_mass location
  double p = 0.5;      // bernoulli P{X = x1}
  double x0 = 0.0;
  double x1 = 1.0;
  double gamma = 0.8;  // pareto index
};

inline WeightLawPtr make_weight_law(const WeightSpec& spec) {
  using K = WeightSpec::Kind;
  switch (spec.kind) {
    case K::uniform01:
      return std::make_shared<Uniform01Weight>();
    case K::standard_gaussian:
      return std::make_shared<StandardGaussianWeight>();
    case K::rademacher:
      return std::make_shared<AtomicWeight>("rademacher", LawParams{}, std::vector<Atom>{{-1.0, 0.5}, {1.0, 0.5}});
    case K::point_mass:
      if (!std::isfinite(spec.c)) throw parameter_error("point_mass: c must be finite");
      return std::make_shared<AtomicWeight>("point_mass", LawParams{{"c", spec.c}}, std::vector<Atom>{{spec.c, 1.0}});
    case K::bernoulli:
      if (!(spec.p > 0.0 && spec.p < 1.0)) throw parameter_error("bernoulli: p must lie in (0,1)");
      if (spec.x0 == spec.x1 || !std::isfinite(spec.x0) || !std::isfinite(spec.x1)) {
        throw parameter_error("bernoulli: x0 and x1 must be distinct finite values");
      }
      return std::make_shared<AtomicWeight>("bernoulli", LawParams{{"p", spec.p}, {"x0", spec.x0}, {"x1", spec.x1}},
                                            std::vector<Atom>{{spec.x0, 1.0 - spec.p}, {spec.x1, spec.p}});
    case K::symmetric_pareto:
    case K::pareto_abs:
      if (!(spec.gamma > 0.0 && spec.gamma < 2.0)) throw parameter_error("pareto weight: gamma must lie in (0,2)");
      return std::make_shared<ParetoWeight>(spec.gamma, spec.kind == K::symmetric_pareto);
  }
  throw parameter_error("unknown weight law kind");
}

/// E[g(X) ; lo <= X <= hi]: atoms in the closed range plus the continuous part
/// integrated piecewise between breakpoints and `extra_splits`.
template <class G>
QuadResult partial_expectation(const WeightLaw& law, const G& g, double lo, double hi,
                               std::vector<double> extra_splits = {}, const QuadOptions& opt = {}) {
  QuadResult r;
  for (const auto& a : law.atoms()) {
    if (a.location >= lo && a.location <= hi) r.value += a.mass * g(a.location);
  }
  if (!law.has_continuous_part()) return r;
  auto [slo, shi] = law.continuous_support();
  const double a = std::max(lo, slo);
  const double b = std::min(hi, shi);
  if (!(b > a)) return r;
  auto bp = law.breakpoints();
  extra_splits.insert(extra_splits.end(), bp.begin(), bp.end());
  // Geometric scale points keep long finite ranges from stepping over the bulk.
  for (double m = 0.0625; m <= 4096.0; m *= 4.0) {
    extra_splits.push_back(m);
    extra_splits.push_back(-m);
  }
  auto integrand = [&](double u) {
    const double d = law.density(u);
    return d == 0.0 ? 0.0 : g(u) * d;
  };
  r += integrate_split(integrand, a, b, std::move(extra_splits), opt);
  return r;
}

template <class G>
QuadResult expectation(const WeightLaw& law, const G& g, std::vector<double> extra_splits = {},
                       const QuadOptions& opt = {}) {
  return partial_expectation(law, g, -kInf, kInf, std::move(extra_splits), opt);
}

// ---------------------------------------------------------------------------
// Multiplier laws (Y >= 0)
// ---------------------------------------------------------------------------

enum class TailKind { pareto, slowly_varying, finite_mean, custom };

inline const char* to_string(TailKind k) {
  switch (k) {
    case TailKind::pareto: return "pareto";
    case TailKind::slowly_varying: return "slowly_varying";
    case TailKind::finite_mean: return "finite_mean";
    case TailKind::custom: return "custom";
  }
  return "custom";
}

struct TailClass {
  TailKind kind = TailKind::custom;
  double beta = kNaN;  // tail index for pareto
};

/// Law of the non-negative multiplier Y.
///
/// Norming constants follow a_n = inf{x > 0 : P{Y > x} <= 1/n}. Laws whose
/// samples or norming constants overflow doubles report log_domain() and
/// provide the log-scale members; callers must use those.
class MultiplierLaw {
 public:
  virtual ~MultiplierLaw() = default;

  virtual std::string name() const = 0;
  virtual LawParams params() const = 0;

  /// P{Y > y}.
  virtual double survival(double y) const = 0;
  /// P{Y > exp(log_y)}, valid beyond the double range of y.
  virtual double survival_at_log(double log_y) const { return survival(std::exp(log_y)); }
  /// E[Y ; Y <= x].
  virtual double trunc_mean(double x) const = 0;
  /// E[Y^2 ; Y <= x].
  virtual double trunc_second(double x) const = 0;
  virtual double norming(double n) const = 0;
  virtual double log_norming(double n) const { return std::log(norming(n)); }
  virtual double mean() const = 0;
  /// Infimum of the support.
  virtual double support_min() const = 0;
  virtual TailClass tail_class() const = 0;

  virtual double sample(Rng& rng) const = 0;
  virtual double sample_log(Rng& rng) const { return std::log(sample(rng)); }
  virtual bool log_domain() const { return false; }

  std::vector<double> sample(SeedStream stream, std::size_t count) const {
    Rng rng(stream);
    std::vector<double> out(count);
    for (auto& v : out) v = sample(rng);
    return out;
  }
};

using MultiplierLawPtr = std::shared_ptr<const MultiplierLaw>;

/// P{Y > y} = min(1, y^-beta), support [1, inf).
class ParetoMultiplier final : public MultiplierLaw {
 public:
  explicit ParetoMultiplier(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 2.0)) throw parameter_error("pareto multiplier: beta must lie in (0,2)");
  }

  std::string name() const override { return "pareto"; }
  LawParams params() const override { return {{"beta", beta_}}; }
  double survival(double y) const override { return y <= 1.0 ? 1.0 : std::pow(y, -beta_); }
  double survival_at_log(double log_y) const override {
    return log_y <= 0.0 ? 1.0 : std::exp(-beta_ * log_y);
  }
  double trunc_mean(double x) const override {
    if (x <= 1.0) return 0.0;
    if (beta_ == 1.0) return std::log(x);
    return beta_ / (1.0 - beta_) * (std::pow(x, 1.0 - beta_) - 1.0);
  }
  double trunc_second(double x) const override {
    if (x <= 1.0) return 0.0;
    return beta_ / (2.0 - beta_) * (std::pow(x, 2.0 - beta_) - 1.0);
  }
  double norming(double n) const override { return std::pow(n, 1.0 / beta_); }
  double log_norming(double n) const override { return std::log(n) / beta_; }
  double mean() const override { return beta_ > 1.0 ? beta_ / (beta_ - 1.0) : kInf; }
  double support_min() const override { return 1.0; }
  TailClass tail_class() const override { return {TailKind::pareto, beta_}; }
  double sample(Rng& rng) const override {
    const double u = rng.uniform();
    return beta_ == 0.5 ? 1.0 / (u * u) : std::pow(u, -1.0 / beta_);
  }
  double sample_log(Rng& rng) const override { return -std::log(rng.uniform()) / beta_; }

  double beta() const { return beta_; }

 private:
  double beta_;
};

/// P{Y > y} = min(1, 1/ln y); Y = exp(1/U).
class SlowlyVaryingMultiplier final : public MultiplierLaw {
 public:
  std::string name() const override { return "slowly_varying"; }
  LawParams params() const override { return {}; }
  double survival(double y) const override {
    return y <= std::numbers::e ? 1.0 : 1.0 / std::log(y);
  }
  double survival_at_log(double log_y) const override { return log_y <= 1.0 ? 1.0 : 1.0 / log_y; }
  // With t = ln y the density is e^t / t^2 dt on t >= 1, and
  // integral e^{kt}/t^2 dt = -e^{kt}/t + k Ei(kt).
  double trunc_mean(double x) const override {
    if (x <= std::numbers::e) return 0.0;
    const double L = std::log(x);
    return -x / L + std::expint(L) + std::numbers::e - std::expint(1.0);
  }
  double trunc_second(double x) const override {
    if (x <= std::numbers::e) return 0.0;
    const double L = std::log(x);
    const double e2 = std::numbers::e * std::numbers::e;
    return -x * x / L + 2.0 * std::expint(2.0 * L) + e2 - 2.0 * std::expint(2.0);
  }
  double norming(double n) const override { return std::exp(n); }
  double log_norming(double n) const override { return n; }
  double mean() const override { return kInf; }
  double support_min() const override { return std::numbers::e; }
  TailClass tail_class() const override { return {TailKind::slowly_varying, 0.0}; }
  double sample(Rng& rng) const override { return std::exp(1.0 / rng.uniform()); }
  double sample_log(Rng& rng) const override { return 1.0 / rng.uniform(); }
  bool log_domain() const override { return true; }
};

class ExponentialMultiplier final : public MultiplierLaw {
 public:
  explicit ExponentialMultiplier(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw parameter_error("exponential multiplier: rate must be positive");
  }

  std::string name() const override { return "exponential"; }
  LawParams params() const override { return {{"rate", rate_}}; }
  double survival(double y) const override { return y <= 0.0 ? 1.0 : std::exp(-rate_ * y); }
  // E[Y^k ; Y <= x] = Gamma(k+1) P(k+1, rate x) / rate^k.
  double trunc_mean(double x) const override {
    return x <= 0.0 ? 0.0 : boost::math::gamma_p(2.0, rate_ * x) / rate_;
  }
  double trunc_second(double x) const override {
    return x <= 0.0 ? 0.0 : 2.0 * boost::math::gamma_p(3.0, rate_ * x) / (rate_ * rate_);
  }
  double norming(double n) const override { return std::log(std::max(n, 2.0)) / rate_; }
  double mean() const override { return 1.0 / rate_; }
  double support_min() const override { return 0.0; }
  TailClass tail_class() const override { return {TailKind::finite_mean, kNaN}; }
  double sample(Rng& rng) const override { return rng.exponential() / rate_; }

 private:
  double rate_;
};

class Uniform01Multiplier final : public MultiplierLaw {
 public:
  std::string name() const override { return "uniform01"; }
  LawParams params() const override { return {}; }
  double survival(double y) const override { return y <= 0.0 ? 1.0 : (y >= 1.0 ? 0.0 : 1.0 - y); }
  double trunc_mean(double x) const override {
    const double c = std::clamp(x, 0.0, 1.0);
    return 0.5 * c * c;
  }
  double trunc_second(double x) const override {
    const double c = std::clamp(x, 0.0, 1.0);
    return c * c * c / 3.0;
  }
  double norming(double n) const override { return 1.0 - 1.0 / std::max(n, 2.0); }
  double mean() const override { return 0.5; }
  double support_min() const override { return 0.0; }
  TailClass tail_class() const override { return {TailKind::finite_mean, kNaN}; }
  double sample(Rng& rng) const override { return rng.uniform(); }
};

/// c * Y for a base multiplier law Y and c > 0.
class ScaledMultiplier final : public MultiplierLaw {
 public:
  ScaledMultiplier(MultiplierLawPtr base, double scale) : base_(std::move(base)), scale_(scale) {
    if (!base_) throw parameter_error("scaled multiplier: null base law");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw parameter_error("scaled multiplier: scale must be positive");
  }

  std::string name() const override { return base_->name(); }
  LawParams params() const override {
    auto p = base_->params();
    p["scale"] = scale_;
    return p;
  }
  double survival(double y) const override { return base_->survival(y / scale_); }
  double survival_at_log(double log_y) const override { return base_->survival_at_log(log_y - std::log(scale_)); }
  double trunc_mean(double x) const override { return scale_ * base_->trunc_mean(x / scale_); }
  double trunc_second(double x) const override { return scale_ * scale_ * base_->trunc_second(x / scale_); }
  double norming(double n) const override { return scale_ * base_->norming(n); }
  double log_norming(double n) const override { return std::log(scale_) + base_->log_norming(n); }
  double mean() const override { return scale_ * base_->mean(); }
  double support_min() const override { return scale_ * base_->support_min(); }
  TailClass tail_class() const override { return base_->tail_class(); }
  double sample(Rng& rng) const override { return scale_ * base_->sample(rng); }
  double sample_log(Rng& rng) const override { return std::log(scale_) + base_->sample_log(rng); }
  bool log_domain() const override { return base_->log_domain(); }

 private:
  MultiplierLawPtr base_;
  double scale_;
};

inline MultiplierLawPtr make_pareto_multiplier(double beta) { return std::make_shared<ParetoMultiplier>(beta); }

inline MultiplierLawPtr make_slowly_varying_multiplier() { return std::make_shared<SlowlyVaryingMultiplier>(); }

struct FiniteMeanKind {
  enum class Kind { exponential, uniform01 };
  Kind kind = Kind::exponential;
  double rate = 1.0;
};

inline MultiplierLawPtr make_finite_mean_multiplier(FiniteMeanKind k) {
  if (k.kind == FiniteMeanKind::Kind::exponential) return std::make_shared<ExponentialMultiplier>(k.rate);
  return std::make_shared<Uniform01Multiplier>();
}

// ---------------------------------------------------------------------------
// Positive stable law
// ---------------------------------------------------------------------------

/// Exact draws from the positive stable law with Laplace transform
/// exp(-lambda^beta), 0 < beta < 1 (Kanter's representation).
inline std::vector<double> sample_positive_stable(double beta, SeedStream stream, std::size_t count) {
  if (!(beta > 0.0 && beta < 1.0)) throw parameter_error("positive stable: beta must lie in (0,1)");
  if (count < 1) throw parameter_error("positive stable: count must be >= 1");
  Rng rng(stream);
  std::vector<double> out(count);
  for (auto& z : out) {
    double v;
    do {
      const double u = std::numbers::pi * rng.uniform();
      const double e = rng.exponential();
      v = std::sin(beta * u) / std::pow(std::sin(u), 1.0 / beta) *
          std::pow(std::sin((1.0 - beta) * u) / e, (1.0 - beta) / beta);
    } while (!(v > 0.0) || !std::isfinite(v));
    z = v;
  }
  return out;
}

/// CDF of the beta = 1/2 member of the family above (Levy law with scale 1/2):
/// P{Z <= z} = erfc(1 / (2 sqrt z)).
inline double positive_stable_half_cdf(double z) {
  if (z <= 0.0) return 0.0;
  return std::erfc(0.5 / std::sqrt(z));
}

/// The infinitely divisible law with Levy tail v^-beta and no drift equals
/// c * Z with Z as above and c = Gamma(1 - beta)^(1/beta).
inline double stable_levy_scale(double beta) { return std::pow(std::tgamma(1.0 - beta), 1.0 / beta); }

}  // namespace selfnorm
