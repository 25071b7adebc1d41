#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "selfnorm/montecarlo.hpp"

using namespace selfnorm;

namespace {

// Y = 1 almost surely; consumes no randomness, so every Y_i ties.
class UnitMultiplier final : public MultiplierLaw {
 public:
  std::string name() const override { return "unit"; }
  LawParams params() const override { return {}; }
  double survival(double y) const override { return y < 1.0 ? 1.0 : 0.0; }
  double trunc_mean(double x) const override { return x >= 1.0 ? 1.0 : 0.0; }
  double trunc_second(double x) const override { return x >= 1.0 ? 1.0 : 0.0; }
  double norming(double) const override { return 1.0; }
  double mean() const override { return 1.0; }
  double support_min() const override { return 1.0; }
  TailClass tail_class() const override { return {TailKind::finite_mean, kNaN}; }
  double sample(Rng&) const override { return 1.0; }
};

SimConfig config(std::uint64_t n, std::uint64_t reps, std::uint64_t seed = 42) {
  SimConfig c;
  c.n = n;
  c.reps = reps;
  c.seed = SeedStream{seed, 0};
  return c;
}

double ks_against(const EmpiricalSample& s, const auto& cdf) {
  const double m = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s.values[i]);
    d = std::max({d, (i + 1.0) / m - f, f - i / m});
  }
  return d;
}

WeightLawPtr law(WeightSpec::Kind k) { return make_weight_law({k}); }

}  // namespace

TEST(SimulateTn, PointMassWeightsGiveConstant) {
  WeightSpec s{WeightSpec::Kind::point_mass};
  s.c = 2.5;
  const auto t = simulate_tn(*make_weight_law(s), *make_pareto_multiplier(0.5), config(500, 200));
  for (double v : t.values) EXPECT_NEAR(v, 2.5, 1e-12);
  EXPECT_EQ(t.n_meta, 500u);
  EXPECT_EQ(t.law_meta, "X=point_mass;Y=pareto");
}

TEST(SimulateTn, BoundedWeightsKeepConvexHull) {
  const auto t = simulate_tn(*law(WeightSpec::Kind::uniform01), *make_slowly_varying_multiplier(), config(1000, 500));
  EXPECT_GE(t.values.front(), 0.0);
  EXPECT_LE(t.values.back(), 1.0);
  const auto r = simulate_tn(*law(WeightSpec::Kind::rademacher), *make_pareto_multiplier(0.3), config(1000, 500));
  EXPECT_GE(r.values.front(), -1.0);
  EXPECT_LE(r.values.back(), 1.0);
}

TEST(SimulateTn, InvariantUnderScalingOfY) {
  auto base = make_pareto_multiplier(0.5);
  auto scaled = std::make_shared<ScaledMultiplier>(base, 1e3);
  auto x = law(WeightSpec::Kind::standard_gaussian);
  const auto a = simulate_tn(*x, *base, config(300, 300));
  const auto b = simulate_tn(*x, *scaled, config(300, 300));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-12 * (1.0 + std::abs(a.values[i])));
}

TEST(SimulateTn, FiniteMeanConcentratesAtRatioOfMeans) {
  // E[XY]/E[Y] = 1/2 for independent X ~ U(0,1).
  const auto t =
      simulate_tn(*law(WeightSpec::Kind::uniform01), *make_finite_mean_multiplier({}), config(10'000, 2000));
  double s = 0.0, s2 = 0.0;
  for (double v : t.values) {
    s += v;
    s2 += v * v;
  }
  const double m = s / 2000.0;
  const double sd = std::sqrt(s2 / 2000.0 - m * m);
  EXPECT_NEAR(m, 0.5, 5.0 * sd / std::sqrt(2000.0));
  EXPECT_LT(sd, 0.01);
}

TEST(SimulateTn, IndependentOfThreadCount) {
  auto x = law(WeightSpec::Kind::standard_gaussian);
  auto y = make_pareto_multiplier(0.5);
  auto c1 = config(200, 1000), c4 = config(200, 1000);
  c1.threads = 1;
  c4.threads = 4;
  EXPECT_EQ(simulate_tn(*x, *y, c1).values, simulate_tn(*x, *y, c4).values);
  auto sv = make_slowly_varying_multiplier();
  EXPECT_EQ(simulate_tn(*x, *sv, c1).values, simulate_tn(*x, *sv, c4).values);
}

TEST(SimulateTn, RejectsBadConfig) {
  auto x = law(WeightSpec::Kind::uniform01);
  auto y = make_pareto_multiplier(0.5);
  EXPECT_THROW(simulate_tn(*x, *y, config(0, 10)), parameter_error);
  EXPECT_THROW(simulate_tn(*x, *y, config(10, 0)), parameter_error);
}

TEST(NormedPair, RatioReproducesTn) {
  auto x = law(WeightSpec::Kind::standard_gaussian);
  for (const auto& y : {make_pareto_multiplier(0.5), make_slowly_varying_multiplier()}) {
    const auto cfg = config(400, 500);
    const auto pair = simulate_normed_pair(*x, *y, cfg);
    const auto ratio = ratio_sample(pair, cfg.n, "r");
    const auto tn = simulate_tn(*x, *y, cfg);
    ASSERT_EQ(ratio.size(), tn.size());
    for (std::size_t i = 0; i < tn.size(); ++i) EXPECT_NEAR(ratio.values[i], tn.values[i], 1e-13 * (1.0 + std::abs(tn.values[i])));
  }
}

TEST(NormedPair, UnitWeightsGiveEqualCoordinates) {
  WeightSpec s{WeightSpec::Kind::point_mass};
  s.c = 1.0;
  const auto pair = simulate_normed_pair(*make_weight_law(s), *make_pareto_multiplier(0.5), config(100, 100));
  for (std::size_t i = 0; i < pair.size(); ++i) EXPECT_DOUBLE_EQ(pair.w1[i], pair.w2[i]);
}

TEST(NormedPair, SumConvergesToPositiveStable) {
  // Pareto(1/2): sum Y / n^2 -> pi Z with P{Z <= z} = erfc(1/(2 sqrt z)).
  auto x = law(WeightSpec::Kind::uniform01);
  const auto pair = simulate_normed_pair(*x, *make_pareto_multiplier(0.5), config(2000, 4000));
  const auto w2 = EmpiricalSample::from(pair.w2, 2000, "w2");
  const double d = ks_against(w2, [](double w) { return positive_stable_half_cdf(w / std::numbers::pi); });
  EXPECT_LT(d, 1.63 / std::sqrt(4000.0) + 0.01);
}

TEST(LimitPair, DenominatorIsPositiveStable) {
  BivariateLevyView view{law(WeightSpec::Kind::uniform01), stable_levy_tail(0.5), {}};
  auto cfg = config(1, 10'000);
  cfg.cutoff = 1e-4;
  const auto p = simulate_limit_pair(view, cfg);
  EXPECT_NEAR(p.bias_w2, std::sqrt(1e-4), 1e-9);
  EXPECT_NEAR(p.bias_w1, 0.5 * p.bias_w2, 1e-9);
  const auto w2 = EmpiricalSample::from(p.w2, 0, "w2");
  const double d = ks_against(w2, [](double w) { return positive_stable_half_cdf(w / std::numbers::pi); });
  EXPECT_LT(d, 1.63 / std::sqrt(10'000.0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_GE(p.w1[i], 0.0);
    EXPECT_LE(p.w1[i], p.w2[i]);
  }
}

TEST(LimitPair, LaplaceTransformMatchesCompoundPoisson) {
  // E exp(-lambda W2) = exp(-int_eps^inf (1 - e^{-lambda y}) Lambda(dy)) for the truncated sum.
  BivariateLevyView view{law(WeightSpec::Kind::uniform01), stable_levy_tail(0.5), {}};
  auto cfg = config(1, 20'000);
  cfg.cutoff = 0.01;
  EXPECT_NEAR(lambda_bar(view.levy, cfg.cutoff), 10.0, 1e-12);
  const auto p = simulate_limit_pair(view, cfg);
  boost::math::quadrature::exp_sinh<double> es;
  for (double lambda : {0.3, 1.0, 3.0}) {
    const double exponent =
        es.integrate([&](double y) { return (1.0 - std::exp(-lambda * y)) * 0.5 * std::pow(y, -1.5); }, 0.01,
                     std::numeric_limits<double>::infinity());
    double s = 0.0, s2 = 0.0;
    for (double w : p.w2) {
      const double e = std::exp(-lambda * w);
      s += e;
      s2 += e * e;
    }
    const double m = s / 20'000.0;
    const double se = std::sqrt((s2 / 20'000.0 - m * m) / 20'000.0);
    EXPECT_NEAR(m, std::exp(-exponent), 5.0 * se) << "lambda=" << lambda;
  }
  auto bad = cfg;
  bad.cutoff = 1e-17;
  EXPECT_THROW(simulate_limit_pair(view, bad), parameter_error);
}

TEST(LimitPair, HalvingCutoffMovesOnlyWithinBias) {
  BivariateLevyView view{law(WeightSpec::Kind::uniform01), stable_levy_tail(0.5), {}};
  auto a = config(1, 20'000), b = config(1, 20'000, 43);
  a.cutoff = 1e-3;
  b.cutoff = 5e-4;
  const auto pa = ratio_sample(simulate_limit_pair(view, a), 0, "a");
  const auto pb = ratio_sample(simulate_limit_pair(view, b), 0, "b");
  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) EXPECT_NEAR(pa.quantile(q), pb.quantile(q), 0.02) << "q=" << q;
}

TEST(MaxShare, TiesKeepTheSmallestIndex) {
  // Every Y_i = 1, so m(n) = 0 and |T_n - X_m| = |mean of X - X_1|.
  auto x = law(WeightSpec::Kind::standard_gaussian);
  UnitMultiplier y;
  const auto cfg = config(50, 300);
  const auto st = max_share_stats(*x, y, cfg, {0.1});
  std::vector<double> expect;
  for (std::size_t r = 0; r < cfg.reps; ++r) {
    Rng rng(cfg.seed.substream(r));
    double sum = 0.0, first = 0.0;
    for (std::size_t i = 0; i < cfg.n; ++i) {
      const double v = x->sample(rng);
      if (i == 0) first = v;
      sum += v;
    }
    expect.push_back(std::abs(sum / 50.0 - first));
  }
  std::sort(expect.begin(), expect.end());
  ASSERT_EQ(st.delta_sample.values.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(st.delta_sample.values[i], expect[i], 1e-12);
  EXPECT_DOUBLE_EQ(st.a_n_eps_prob[0], 0.0);
  for (double r : st.r_n_sample.values) EXPECT_NEAR(r, 1.0 / std::sqrt(50.0), 1e-12);
}

TEST(MaxShare, SlowlyVaryingSingleTermDominates) {
  const auto st = max_share_stats(*law(WeightSpec::Kind::uniform01), *make_slowly_varying_multiplier(),
                                  config(1000, 2000), {0.01, 0.1});
  EXPECT_GT(st.a_n_eps_prob[1], 0.6);
  EXPECT_GE(st.a_n_eps_prob[1], st.a_n_eps_prob[0]);
  EXPECT_GE(st.delta_le_eps_prob[1], st.a_n_eps_prob[1] - 1e-12);
}

TEST(MaxShare, FiniteMeanShareVanishes) {
  const auto st = max_share_stats(*law(WeightSpec::Kind::uniform01), *make_finite_mean_multiplier({}),
                                  config(10'000, 200), {0.1});
  EXPECT_DOUBLE_EQ(st.a_n_eps_prob[0], 0.0);
  EXPECT_LE(st.r_n_sample.quantile(0.5), 0.05);
}

TEST(MaxShare, ParetoShareProbabilityStabilizes) {
  auto x = law(WeightSpec::Kind::uniform01);
  auto y = make_pareto_multiplier(0.5);
  const auto a = max_share_stats(*x, *y, config(200, 4000), {0.25});
  const auto b = max_share_stats(*x, *y, config(2000, 4000, 7), {0.25});
  EXPECT_GT(a.a_n_eps_prob[0], 0.05);
  EXPECT_LT(a.a_n_eps_prob[0], 0.95);
  EXPECT_NEAR(a.a_n_eps_prob[0], b.a_n_eps_prob[0], 0.04);
  EXPECT_THROW(max_share_stats(*x, *y, config(10, 10), {1.0}), parameter_error);
}

TEST(Divergence, BoundedWeightsHaveFlatMedian) {
  const auto d =
      divergence_probe(*law(WeightSpec::Kind::uniform01), *make_pareto_multiplier(0.5), config(0, 400), {100, 1000, 10'000});
  EXPECT_LT(std::abs(d.slope), 0.1);
  EXPECT_EQ(d.median_abs_tn.size(), 3u);
  EXPECT_THROW(divergence_probe(*law(WeightSpec::Kind::uniform01), *make_pareto_multiplier(0.5), config(1, 10), {10}),
               parameter_error);
}

TEST(Divergence, ExchangeableAcrossReplications) {
  // Two disjoint halves of the replications are i.i.d.: their KS distance stays small.
  const auto t = simulate_tn(*law(WeightSpec::Kind::standard_gaussian), *make_pareto_multiplier(0.5), config(200, 4000));
  Rng shuffle(SeedStream{5, 5});
  auto v = t.values;
  std::shuffle(v.begin(), v.end(), shuffle.engine());
  const auto a = EmpiricalSample::from({v.begin(), v.begin() + 2000}, 0, "");
  const auto b = EmpiricalSample::from({v.begin() + 2000, v.end()}, 0, "");
  double d = 0.0;
  for (double z : t.values) d = std::max(d, std::abs(a.ecdf(z) - b.ecdf(z)));
  EXPECT_LT(d, 1.95 * std::sqrt(2.0 / 2000.0));
}

TEST(EmpiricalSample, QuantileType7) {
  const auto s = EmpiricalSample::from({4.0, 1.0, 3.0, 2.0}, 0, "");
  EXPECT_DOUBLE_EQ(s.quantile(0.0), 1.0);
  EXPECT_DOUBLE_EQ(s.quantile(1.0), 4.0);
  EXPECT_DOUBLE_EQ(s.quantile(0.5), 2.5);
  EXPECT_DOUBLE_EQ(s.ecdf(2.0), 0.5);
  EXPECT_THROW(s.quantile(1.5), parameter_error);
}
