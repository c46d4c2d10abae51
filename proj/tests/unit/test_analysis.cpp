#include <gtest/gtest.h>

#include <cmath>

#include "scatlab/analysis.hpp"
#include "scatlab/error.hpp"
#include "scatlab/estimation.hpp"
#include "scatlab/processes.hpp"
#include "support.hpp"

using namespace scatlab;
namespace ts = testing_support;

namespace {

NormalizedScattering synthetic(double tail_slope, int J, double j1_offset = 0.0) {
  NormalizedScattering ns;
  for (int a = 1; a <= J; ++a) {
    ns.order1_norm[a] = std::exp2(0.5 * (a - 1));
    for (int b = a + 1; b <= J; ++b) {
      const double shift = a > J / 2 ? j1_offset : 0.0;
      ns.order2_norm[{a, b}] = std::exp2(-1.0 + tail_slope * (b - a) + shift);
    }
  }
  return ns;
}

ProcessSpec spec(Family f, double theta, std::size_t n, std::uint64_t seed) {
  ProcessSpec s;
  s.family = f;
  s.theta = theta;
  s.length = n;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(FitLog2Slope, MatchesPlainRegression) {
  std::map<int, double> curve;
  std::vector<double> xs, ys;
  for (int j = 1; j <= 8; ++j) {
    curve[j] = std::exp2(0.7 * j + 0.1 * std::sin(j));
    if (j >= 2 && j <= 6) {
      xs.push_back(j);
      ys.push_back(std::log2(curve[j]));
    }
  }
  const SlopeFit f = fit_log2_slope(curve, 2, 6);
  EXPECT_NEAR(f.slope, ts::plain_slope(xs, ys), 1e-12);
  EXPECT_EQ(f.lo, 2);
  EXPECT_EQ(f.hi, 6);
  EXPECT_THROW(fit_log2_slope(curve, 7, 8), InvalidArgument);
  curve[4] = -1.0;
  EXPECT_THROW(fit_log2_slope(curve, 2, 6), InvalidArgument);
  EXPECT_NE(to_json(f).find("\"stderr\""), std::string::npos);
}

TEST(Stationarity, SyntheticCases) {
  EXPECT_TRUE(stationarity_across_scales(synthetic(-0.5, 8), 1, 5).pass);
  const StationarityReport bad = stationarity_across_scales(synthetic(-0.5, 8, 0.6), 1, 3);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.spread.at(1), 0.6, 1e-12);
  // Only one j1 per lag: nothing to compare.
  NormalizedScattering single;
  single.order2_norm = {{{2, 3}, 0.5}, {{2, 4}, 0.4}};
  EXPECT_THROW(stationarity_across_scales(single, 1, 2), InvalidArgument);
}

TEST(Stationarity, FbmPassesAndTwoRegimeFixtureFails) {
  const std::size_t n = 1 << 17;
  const FilterBank bank = build_filter_bank(n, 1, 12);
  const auto fbm = simulate(spec(Family::kFbm, 0.5, n, 3)).series;
  const NormalizedScattering a = normalize(scatter(fbm, bank, 2, 1, 10));
  EXPECT_TRUE(stationarity_across_scales(a, 1, 6).pass);

  // Sparse large jumps on top of a Brownian path: jump-dominated below the
  // inter-arrival scale, Gaussian above it.
  const auto jumps = simulate(spec(Family::kPoisson, std::exp2(-9), n, 4)).series;
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = fbm.samples[i] + 60.0 * jumps.samples[i];
  const NormalizedScattering b = normalize(scatter(TimeSeries::single(mix), bank, 2, 1, 10));
  const StationarityReport r = stationarity_across_scales(b, 1, 6);
  EXPECT_FALSE(r.pass);
}

TEST(Intermittency, Labels) {
  EXPECT_EQ(intermittency_summary(synthetic(-0.5, 9)).label, "gaussian-like");
  EXPECT_EQ(intermittency_summary(synthetic(-0.25, 9)).label, "intermediate");
  EXPECT_EQ(intermittency_summary(synthetic(-0.02, 9)).label, "highly intermittent");
  const IntermittencyReport r = intermittency_summary(synthetic(-0.3, 9));
  EXPECT_NEAR(r.tail_slope, -0.3, 1e-12);
  EXPECT_NEAR(r.tail_curve.at(4), -1.0 - 1.2, 1e-12);
  // Energy of j1 = 1 sums over j2 = 2..9.
  double e = 0.0;
  for (int l = 1; l <= 8; ++l) e += std::exp2(2.0 * (-1.0 - 0.3 * l));
  EXPECT_NEAR(r.energy.at(1), e, 1e-12);
}

TEST(Intermittency, FbmIsGaussianLikeAndScaleInvariant) {
  const std::size_t n = 1 << 16;
  const FilterBank bank = build_filter_bank(n, 1, 11);
  const auto fbm = simulate(spec(Family::kFbm, 0.7, n, 8)).series;
  std::vector<double> scaled(fbm.samples);
  for (auto& v : scaled) v *= 1e-3;
  const IntermittencyReport a = intermittency_summary(normalize(scatter(fbm, bank, 2, 1, 9)));
  const IntermittencyReport b = intermittency_summary(normalize(scatter(TimeSeries::single(scaled), bank, 2, 1, 9)));
  EXPECT_EQ(a.label, "gaussian-like");
  EXPECT_NEAR(a.tail_slope, b.tail_slope, 1e-10);
  EXPECT_NE(to_json(a).find("gaussian-like"), std::string::npos);
}

// Synthetic stand-in for the model comparison on market data: the walk's own
// family should recover its parameter and fit best among the three.
TEST(ModelComparison, MrwFixturePrefersMrw) {
  const std::size_t len = 4096;
  ProcessSpec data_spec = spec(Family::kMrw, 0.2, len, 21);
  data_spec.n_realizations = 32;
  const TimeSeries data = simulate(data_spec).series;
  auto bank = std::make_shared<const FilterBank>(build_filter_bank(len, 1, 7));

  struct Model {
    Family family;
    double lo, hi;
  };
  std::map<Family, GmmFit> fits;
  for (const Model& m : {Model{Family::kFbm, 0.05, 0.95}, Model{Family::kLevyStable, 1.05, 1.95},
                         Model{Family::kMrw, 0.01, 0.6}}) {
    ProcessSpec model = spec(m.family, m.lo, len, 0);
    MomentCondition mc = make_moment_condition(data, bank, 1, 6, model, std::nullopt, MomentKind::kNormalized);
    mc.sim_seed = 33;
    ScalarSearch search;
    search.lo = m.lo;
    search.hi = m.hi;
    search.rel_tol = 1e-3;
    fits[m.family] = gmm_two_step(mc, search);
  }
  EXPECT_NEAR(fits[Family::kMrw].theta_hat, 0.2, 0.05);
  EXPECT_LT(fits[Family::kMrw].chi2_red, fits[Family::kFbm].chi2_red);
  EXPECT_LT(fits[Family::kMrw].chi2_red, fits[Family::kLevyStable].chi2_red);
  for (const auto& [f, fit] : fits) RecordProperty(to_string(f), std::to_string(fit.chi2_red));
}
