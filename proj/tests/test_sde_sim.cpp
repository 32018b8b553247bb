#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ewslab/error.hpp"
#include "ewslab/sde_sim.hpp"

using namespace ewslab;
using namespace ewslab::sim;

namespace {

constexpr double kPi = std::numbers::pi;

ou::OUParams exou() { return ou::OUParams{0.5, 1.0, 0.1, 2.0, 1.0}; }

struct Moments {
  double mx = 0, my = 0, cxx = 0, cxy = 0, cyy = 0;
};

Moments moments(const Path& p) {
  Moments m;
  const double n = static_cast<double>(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    m.mx += p.x[i];
    m.my += p.y[i];
  }
  m.mx /= n;
  m.my /= n;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dx = p.x[i] - m.mx, dy = p.y[i] - m.my;
    m.cxx += dx * dx;
    m.cxy += dx * dy;
    m.cyy += dy * dy;
  }
  m.cxx /= n;
  m.cxy /= n;
  m.cyy /= n;
  return m;
}

}  // namespace

TEST(ExactOuSampler, ChainedStepsReproduceStationaryCovariance) {
  const Path p = sample_stationary_ou(exou(), 1'000'000, 1.0, 99);
  const Moments m = moments(p);
  const ou::Cov2 v = ou::stationary_covariance(exou());
  EXPECT_NEAR(m.cxx, v.v11, 0.02 * v.v11);
  EXPECT_NEAR(m.cxy, v.v12, 0.02 * v.v12);
  EXPECT_NEAR(m.cyy, v.v22, 0.02 * v.v22);
  // Means within 4 standard errors; the effective sample size shrinks by the
  // integrated autocorrelation (1 + phi) / (1 - phi) at unit spacing.
  const auto se = [](double var, double lambda) {
    const double phi = std::exp(-lambda);
    return std::sqrt(var * (1 + phi) / (1 - phi) / 1e6);
  };
  EXPECT_LT(std::abs(m.mx), 4 * se(v.v11, 0.5));
  EXPECT_LT(std::abs(m.my), 4 * se(v.v22, 1.0));
}

TEST(ExactOuSampler, LagOneCrossMoments) {
  const Path p = sample_stationary_ou(exou(), 1'000'000, 1.0, 5);
  double xy1 = 0, yx1 = 0;
  const std::size_t n = p.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    xy1 += p.x[i + 1] * p.y[i];  // E[X_{t+1} Y_t] = R(1)_12
    yx1 += p.y[i + 1] * p.x[i];  // E[Y_{t+1} X_t] = R(1)_21
  }
  const ou::Mat2 r = ou::lag_covariance(exou(), 1.0);
  EXPECT_NEAR(xy1 / n, r.m12, 0.03 * r.m12);
  EXPECT_NEAR(yx1 / n, r.m21, 0.03 * r.m21);
}

TEST(ExactOuSampler, ZeroStepIsIdentity) {
  NormalSource normal(1);
  const State s{0.7, -1.3};
  const State t = exact_ou_step(exou(), s, 0.0, normal);
  EXPECT_EQ(t.x, s.x);
  EXPECT_EQ(t.y, s.y);
  const ExactOuSampler sampler(exou(), 0.0);
  EXPECT_EQ(sampler.transition_covariance().v11, 0.0);
  EXPECT_EQ(sampler.transition_covariance().v22, 0.0);
}

TEST(ExactOuSampler, LongStepApproachesStationaryLaw) {
  const ExactOuSampler sampler(exou(), 200.0);
  const ou::Cov2 v = ou::stationary_covariance(exou());
  EXPECT_NEAR(sampler.transition_covariance().v11, v.v11, 1e-12);
  EXPECT_NEAR(sampler.transition_covariance().v12, v.v12, 1e-12);
  EXPECT_NEAR(sampler.transition_covariance().v22, v.v22, 1e-12);
}

TEST(ExactOuSampler, RejectsNonStationaryParams) {
  ou::OUParams p = exou();
  p.lambda_x = 0.0;
  EXPECT_THROW(ExactOuSampler(p, 1.0), Error);
}

TEST(SimulateEm, ZeroDriftZeroNoiseIsConstant) {
  const Drift zero = [](const State&, double) { return State{}; };
  const Path p = simulate_em(zero, NoiseMatrix{0, 0, 0}, State{1.5, -2.0}, 1.0, 0.01, 3);
  ASSERT_EQ(p.size(), 101u);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_EQ(p.x[i], 1.5);
    EXPECT_EQ(p.y[i], -2.0);
  }
  EXPECT_NEAR(p.times.back(), 1.0, 1e-12);
}

TEST(SimulateEm, DeterministicFoldConvergesToEquilibrium) {
  const Drift fold = [](const State& s, double) { return State{-s.x * s.x + 1.0, -s.y}; };
  const Path p = simulate_em(fold, NoiseMatrix{0, 0, 0}, State{1.2, 0.5}, 30.0, 1.0 / 30, 1);
  EXPECT_NEAR(p.x.back(), 1.0, 1e-9);
  EXPECT_NEAR(p.y.back(), 0.0, 1e-9);
}

TEST(SimulateEm, BlowUpTruncatesPath) {
  const Drift explode = [](const State& s, double) { return State{s.x * s.x, 0.0}; };
  const Path p = simulate_em(explode, NoiseMatrix{0, 0, 0}, State{2.0, 0.0}, 100.0, 0.1, 1);
  EXPECT_TRUE(p.truncated);
  EXPECT_LT(p.size(), 1001u);
}

TEST(SimulateEm, SameSeedSamePath) {
  const Drift lin = [](const State& s, double) { return State{-0.5 * s.x, -s.y}; };
  const Path a = simulate_em(lin, NoiseMatrix{}, State{}, 50.0, 0.01, 77);
  const Path b = simulate_em(lin, NoiseMatrix{}, State{}, 50.0, 0.01, 77);
  const Path c = simulate_em(lin, NoiseMatrix{}, State{}, 50.0, 0.01, 78);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, c.x);
}

TEST(FoldSimConfig, RampEndpointsExact) {
  const FoldSimConfig cfg;
  EXPECT_EQ(cfg.alpha(0.0), cfg.alpha0);
  EXPECT_EQ(cfg.alpha(cfg.t_total), cfg.alpha0 - cfg.alpha_slope_frac);
  EXPECT_EQ(cfg.raw_steps(), 300000);
  EXPECT_EQ(cfg.sample_interval(), 1.0);
  EXPECT_EQ(cfg.initial_x(), 1.0);
}

TEST(FoldSimConfig, ValidationFailures) {
  FoldSimConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FoldSimConfig{};
  cfg.subsample = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FoldSimConfig{};
  cfg.n_runs = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(SimulateFold, DefaultSamplingGrid) {
  const FoldSimConfig cfg;
  const Path p = simulate_fold(cfg, 0);
  ASSERT_GT(p.size(), 1000u);
  EXPECT_GT(p.times.front(), cfg.burn_in);
  for (std::size_t i = 1; i < p.size(); ++i) {
    EXPECT_NEAR(p.times[i] - p.times[i - 1], 1.0, 1e-9);
  }
  if (!p.tipped_at) {
    EXPECT_EQ(p.size(), 9900u);
  } else {
    EXPECT_LE(p.times.back(), *p.tipped_at);
  }
}

TEST(SimulateFold, NoNoiseTracksSquareRootOfRamp) {
  FoldSimConfig cfg;
  cfg.epsilon = 0.0;
  const Path p = simulate_fold(cfg, 0);
  if (p.tipped_at) EXPECT_LT(cfg.alpha(*p.tipped_at), cfg.alpha_cut);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = cfg.alpha(p.times[i]);
    if (a < cfg.alpha_cut) break;
    // Adiabatic lag of the slow ramp: x ~ sqrt(a) - rate / (4 a).
    EXPECT_NEAR(p.x[i], std::sqrt(a), 0.01) << "t=" << p.times[i];
    EXPECT_NEAR(p.y[i], 0.0, 1e-12);
  }
}

TEST(SimulateFold, ReproducibleAndRunDependent) {
  FoldSimConfig cfg;
  cfg.t_total = 600;
  const Path a = simulate_fold(cfg, 3);
  const Path b = simulate_fold(cfg, 3);
  const Path c = simulate_fold(cfg, 4);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.x, c.x);
}

TEST(SimulateFold, StopsAtTippingThreshold) {
  FoldSimConfig cfg;
  cfg.alpha0 = 0.05;
  cfg.alpha_slope_frac = 1.0;
  cfg.t_total = 3000;
  cfg.epsilon = 0.3;
  const Path p = simulate_fold(cfg, 0);
  ASSERT_TRUE(p.tipped_at);
  EXPECT_LT(*p.tipped_at, cfg.t_total);
  for (double x : p.x) EXPECT_GE(x, cfg.tip_threshold);
}

TEST(ObservableSeries, Projections) {
  Path p;
  p.push(0.0, State{1.0, 2.0});
  p.push(1.0, State{-0.5, 0.25});
  EXPECT_EQ(observable_series(p, {0.0}), p.x);
  const auto psi = observable_series(p, {-kPi / 4});
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(psi[i], (p.x[i] - p.y[i]) / std::sqrt(2.0), 1e-15);
  }
  const auto a = observable_series(p, {0.3});
  const auto b = observable_series(p, {0.3 + kPi});
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(a[i] + b[i], 0.0, 1e-15);
}

TEST(AnalysisCutoff, DefaultRampStopsNear8636) {
  FoldSimConfig cfg;
  cfg.epsilon = 0.0;
  const Path p = simulate_fold(cfg, 0);
  const std::size_t n = analysis_cutoff(p, cfg, 1000);
  ASSERT_GT(n, 0u);
  const double t_cut = (cfg.alpha0 - cfg.alpha_cut) * cfg.t_total / cfg.alpha_slope_frac;
  EXPECT_NEAR(t_cut, 8636.36, 0.01);
  EXPECT_LE(p.times[n - 1], t_cut);
  EXPECT_GT(p.times[n - 1], t_cut - 1.0);
}

TEST(AnalysisCutoff, TippedPathEndsBeforeTipping) {
  FoldSimConfig cfg;
  Path p;
  for (int i = 0; i < 6000; ++i) p.push(101.0 + i, State{1.0, 0.0});
  p.tipped_at = 5000.0;
  const std::size_t n = analysis_cutoff(p, cfg, 1000);
  EXPECT_LT(p.times[n - 1], 5000.0);
}

TEST(AnalysisCutoff, CutAboveStartIsEmpty) {
  FoldSimConfig cfg;
  cfg.alpha_cut = 1.5;
  cfg.epsilon = 0.0;
  cfg.t_total = 2000;
  const Path p = simulate_fold(cfg, 0);
  try {
    analysis_cutoff(p, cfg, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyAnalysisWindow);
  }
}

TEST(WritePathCsv, HeaderAndRows) {
  Path p;
  p.push(0.5, State{1.0, -2.0});
  std::ostringstream out;
  write_path_csv(out, p, ou::Observable{0.0});
  EXPECT_EQ(out.str(), "t,x,y,psi\n0.5,1,-2,1\n");
}
