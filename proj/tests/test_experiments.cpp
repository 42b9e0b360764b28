//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "liemom/experiments.hpp"

using namespace liemom;

namespace {

std::vector<double> geometric(double c, long steps, double s0 = 1.0) {
  std::vector<double> v;
  for (long k = 0; k <= steps; ++k) v.push_back(s0 * std::pow(c, static_cast<double>(k)));
  return v;
}

RunSummary synthetic_run(Scheme s, double kappa, std::uint64_t seed, std::optional<double> c) {
  RunSummary r;
  r.scheme = s;
  r.kappa = kappa;
  r.seed = seed;
  r.c_emp = c;
  return r;
}

}  // namespace

TEST(EstimateRate, RecoversGeometricDecay) {
  for (double c : {0.9, 0.99, 0.999}) {
    const auto s = geometric(c, static_cast<long>(40.0 / -std::log(c)));
    const RateEstimate r = estimate_rate(s, 1e-12);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.c, c, 1e-12);
    EXPECT_EQ(r.window_begin, r.hit / 2);
    EXPECT_EQ(r.window_end, r.hit - 10);
    // first index with c^k <= 1e-12
    EXPECT_EQ(r.hit, static_cast<long>(std::ceil(std::log(1e-12) / std::log(c) - 1e-9)));
  }
}

TEST(EstimateRate, UsesTheTailOnly) {
  // fast transient then a slower regime
  std::vector<double> s = geometric(0.5, 20);
  for (int k = 0; k < 2000; ++k) s.push_back(s.back() * 0.99);
  const RateEstimate r = estimate_rate(s, 1e-12);
  EXPECT_NEAR(r.c, 0.99, 1e-12);
}

TEST(EstimateRate, RejectsShortTails) {
  EXPECT_THROW(estimate_rate(geometric(0.5, 100), 1e-12), TailTooShort);  // hits at k = 40
  EXPECT_THROW(estimate_rate(std::vector<double>{}, 1e-12), TailTooShort);
}

TEST(LeastSquares, ExactLineAndResiduals) {
  const std::vector<double> x{2, 3, 4, 5}, y{1.5, 0.5, -0.5, -1.5};
  const LinearFit f = ordinary_least_squares(x, y);
  EXPECT_DOUBLE_EQ(f.slope, -1.0);
  EXPECT_DOUBLE_EQ(f.intercept, 3.5);
  EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
  for (double r : f.residuals) EXPECT_NEAR(r, 0.0, 1e-15);
}

TEST(LeastSquares, MatchesNormalEquations) {
  const std::vector<double> x{0, 1, 2, 3, 4}, y{1.0, 2.9, 5.2, 7.1, 8.8};
  const LinearFit f = ordinary_least_squares(x, y);
  Matrix a(5, 2);
  Vector b(5);
  for (int i = 0; i < 5; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[i];
    b(i) = y[i];
  }
  const Vector beta = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  EXPECT_NEAR(f.intercept, beta(0), 1e-12);
  EXPECT_NEAR(f.slope, beta(1), 1e-12);
  EXPECT_GT(f.r_squared, 0.99);
  EXPECT_LT(f.r_squared, 1.0);
}

TEST(LeastSquares, InsufficientPoints) {
  EXPECT_THROW(ordinary_least_squares(std::vector<double>{1.0}, std::vector<double>{1.0}), InsufficientPoints);
  EXPECT_THROW(ordinary_least_squares(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}), InsufficientPoints);
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
}

TEST(FitRates, RecoversPowerLaw) {
  // 1 - c = 0.5 / kappa^0.5 exactly, with a spread across seeds that the median removes
  const std::vector<double> kappas{1e2, 1e3, 1e4, 1e5};
  std::vector<RunSummary> runs;
  for (double k : kappas) {
    const double c = 1.0 - 0.5 / std::sqrt(k);
    runs.push_back(synthetic_run(Scheme::NAGSC, k, 1, c));
    runs.push_back(synthetic_run(Scheme::NAGSC, k, 2, c - 1e-3 / k));
    runs.push_back(synthetic_run(Scheme::NAGSC, k, 3, c + 1e-3 / k));
    runs.push_back(synthetic_run(Scheme::HeavyBall, k, 1, 0.5));  // other schemes are ignored
  }
  const RateFit f = fit_rates(Scheme::NAGSC, runs, kappas);
  ASSERT_TRUE(f.fit.has_value());
  EXPECT_NEAR(f.fit->slope, -0.5, 1e-12);
  EXPECT_NEAR(f.fit->intercept, std::log10(0.5), 1e-12);
  EXPECT_EQ(f.c_seeds.front().size(), 3u);
}

TEST(FitRates, DropsFailedPointsAndReportsShortfall) {
  const std::vector<double> kappas{1e2, 1e3, 1e4, 1e5};
  std::vector<RunSummary> runs;
  for (double k : kappas) runs.push_back(synthetic_run(Scheme::HeavyBall, k, 1, 1.0 - 1.0 / k));
  runs[3].c_emp.reset();
  const RateFit f = fit_rates(Scheme::HeavyBall, runs, kappas);
  EXPECT_FALSE(f.fit.has_value());
  EXPECT_EQ(f.kappas.size(), 3u);
  EXPECT_NE(f.error.find("InsufficientPoints"), std::string::npos);
}

TEST(Sweep, SmallSweepIsReproducibleAndThreadInvariant) {
  SweepConfig cfg;
  cfg.n = 4;
  cfg.kappas = {10, 30, 100, 1000};
  cfg.seeds = {1, 2};
  cfg.schemes = {Scheme::GD, Scheme::HeavyBall, Scheme::NAGSC};
  const SweepResult a = sweep_and_fit(cfg, 1);
  const SweepResult b = sweep_and_fit(cfg, 3);
  ASSERT_EQ(a.runs.size(), 24u);
  ASSERT_EQ(a.fits.size(), 3u);
  EXPECT_TRUE(a.all_fits_ok());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].iterations, b.runs[i].iterations);
    EXPECT_EQ(a.runs[i].c_emp, b.runs[i].c_emp);
    EXPECT_EQ(a.runs[i].final_subopt, b.runs[i].final_subopt);
  }
  for (std::size_t i = 0; i < a.fits.size(); ++i) EXPECT_EQ(a.fits[i].fit->slope, b.fits[i].fit->slope);
  // ordering (scheme, kappa, seed)
  EXPECT_EQ(a.runs[0].scheme, Scheme::GD);
  EXPECT_EQ(a.runs[1].seed, 2u);
  EXPECT_EQ(a.runs[2].kappa, 30.0);
  for (const RunSummary& r : a.runs) {
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.lyapunov.violations, 0);
  }
}

TEST(Sweep, RejectsDegenerateDesigns) {
  SweepConfig cfg;
  cfg.n = 4;
  cfg.kappas = {10, 100, 1000};
  EXPECT_THROW(sweep_and_fit(cfg), InsufficientPoints);
  cfg.kappas = {10, 20, 40, 80};
  EXPECT_THROW(sweep_and_fit(cfg), InsufficientPoints);
  cfg.kappas = {};
  EXPECT_THROW(sweep_and_fit(cfg), ConfigError);
  cfg.kappas = {5, 10, 100, 1000};
  EXPECT_THROW(sweep_and_fit(cfg), ConfigError);
}

TEST(Problem, NearMinimumStartsOnTheBallBoundary) {
  SweepConfig cfg;
  EXPECT_NEAR(cfg.ball_radius(), 0.01 * std::numbers::pi, 1e-15);  // A = 1 for n >= 4
  cfg.n = 3;
  EXPECT_NEAR(cfg.ball_radius(), 0.01 * std::numbers::pi * std::sqrt(2.0), 1e-15);
  cfg.n = 2;
  EXPECT_NEAR(cfg.ball_radius(), 0.01 * std::numbers::pi, 1e-15);
  for (int n : {3, 6, 10}) {
    cfg.n = n;
    const Problem pr = make_problem(cfg, Scheme::HeavyBall, 1000.0, 11);
    EXPECT_NEAR(geodesic_distance(pr.potential.known_minimizer(), pr.g0), cfg.ball_radius(), 1e-12);
    EXPECT_EQ(pr.params.h, select_params(pr.smoothness.L, pr.smoothness.mu, Scheme::HeavyBall).h);
  }
}

TEST(Problem, OverridesAndInitModes) {
  SweepConfig cfg;
  cfg.h = 1e-3;
  cfg.gamma = 0.5;
  const Problem pr = make_problem(cfg, Scheme::NAGSC, 100.0, 1);
  EXPECT_EQ(pr.params.h, 1e-3);
  EXPECT_EQ(pr.params.gamma, 0.5);
  cfg = SweepConfig{};
  cfg.init_mode = InitMode::NearMax;
  const Problem mx = make_problem(cfg, Scheme::NAGSC, 100.0, 1);
  EXPECT_NEAR(geodesic_distance(mx.potential.stationary_point(identity_permutation(10)), mx.g0), cfg.ball_radius(),
              1e-12);
  EXPECT_EQ(parse_init_mode("near-max"), InitMode::NearMax);
  EXPECT_THROW(parse_init_mode("corner"), ConfigError);
}

TEST(RecordStride, AboutTwoThousandRows) {
  SweepConfig cfg;
  const RunTrace tr = run_single(cfg, Scheme::HeavyBall, 1000.0, 1);
  EXPECT_GT(tr.rows.size(), 500u);
  EXPECT_LT(tr.rows.size(), 8000u);
  EXPECT_EQ(tr.rows.back().k, tr.iterations);
  EXPECT_EQ(static_cast<long>(tr.subopt.size()), tr.iterations + 1);
}
