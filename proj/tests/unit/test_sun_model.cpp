#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bcpace/error.hpp"
#include "bcpace/sun_model.hpp"

namespace bcpace {
namespace {

// Independent oracle: at the bifurcation A = 130 and R is the drift fixed
// point, so H solves 130 = 33 + R*(H) + 110 exp(-H/70). Scalar bisection.
double oracle_h_bif() {
  auto r_star = [](double h) { return 0.3 * std::exp(-h / 30000.0) / (1.0 - std::exp(-(130.0 + h) / 30000.0)); };
  auto g = [&](double h) { return 33.0 + r_star(h) + 110.0 * std::exp(-h / 70.0) - 130.0; };
  double lo = 40.0, hi = 70.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const SunCaseStudy& study() {
  static const SunCaseStudy s;
  return s;
}

TEST(SunParams, DefaultsAreContinuous) {
  const SunParams p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.at_or_below_border.intercept - p.at_or_below_border.slope * p.border_a, 110.0);
  EXPECT_DOUBLE_EQ(p.above_border.intercept - p.above_border.slope * p.border_a, 110.0);
  SunParams broken;
  broken.border_a = 120.0;
  try {
    broken.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::continuity_violation);
  }
  SunParams negative;
  negative.tau_rec = -1.0;
  EXPECT_THROW(negative.validate(), Error);
}

TEST(SunStep, DecoupledWithoutFatigue) {
  SunParams p;
  p.fatigue = 0.0;
  SunState s{120.0, 0.0};
  for (int n = 0; n < 50; ++n) {
    const SunState next = sun_step(s, 60.0, p);
    const double expected = 33.0 + (s.a <= 130.0 ? 201.0 - 0.7 * s.a : 500.0 - 3.0 * s.a) * std::exp(-60.0 / 70.0);
    EXPECT_DOUBLE_EQ(next.r, 0.0);
    EXPECT_NEAR(next.a, expected, 1e-12);
    s = next;
  }
  EXPECT_THROW(sun_step(s, 0.0, p), Error);
}

TEST(SunStep, DriftUpdatedBeforeA) {
  const SunParams p;
  const SunState s{125.0, 40.0};
  const double h = 55.0;
  const double r_next = 40.0 * std::exp(-(125.0 + h) / 30000.0) + 0.3 * std::exp(-h / 30000.0);
  const SunState next = sun_step(s, h, p);
  EXPECT_NEAR(next.r, r_next, 1e-12);
  EXPECT_NEAR(next.a, 33.0 + r_next + (201.0 - 0.7 * 125.0) * std::exp(-h / 70.0), 1e-12);
}

TEST(SunStep, ContinuousAcrossBorder) {
  const auto map = sun_piecewise_map();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r_dist(0.0, 100.0), h_dist(20.0, 100.0);
  for (int t = 0; t < 1000; ++t) {
    const double z[2] = {130.0, r_dist(rng)};
    const double h = h_dist(rng);
    const Vector a = map.above(z, h), b = map.below(z, h);
    EXPECT_LE(std::abs(a[0] - b[0]), 1e-12);
    EXPECT_EQ(a[1], b[1]);
  }
}

TEST(SunBifurcation, DefaultParameters) {
  const auto bif = locate_sun_bifurcation();
  EXPECT_NEAR(bif.h_bif, 56.9078, 1e-3);
  EXPECT_NEAR(bif.h_bif, oracle_h_bif(), 1e-8);
  EXPECT_NEAR(bif.state.a, 130.0, 1e-6);
  EXPECT_NEAR(bif.state.r, 48.2, 0.05);
  const SunState next = sun_step(bif.state, bif.h_bif);
  EXPECT_NEAR(next.a, bif.state.a, 1e-9);
  EXPECT_NEAR(next.r, bif.state.r, 1e-9);
  EXPECT_DOUBLE_EQ(find_H_bif(), bif.h_bif);
}

TEST(SunBifurcation, NoFatigueClosedForm) {
  SunParams p;
  p.fatigue = 0.0;
  EXPECT_NEAR(find_H_bif(p, 1.0, 40.0), 70.0 * std::log(110.0 / 97.0), 1e-9);
  try {
    find_H_bif(p);
    FAIL() << "default bracket should not contain the fatigue-free bifurcation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_bracket);
  }
}

TEST(SunBifurcation, ShiftedBorder) {
  SunParams p;
  p.border_a = 120.0;
  // Keep the recovery curve continuous at the new border.
  p.above_border.intercept = (201.0 - 0.7 * 120.0) + 3.0 * 120.0;
  // The border is reached at a longer interval, about 70 ln 3.
  const auto bif = locate_sun_bifurcation(p, 60.0, 100.0);
  EXPECT_GT(std::abs(bif.h_bif - 56.9078), 1.0);
  EXPECT_NEAR(bif.state.a, 120.0, 1e-6);
  const SunState next = sun_step(bif.state, bif.h_bif, p);
  EXPECT_NEAR(next.a, bif.state.a, 1e-9);
  EXPECT_NEAR(next.r, bif.state.r, 1e-9);
}

TEST(SunReduce, NormalFormPassesConditions) {
  const auto& red = study().reduction();
  EXPECT_LE(red.c_residual, 1e-6);
  const auto report = check_conditions(red.normal);
  EXPECT_TRUE(report.core_conditions_pass());
  EXPECT_NE(report.contraction, ConditionStatus::fail);
  EXPECT_GT(report.spectral_radius_below, 1.0);
  // x(1) = 130 - A with a unit gradient, so b = 0 and R is a signed permutation.
  EXPECT_DOUBLE_EQ(red.shift[0], 0.0);
  EXPECT_NEAR(red.rotation(0, 0), -1.0, 1e-9);
  EXPECT_NEAR(red.rotation(0, 1), 0.0, 1e-9);
  EXPECT_GT(fixed_point_stable(red.normal, 1.0)[0], 0.0);
  const auto standalone = sun_reduce();
  EXPECT_EQ(standalone.normal.above(), red.normal.above());
}

TEST(SunReduce, FixedPointMatchesToFirstOrder) {
  const auto& s = study();
  const auto& red = s.reduction();
  auto error_at = [&](double mu) {
    const SunState fp = sun_fixed_point(s.bifurcation().h_bif + mu);
    const double z[2] = {fp.a, fp.r};
    const Vector x = red.to_normal_coordinates(z, s.bifurcation().h_bif + mu);
    return norm_inf(sub(x, fixed_point_stable(red.normal, mu)));
  };
  const double e2 = error_at(2.0), e1 = error_at(1.0), e_half = error_at(0.5);
  // Second-order remainder: halving mu quarters the error.
  EXPECT_NEAR(e2 / e1, 4.0, 0.5);
  EXPECT_NEAR(e1 / e_half, 4.0, 0.5);
  EXPECT_LT(e2, 0.1 * norm_inf(fixed_point_stable(red.normal, 2.0)));
}

TEST(SunDynamics, UnpacedAttractorsOnEachSide) {
  const auto& s = study();
  const double h_bif = s.bifurcation().h_bif;
  SimulationOptions o;
  const auto run = [&](double h) {
    const BeatMap step = [h](std::span<const double> x, std::int64_t) {
      const SunState n = sun_step({x[0], x[1]}, h);
      return Vector{n.a, n.r};
    };
    const double x0[2] = {129.0, s.bifurcation().state.r};
    return detect_period_two(step, x0, o);
  };
  const auto below = run(h_bif - 1.0);
  ASSERT_TRUE(below.converged);
  EXPECT_GT(std::max(below.even_point[0], below.odd_point[0]), 130.0);
  EXPECT_LT(std::min(below.even_point[0], below.odd_point[0]), 130.0);
  const auto above = run(h_bif + 1.0);
  ASSERT_TRUE(above.converged);
  EXPECT_NEAR(above.even_point[0], above.odd_point[0], 1e-8);
  EXPECT_LT(above.even_point[0], 130.0);
}

TEST(SunGain, FlatBelowKinkAndIncreasingAbove) {
  const auto& s = study();
  const double h_bif = s.bifurcation().h_bif;
  const double rho = s.gain().rho;
  for (double mu : {2.0, 5.0}) {
    const double kink = mu / rho;
    const double flat_ref = s.gain_experiment(h_bif + mu, 0.2 * kink).gamma_sim;
    EXPECT_NEAR(s.gain_experiment(h_bif + mu, 0.6 * kink).gamma_sim, flat_ref, 1e-3 * flat_ref);
    const double g1 = s.gain_experiment(h_bif + mu, 1.5 * kink).gamma_sim;
    const double g2 = s.gain_experiment(h_bif + mu, 2.5 * kink).gamma_sim;
    EXPECT_GT(g1, flat_ref * 1.05);
    EXPECT_GT(g2, g1);
  }
}

TEST(SunGain, LeadingOrderAgreementNearBifurcation) {
  // The theory drops O(mu) and O(delta) corrections; close to the
  // bifurcation the agreement is tight.
  const auto& s = study();
  const double h_bif = s.bifurcation().h_bif;
  for (double mu : {0.0, 0.5}) {
    for (double delta : {0.05, 0.5, 1.0}) {
      const auto r = s.gain_experiment(h_bif + mu, delta);
      ASSERT_TRUE(r.gamma_theory.has_value());
      EXPECT_NEAR(r.gamma_sim, *r.gamma_theory, (mu == 0.0 ? 0.015 : 0.03) * r.gamma_sim) << mu << ' ' << delta;
    }
  }
  const auto tiny = s.gain_experiment(h_bif + 0.05, 0.001);
  EXPECT_NEAR(tiny.gamma_sim, s.gain().gamma_const, 2e-3);
}

TEST(SunGain, ErrorsAndMetadata) {
  const auto& s = study();
  EXPECT_THROW(s.gain_experiment(s.bifurcation().h_bif, 0.0), Error);
  EXPECT_THROW(s.gain_experiment(0.5, 1.0), Error);
  const auto below = s.gain_experiment(s.bifurcation().h_bif - 1.0, 1.0);
  EXPECT_FALSE(below.gamma_theory.has_value());
  EXPECT_GT(below.gamma_sim, 0.0);
}

TEST(SunGain, ScanIsOrderedAndDeterministic) {
  const auto grid = linear_grid(0.1, 2.0, 8);
  const auto a = study().gain_scan(ScanAxis::delta, 2.0, grid);
  const auto b = study().gain_scan(ScanAxis::delta, 2.0, grid);
  ASSERT_EQ(a.samples.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.samples[i].param, grid[i]);
    ASSERT_TRUE(a.samples[i].simulated && a.samples[i].theory);
    EXPECT_EQ(*a.samples[i].simulated, *b.samples[i].simulated);
  }
}

}  // namespace
}  // namespace bcpace
