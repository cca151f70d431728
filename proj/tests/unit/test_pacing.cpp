#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bcpace/error.hpp"
#include "bcpace/pacing.hpp"
#include "maps.hpp"

namespace bcpace {
namespace {

using testing::golden_map;

constexpr double kTight = 1e-12;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no bcpace::Error thrown";
  return ErrorCode::invalid_argument;
}

SimulationOptions precise() {
  SimulationOptions o;
  o.tol = 1e-13;
  return o;
}

TEST(PacingDerived, GoldenValues) {
  // a = 1/2, b = -3/2, c = 1 by hand:
  // d = c/(1+a), X_fp = c/(1-a), s_u = (1-b)c/(1-ab), s_l = (1-a)c/(1-ab).
  const double a = 0.5, b = -1.5, c = 1.0;
  const auto d = pacing_derived(golden_map());
  EXPECT_NEAR(d.d[0], c / (1 + a), kTight);
  EXPECT_NEAR(d.fixed_point_dir[0], c / (1 - a), kTight);
  EXPECT_NEAR(d.rho, (c / (1 + a)) / (c / (1 - a)), kTight);
  EXPECT_NEAR(d.rho, 1.0 / 3.0, kTight);
  EXPECT_NEAR(d.s_upper[0], (1 - b) * c / (1 - a * b), kTight);
  EXPECT_NEAR(d.s_upper[0], 10.0 / 7.0, kTight);
  EXPECT_NEAR(d.s_lower[0], 2.0 / 7.0, kTight);
  EXPECT_NEAR(d.period_two_dir.upper[0], (1 + b) * c / (1 - a * b), kTight);
  EXPECT_NEAR(d.period_two_dir.lower[0], (1 + a) * c / (1 - a * b), kTight);
  EXPECT_DOUBLE_EQ(d.orientation(), 1.0);
  EXPECT_NEAR(d.upper_crit[0], 2.0 / 3.0 + 2.0 / 3.0, kTight);
  EXPECT_NEAR(d.lower_crit[0], 0.0, kTight);
}

TEST(PacingDerived, RejectsInvalidMaps) {
  EXPECT_EQ(code_of([] { pacing_derived(NormalFormMap(Matrix{{0.5}}, Matrix{{-3.0}}, Vector{1.0})); }),
            ErrorCode::condition_violated);
}

TEST(Responses, GoldenBilateral) {
  const auto r = bilateral_in_phase(golden_map(), 0.1, 1.0);
  EXPECT_EQ(r.kind, ResponseKind::bilateral_in_phase);
  EXPECT_NEAR(r.upper[0], 1.4, kTight);
  EXPECT_NEAR(r.lower[0], -0.2, kTight);
  EXPECT_TRUE(r.upper_on_odd_beats);
  EXPECT_EQ(predicted_response(golden_map(), 0.1, 1.0).kind, ResponseKind::bilateral_in_phase);
}

TEST(Responses, GoldenUnilateral) {
  const auto r = unilateral_solution(golden_map(), 0.5, 0.3);
  EXPECT_EQ(r.kind, ResponseKind::unilateral);
  EXPECT_NEAR(r.upper[0], 1.2, kTight);
  EXPECT_NEAR(r.lower[0], 0.8, kTight);
  EXPECT_EQ(predicted_response(golden_map(), 0.5, 0.3).kind, ResponseKind::unilateral);
  // delta = 0 collapses onto the fixed point.
  const auto z = unilateral_solution(golden_map(), 0.5, 0.0);
  EXPECT_NEAR(z.upper[0], 1.0, kTight);
  EXPECT_NEAR(z.lower[0], 1.0, kTight);
}

TEST(Responses, GoldenOutOfPhase) {
  // Exists iff mu X_u(1) >= delta s_u(1), i.e. mu <= -5 delta.
  const auto r = bilateral_out_of_phase(golden_map(), -6.0, 1.0);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->kind, ResponseKind::bilateral_out_of_phase);
  EXPECT_NEAR(r->upper[0], 2.0 / 7.0, kTight);
  EXPECT_NEAR(r->lower[0], -34.0 / 7.0, kTight);
  EXPECT_FALSE(r->upper_on_odd_beats);
  EXPECT_TRUE(bilateral_out_of_phase(golden_map(), -5.0, 1.0).has_value());
  EXPECT_FALSE(bilateral_out_of_phase(golden_map(), -4.999, 1.0).has_value());
  EXPECT_FALSE(bilateral_out_of_phase(golden_map(), 0.1, 1.0).has_value());
  // A genuine period-two orbit of the paced map with the upper point on even beats.
  const Vector next = paced_step(golden_map(), r->upper, 0, -6.0, 1.0);
  EXPECT_NEAR(next[0], r->lower[0], kTight);
  EXPECT_NEAR(paced_step(golden_map(), next, 1, -6.0, 1.0)[0], r->upper[0], kTight);
}

TEST(Responses, RegimeErrors) {
  EXPECT_EQ(code_of([] { mu_crit(golden_map(), 0.0); }), ErrorCode::degenerate_delta);
  EXPECT_EQ(code_of([] { unilateral_solution(golden_map(), 0.1, 1.0); }), ErrorCode::out_of_regime);
  EXPECT_EQ(code_of([] { bilateral_in_phase(golden_map(), 0.5, 1.0); }), ErrorCode::out_of_regime);
  EXPECT_EQ(code_of([] { bilateral_in_phase(golden_map(), 0.5, 0.0); }), ErrorCode::degenerate_delta);
  EXPECT_EQ(code_of([] { predicted_response(golden_map(), 0.5, 0.0); }), ErrorCode::degenerate_delta);
}

TEST(Responses, ContinuousAtCriticalMu) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    const auto map = testing::random_valid_map(rng);
    const auto d = pacing_derived(map);
    const double delta = t % 2 ? 0.7 : -0.7;
    const double mc = mu_crit(d, delta);
    const auto u = unilateral_solution(d, mc, delta);
    const auto b = bilateral_in_phase(d, mc, delta);
    EXPECT_LT(norm_inf(sub(u.upper, b.upper)), 1e-9);
    EXPECT_LT(norm_inf(sub(u.lower, b.lower)), 1e-9);
    EXPECT_NEAR(u.lower[0], 0.0, 1e-9);
    EXPECT_LT(norm_inf(sub(u.upper, scaled(std::abs(delta), d.upper_crit))), 1e-9);
    EXPECT_LT(norm_inf(sub(u.lower, scaled(std::abs(delta), d.lower_crit))), 1e-9);
  }
}

TEST(Responses, NegativeDeltaSwapsBeatParity) {
  const auto pos = predicted_response(golden_map(), 0.1, 1.0);
  const auto neg = predicted_response(golden_map(), 0.1, -1.0);
  EXPECT_NEAR(pos.upper[0], neg.upper[0], kTight);
  EXPECT_NEAR(pos.lower[0], neg.lower[0], kTight);
  EXPECT_NE(pos.upper_on_odd_beats, neg.upper_on_odd_beats);
  const auto sim = simulate_paced(golden_map(), 0.1, -1.0, Vector{0.0}, precise());
  ASSERT_TRUE(sim.response);
  EXPECT_FALSE(sim.response->upper_on_odd_beats);
  EXPECT_EQ(sim.response->kind, ResponseKind::bilateral_in_phase);
}

TEST(Simulation, GoldenMatchesClosedForm) {
  const auto sim = simulate_paced(golden_map(), 0.1, 1.0, Vector{0.0}, precise());
  ASSERT_TRUE(sim.detection.converged);
  ASSERT_TRUE(sim.response);
  EXPECT_EQ(sim.response->kind, ResponseKind::bilateral_in_phase);
  EXPECT_NEAR(sim.response->upper[0], 1.4, 1e-12);
  EXPECT_NEAR(sim.response->lower[0], -0.2, 1e-12);

  const auto uni = simulate_paced(golden_map(), 0.5, 0.3, Vector{1.0}, precise());
  ASSERT_TRUE(uni.response);
  EXPECT_EQ(uni.response->kind, ResponseKind::unilateral);
  EXPECT_NEAR(uni.response->upper[0], 1.2, 1e-12);
  EXPECT_NEAR(uni.response->lower[0], 0.8, 1e-12);
}

TEST(Simulation, ZeroDeltaSettlesOnFixedPoint) {
  const auto sim = simulate_paced(golden_map(), 0.5, 0.0, Vector{0.0}, precise());
  ASSERT_TRUE(sim.response);
  EXPECT_NEAR(sim.response->upper[0], 1.0, 1e-12);
  EXPECT_NEAR(sim.response->lower[0], 1.0, 1e-12);
  EXPECT_EQ(sim.response->kind, ResponseKind::unilateral);
}

TEST(Simulation, DivergenceIsReportedNotThrown) {
  const NormalFormMap expanding(Matrix{{-1.2}}, Matrix{{-2.0}}, Vector{1.0});
  SimulationOptions o;
  o.max_beats = 5000;
  const auto sim = simulate_paced(expanding, 0.1, 0.5, Vector{0.0}, o);
  EXPECT_FALSE(sim.detection.converged);
  EXPECT_FALSE(sim.response.has_value());
  EXPECT_THROW(simulate_paced(golden_map(), 0.1, 0.5, Vector{0.0, 1.0}), Error);
}

TEST(Simulation, DetectorOnGenericBeatMap) {
  // x -> -x/2 + (-1)^n. With x_o = -x_e/2 + 1 and x_e = -x_o/2 - 1 the
  // orbit is x_e = -2, x_o = 2.
  const BeatMap step = [](std::span<const double> x, std::int64_t n) {
    return Vector{-0.5 * x[0] + (n % 2 == 0 ? 1.0 : -1.0)};
  };
  const auto det = detect_period_two(step, Vector{0.0}, precise());
  ASSERT_TRUE(det.converged);
  EXPECT_NEAR(det.even_point[0], -2.0, 1e-12);
  EXPECT_NEAR(det.odd_point[0], 2.0, 1e-12);
}

TEST(Simulation, TwoBeatCompositionFixesLowerPoint) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const auto map = testing::random_valid_map(rng);
    const auto d = pacing_derived(map);
    const auto p = testing::random_pacing_point(rng, d);
    const auto r = predicted_response(d, p.mu, p.delta);
    // In oriented terms the lower point takes mu + delta and the upper point
    // lands above the border, which is what the composition assumes.
    const double oriented = std::abs(p.delta) * d.orientation();
    EXPECT_LT(norm_inf(sub(two_beat_composition(map, r.lower, p.mu, oriented), r.lower)), 1e-9) << "trial " << t;
  }
}

TEST(Simulation, RandomMapsMatchPrediction) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const auto map = testing::random_valid_map(rng);
    const auto d = pacing_derived(map);
    const auto p = testing::random_pacing_point(rng, d);
    const auto pred = predicted_response(d, p.mu, p.delta);
    const auto sim = simulate_paced(map, p.mu, p.delta, scaled(p.mu, d.fixed_point_dir), precise());
    ASSERT_TRUE(sim.response) << "trial " << t;
    EXPECT_EQ(sim.response->kind, pred.kind) << "trial " << t;
    EXPECT_EQ(sim.response->upper_on_odd_beats, pred.upper_on_odd_beats) << "trial " << t;
    EXPECT_LT(norm_inf(sub(sim.response->upper, pred.upper)), 1e-8) << "trial " << t;
    EXPECT_LT(norm_inf(sub(sim.response->lower, pred.lower)), 1e-8) << "trial " << t;
  }
}

}  // namespace
}  // namespace bcpace
