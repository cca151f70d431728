#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "bcpace/error.hpp"
#include "bcpace/gain.hpp"
#include "maps.hpp"

namespace bcpace {
namespace {

using testing::golden_map;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no bcpace::Error thrown";
  return ErrorCode::invalid_argument;
}

TEST(GainTheory, GoldenValues) {
  const auto p = gain_params(golden_map());
  EXPECT_NEAR(p.gamma_const, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.gamma_slope, 4.0 / 7.0, 1e-12);
  EXPECT_NEAR(p.rho, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(gain_theory_bc(golden_map(), 0.1, 1.0), 0.8, 1e-12);
  EXPECT_NEAR(gain_theory_bc(golden_map(), 0.5, 0.3), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(gain_theory_bc(golden_map(), 0.0, 1.0), p.bound(), 1e-12);
  EXPECT_NEAR(p.bound(), 2.0 / 3.0 + 4.0 / 21.0, 1e-12);
  EXPECT_NEAR(gain_theory_bc(p, 0.1, -1.0), 0.8, 1e-12);
}

TEST(GainTheory, Errors) {
  EXPECT_EQ(code_of([] { gain_theory_bc(golden_map(), 0.1, 0.0); }), ErrorCode::degenerate_delta);
  EXPECT_EQ(code_of([] { gain_theory_bc(golden_map(), -0.1, 1.0); }), ErrorCode::out_of_regime);
  EXPECT_EQ(code_of([] { generalized_gain(golden_map(), 0.1, 1.0, 1); }), ErrorCode::index_out_of_range);
}

TEST(GainTheory, EmpiricalFromClosedForms) {
  const auto r = predicted_response(golden_map(), 0.1, 1.0);
  EXPECT_NEAR(empirical_gain(r), 0.8, 1e-12);
  const auto u = predicted_response(golden_map(), 0.5, 0.3);
  EXPECT_NEAR(empirical_gain(u), 2.0 / 3.0, 1e-12);
  EXPECT_THROW(empirical_gain(r, 3), Error);
}

TEST(GainTheory, ShapeProperties) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 100; ++t) {
    const auto map = testing::random_valid_map(rng);
    const auto p = gain_params(map);
    EXPECT_GT(p.gamma_slope, 0.0);
    const double mu = 0.5;
    const double dcrit = mu / p.rho;
    // Flat below the kink, strictly increasing above it, bounded.
    double prev = gain_theory_bc(p, mu, 0.05 * dcrit);
    for (int k = 1; k <= 40; ++k) {
      const double delta = dcrit * (0.05 * (1 + k) + 0.013);
      const double g = gain_theory_bc(p, mu, delta);
      if (delta <= dcrit) {
        EXPECT_NEAR(g, p.gamma_const, 1e-12);
      } else {
        EXPECT_GT(g, prev);
      }
      EXPECT_LE(g, p.bound() + 1e-12);
      prev = g;
    }
  }
}

TEST(GeneralizedGain, ComponentZeroIsGain) {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 100; ++t) {
    const auto map = testing::random_valid_map(rng);
    const auto d = pacing_derived(map);
    const auto pt = testing::random_pacing_point(rng, d);
    EXPECT_NEAR(generalized_gain(d, pt.mu, pt.delta, 0), gain_theory_bc(gain_params(d), pt.mu, pt.delta), 1e-12);
    const auto r = predicted_response(d, pt.mu, pt.delta);
    for (std::size_t i = 0; i < map.dim(); ++i) {
      EXPECT_NEAR(generalized_gain(d, pt.mu, pt.delta, i), empirical_gain(r, i), 1e-9) << "component " << i;
    }
  }
}

TEST(ClassicalGain, CubicResidualAndAsymptotes) {
  EXPECT_DOUBLE_EQ(gain_classical(0.5, 0.0), 2.0);
  EXPECT_NEAR(gain_classical(0.0, 2.0), std::pow(2.0, -2.0 / 3.0), 1e-15);
  for (double mu : {0.0, 1e-6, 0.01, 0.3, 1.0, 10.0}) {
    for (double delta : {0.0, 1e-4, 0.1, 1.0, 7.0}) {
      if (mu == 0.0 && delta == 0.0) continue;
      const double g = gain_classical(mu, delta);
      EXPECT_GT(g, 0.0);
      const double res = delta * delta * g * g * g + mu * g - 1.0;
      EXPECT_LE(std::abs(res), 1e-12) << mu << ' ' << delta;
    }
  }
  EXPECT_EQ(code_of([] { gain_classical(0.0, 0.0); }), ErrorCode::degenerate_input);
  EXPECT_EQ(code_of([] { gain_classical(-1.0, 1.0); }), ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { positive_cubic_root(-1.0, 1.0); }), ErrorCode::invalid_argument);
}

TEST(ClassicalGain, DecreasingInBothParameters) {
  double prev = gain_classical(0.5, 0.05);
  for (int k = 2; k <= 40; ++k) {
    const double g = gain_classical(0.5, 0.05 * k);
    EXPECT_LT(g, prev);
    prev = g;
  }
  prev = gain_classical(0.05, 1.0);
  for (int k = 2; k <= 40; ++k) {
    const double g = gain_classical(0.05 * k, 1.0);
    EXPECT_LT(g, prev);
    prev = g;
  }
}

TEST(GainScan, GoldenDeltaScan) {
  const auto grid = linear_grid(0.05, 2.0, 12);
  const auto curve = gain_scan(golden_map(), ScanAxis::delta, 0.2, grid);
  ASSERT_EQ(curve.samples.size(), grid.size());
  for (const auto& s : curve.samples) {
    ASSERT_TRUE(s.theory && s.simulated) << s.param;
    EXPECT_NEAR(*s.theory, *s.simulated, 1e-8) << s.param;
  }
  EXPECT_EQ(curve.axis, ScanAxis::delta);
  EXPECT_DOUBLE_EQ(curve.fixed_value, 0.2);
}

TEST(GainScan, NegativeMuLeavesTheoryEmpty) {
  const std::vector<double> grid{-0.5, 0.5};
  const auto curve = gain_scan(golden_map(), ScanAxis::mu, 1.0, grid);
  EXPECT_FALSE(curve.samples[0].theory.has_value());
  EXPECT_TRUE(curve.samples[1].theory.has_value());
}

TEST(GainScan, GridValidation) {
  const std::vector<double> bad{1.0, 1.0};
  EXPECT_THROW(gain_scan(golden_map(), ScanAxis::delta, 0.1, bad), Error);
  EXPECT_THROW(gain_scan_classical(ScanAxis::delta, 0.1, std::vector<double>{}), Error);
  const auto one = linear_grid(0.3, 9.0, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(one[0], 0.3);
  const auto g = linear_grid(0.1, 2.0, 20);
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_DOUBLE_EQ(g.back(), 2.0);
  EXPECT_THROW(linear_grid(0.0, 1.0, 0), Error);
}

TEST(GainScan, ClassicalCurve) {
  const auto grid = linear_grid(0.1, 2.0, 20);
  const auto curve = gain_scan_classical(ScanAxis::delta, 0.5, grid);
  for (std::size_t i = 1; i < curve.samples.size(); ++i) {
    EXPECT_LT(*curve.samples[i].theory, *curve.samples[i - 1].theory);
    EXPECT_FALSE(curve.samples[i].simulated.has_value());
  }
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for_index(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for_index(0, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for_index(64,
                                  [](std::size_t i) {
                                    if (i == 17) throw std::runtime_error("boom");
                                  }),
               std::runtime_error);
}

}  // namespace
}  // namespace bcpace
