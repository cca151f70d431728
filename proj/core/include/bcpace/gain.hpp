#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bcpace/normal_form.hpp"
#include "bcpace/pacing.hpp"

namespace bcpace {

// Prebifurcation gain: spread of the first component of the paced orbit
// divided by twice the pacing amplitude.
//
// For mu >= 0 the B/C gain is piecewise:
//   Gamma = gamma_const                                if mu >= rho |delta|
//   Gamma = gamma_const + gamma_slope (rho - mu/|delta|)  otherwise
// with gamma_const = |d(1)| and gamma_slope = (X_lower(1) - X_upper(1)) / 2.
struct GainParams {
  double gamma_const = 0.0;
  double gamma_slope = 0.0;
  double rho = 0.0;

  /// Supremum of the B/C gain over mu >= 0.
  double bound() const noexcept { return gamma_const + gamma_slope * rho; }
};

GainParams gain_params(const NormalFormMap& map);
GainParams gain_params(const PacingDerived& derived);

double gain_theory_bc(const GainParams& params, double mu, double delta);
double gain_theory_bc(const NormalFormMap& map, double mu, double delta);

/// Gain measured on an arbitrary component (zero-based). Component 0 is the
/// ordinary gain; other components may be negative or non-monotone.
double generalized_gain(const NormalFormMap& map, double mu, double delta, std::size_t component);
double generalized_gain(const PacingDerived& derived, double mu, double delta, std::size_t component);

/// (upper(i) - lower(i)) / (2 |delta|) of any paced response.
double empirical_gain(const PacedResponse& response, std::size_t component = 0);

/// Unique positive root of cubic * G^3 + linear * G - 1 = 0 (both >= 0, not
/// both zero), bisected to full double precision.
double positive_cubic_root(double cubic, double linear);

/// Classical period-doubling gain: positive root of delta^2 G^3 + mu G - 1.
double gain_classical(double mu, double delta);

enum class ScanAxis { mu, delta };
std::string_view to_string(ScanAxis axis) noexcept;

struct GainSample {
  double param = 0.0;
  std::optional<double> theory;
  std::optional<double> simulated;
};

struct GainCurve {
  ScanAxis axis = ScanAxis::delta;
  double fixed_value = 0.0;
  std::vector<GainSample> samples;
};

/// Sweeps mu (delta fixed) or delta (mu fixed) over a strictly increasing
/// grid. Each point carries the closed-form gain and the gain measured by
/// simulate_paced started from the unpaced fixed point. Failures at a point
/// leave the corresponding field empty.
GainCurve gain_scan(const NormalFormMap& map, ScanAxis axis, double fixed, std::span<const double> grid,
                    const SimulationOptions& opts = {});

/// Same sweep for the classical cubic; no simulated column.
GainCurve gain_scan_classical(ScanAxis axis, double fixed, std::span<const double> grid);

/// Evenly spaced grid; a single point when count == 1.
std::vector<double> linear_grid(double start, double stop, std::size_t count);

/// Runs `fn(i)` for i in [0, count) on a small thread pool. Results are
/// written by index so output order never depends on scheduling. The first
/// exception thrown by `fn` is rethrown once all workers have stopped.
void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace bcpace
