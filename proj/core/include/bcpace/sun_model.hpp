#pragma once

#include <optional>
#include <span>

#include "bcpace/gain.hpp"
#include "bcpace/pacing.hpp"
#include "bcpace/reduction.hpp"

namespace bcpace {

// Beat-to-beat atrioventricular conduction model. State is the atrial-His
// interval A and a slow drift R (both ms); the pacing interval H is the
// bifurcation parameter.
//
//   R' = R exp(-(A + H)/tau_fat) + fatigue exp(-H/tau_fat)
//   A' = A_min + R' + (k - s A) exp(-H/tau_rec)
//
// with (k, s) switching at A = border_a.

struct RecoveryCoefficients {
  double intercept = 0.0;  // ms
  double slope = 0.0;
};

struct SunParams {
  double a_min = 33.0;
  double tau_rec = 70.0;
  double tau_fat = 30000.0;
  double fatigue = 0.3;
  double border_a = 130.0;
  RecoveryCoefficients at_or_below_border{201.0, 0.7};
  RecoveryCoefficients above_border{500.0, 3.0};

  /// Throws InvalidArgument for non-positive fields (fatigue may be zero)
  /// and ContinuityViolation if the recovery pieces disagree at the border.
  void validate() const;
};

struct SunState {
  double a = 0.0;
  double r = 0.0;
};

SunState sun_step(const SunState& state, double h, const SunParams& params = {});

/// The model as a piecewise-smooth map in z = (A, R), nu = H, with border
/// function border_a - A, so the short-interval piece is the "above" side.
PiecewiseSmoothMap sun_piecewise_map(const SunParams& params = {});

/// Admissible fixed point at H: each piece is solved separately and the one
/// lying on its own side of the border is returned.
SunState sun_fixed_point(double h, const SunParams& params = {});

struct SunBifurcation {
  double h_bif = 0.0;
  SunState state;
};

inline constexpr double kDefaultHLow = 40.0;
inline constexpr double kDefaultHHigh = 70.0;

SunBifurcation locate_sun_bifurcation(const SunParams& params = {}, double h_lo = kDefaultHLow,
                                      double h_hi = kDefaultHHigh);
double find_H_bif(const SunParams& params = {}, double h_lo = kDefaultHLow, double h_hi = kDefaultHHigh);

ReductionResult sun_reduce(const SunParams& params = {}, double h_lo = kDefaultHLow, double h_hi = kDefaultHHigh);

struct SunGainResult {
  double gamma_sim = 0.0;
  std::optional<double> gamma_theory;  // empty for H < H_bif
  SunState even_point;
  SunState odd_point;
  std::int64_t beats = 0;
};

// Locates the bifurcation and reduces once, then runs pacing experiments on
// the full model. Paced runs start from the unpaced fixed point at H.
class SunCaseStudy {
 public:
  explicit SunCaseStudy(SunParams params = {}, double h_lo = kDefaultHLow, double h_hi = kDefaultHHigh);

  const SunParams& params() const noexcept { return params_; }
  const SunBifurcation& bifurcation() const noexcept { return bifurcation_; }
  const ReductionResult& reduction() const noexcept { return reduction_; }
  const PacingDerived& derived() const noexcept { return derived_; }
  const GainParams& gain() const noexcept { return gain_; }

  /// Throws DegenerateDelta for delta == 0 and NoConvergence if the paced
  /// orbit does not settle.
  SunGainResult gain_experiment(double h, double delta, const SimulationOptions& opts = {}) const;

  /// Grid values are mu = H - H_bif (axis mu) or delta (axis delta).
  GainCurve gain_scan(ScanAxis axis, double fixed, std::span<const double> grid,
                      const SimulationOptions& opts = {}) const;

 private:
  SunParams params_;
  SunBifurcation bifurcation_;
  ReductionResult reduction_;
  PacingDerived derived_;
  GainParams gain_;
};

/// One-shot form of SunCaseStudy::gain_experiment.
SunGainResult sun_gain_experiment(double h, double delta, const SunParams& params = {},
                                  const SimulationOptions& opts = {});

}  // namespace bcpace
