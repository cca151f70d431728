#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "bcpace/matrix.hpp"
#include "bcpace/normal_form.hpp"

namespace bcpace {

// Alternate pacing perturbs the bifurcation parameter beat by beat:
// beat n uses mu + (-1)^n delta. The public API takes delta as a signed
// amplitude in that physical convention. Internally the closed forms use
// the oriented amplitude |delta| * sign(d(1)); `upper_on_odd_beats` in the
// results records where the upper point actually lands.

enum class ResponseKind { unilateral, bilateral_in_phase, bilateral_out_of_phase, unclassified };
std::string_view to_string(ResponseKind kind) noexcept;

struct PacedResponse {
  ResponseKind kind = ResponseKind::unclassified;
  Vector upper;  // larger first component
  Vector lower;
  bool upper_on_odd_beats = true;
  double mu = 0.0;
  double delta = 0.0;
};

struct PacingDerived {
  Vector d;                 // (I + A)^-1 c
  double rho = 0.0;         // |d(1)| / X_fp(1)
  Vector s_upper;           // (I - BA)^-1 (I - B) c
  Vector s_lower;           // (I - AB)^-1 (I - A) c
  Vector fixed_point_dir;   // X_fp
  PeriodTwoDirections period_two_dir;
  Vector upper_crit;        // y_u-crit / |delta|
  Vector lower_crit;        // y_l-crit / |delta|, first component zero
  /// sign(d(1)) as +-1.
  double orientation() const noexcept { return d[0] > 0.0 ? 1.0 : -1.0; }
};

/// Beat n of the paced map: evaluate(map, x, mu + (-1)^n delta).
Vector paced_step(const NormalFormMap& map, std::span<const double> x, std::int64_t beat, double mu, double delta);

/// Closed-form pacing quantities. Requires the core conditions to pass.
PacingDerived pacing_derived(const NormalFormMap& map);

/// mu_crit(delta) = rho |delta|.
double mu_crit(const PacingDerived& derived, double delta);
double mu_crit(const NormalFormMap& map, double delta);

PacedResponse unilateral_solution(const NormalFormMap& map, double mu, double delta);
PacedResponse unilateral_solution(const PacingDerived& derived, double mu, double delta);

PacedResponse bilateral_in_phase(const NormalFormMap& map, double mu, double delta);
PacedResponse bilateral_in_phase(const PacingDerived& derived, double mu, double delta);

/// Out-of-phase straddling orbit; empty when mu X_upper(1) < delta s_upper(1).
/// Only the algebraic orbit is produced, no stability claim is attached.
std::optional<PacedResponse> bilateral_out_of_phase(const NormalFormMap& map, double mu, double delta);
std::optional<PacedResponse> bilateral_out_of_phase(const PacingDerived& derived, double mu, double delta);

/// Unilateral above mu_crit, in-phase bilateral below.
PacedResponse predicted_response(const NormalFormMap& map, double mu, double delta);
PacedResponse predicted_response(const PacingDerived& derived, double mu, double delta);

/// Two-beat composition starting on an even beat, assuming the second beat
/// lands above the border: A[Ax or Bx + (mu + delta) c] + (mu - delta) c.
/// `oriented_delta` already carries sign(d(1)).
Vector two_beat_composition(const NormalFormMap& map, std::span<const double> x, double mu, double oriented_delta);

struct SimulationOptions {
  std::int64_t max_beats = 1'000'000;
  std::int64_t transient = 2000;
  double tol = 1e-10;
  int consecutive = 10;
};

// Raw outcome of iterating a beat-indexed map until its even subsequence
// settles: ||x_{n+2} - x_n||_inf <= tol for `consecutive` successive even n.
struct PeriodTwoDetection {
  bool converged = false;
  Vector even_point;
  Vector odd_point;
  std::int64_t beats = 0;
  double last_difference = 0.0;
};

using BeatMap = std::function<Vector(std::span<const double> x, std::int64_t beat)>;

PeriodTwoDetection detect_period_two(const BeatMap& step, std::span<const double> x0, const SimulationOptions& opts);

struct SimulationResult {
  PeriodTwoDetection detection;
  std::optional<PacedResponse> response;  // set when converged
};

/// Brute-force iteration of the paced normal form from x0 (beat 0 first).
/// A point within 1e-9 of the border inherits the kind of the closed-form
/// dispatch. Non-convergence is reported, not thrown.
SimulationResult simulate_paced(const NormalFormMap& map, double mu, double delta, std::span<const double> x0,
                                const SimulationOptions& opts = {});

}  // namespace bcpace
