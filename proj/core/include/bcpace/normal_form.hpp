#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "bcpace/matrix.hpp"

namespace bcpace {

// Open inequalities in the condition checks must hold by this margin.
inline constexpr double kConditionMargin = 1e-10;
inline constexpr std::uint64_t kDefaultCertificateSeed = 0x5eed'b0c1;

// Piecewise-linear border-collision normal form
//
//   x -> A x + c mu   if x(1) >= 0
//   x -> B x + c mu   if x(1) <= 0
//
// with the border fixed at x(1) = 0. Continuity across the border forces
// B - A to vanish outside its first column; the constructor enforces this.
class NormalFormMap {
 public:
  static constexpr double kContinuityTolerance = 1e-9;

  NormalFormMap(Matrix above, Matrix below, Vector coupling, double continuity_tolerance = kContinuityTolerance);

  std::size_t dim() const noexcept { return coupling_.size(); }
  /// Jacobian on the x(1) >= 0 side.
  const Matrix& above() const noexcept { return above_; }
  /// Jacobian on the x(1) <= 0 side.
  const Matrix& below() const noexcept { return below_; }
  const Vector& coupling() const noexcept { return coupling_; }

 private:
  Matrix above_;
  Matrix below_;
  Vector coupling_;
};

/// One iterate of the normal form. Ties on the border take the A branch.
Vector evaluate(const NormalFormMap& map, std::span<const double> x, double mu);

/// (I - A)^-1 c; the stable fixed point is mu times this.
Vector fixed_point_direction(const NormalFormMap& map);
/// Stable fixed point mu (I - A)^-1 c for mu > 0.
Vector fixed_point_stable(const NormalFormMap& map, double mu);
/// Unstable fixed point mu (I - B)^-1 c for mu < 0.
Vector fixed_point_unstable(const NormalFormMap& map, double mu);

struct PeriodTwoDirections {
  Vector upper;  // (I - BA)^-1 (I + B) c
  Vector lower;  // (I - AB)^-1 (I + A) c
};

struct PeriodTwoOrbit {
  Vector upper;  // point with x(1) > 0
  Vector lower;  // point with x(1) < 0
  PeriodTwoDirections per_unit_mu;
};

PeriodTwoDirections period_two_directions(const NormalFormMap& map);
/// Period-two orbit of the unpaced map for mu < 0.
PeriodTwoOrbit period_two(const NormalFormMap& map, double mu);

enum class ConditionStatus { pass, fail, unverified };
std::string_view to_string(ConditionStatus status) noexcept;

struct ContractionCertificate {
  Matrix s;
  double theta = 0.0;  // max(||A^2||_S, ||AB||_S)
};

// Outcome of the existence/stability checks for a B/C period-doubling. The
// optional witnesses are empty when the underlying solve failed.
struct ConditionReport {
  ConditionStatus fixed_point = ConditionStatus::fail;        // stable fixed point above the border
  ConditionStatus unstable_point = ConditionStatus::fail;     // unstable fixed point below the border
  ConditionStatus period_two = ConditionStatus::fail;         // stable straddling period-two orbit
  ConditionStatus pacing_nondegenerate = ConditionStatus::fail;
  ConditionStatus contraction = ConditionStatus::unverified;

  ComplexList eigenvalues_above;
  ComplexList eigenvalues_below;
  ComplexList eigenvalues_product;  // of AB

  double spectral_radius_above = 0.0;
  double spectral_radius_below = 0.0;
  double spectral_radius_product = 0.0;
  std::optional<double> fixed_point_first;     // X_fp(1)
  std::optional<double> unstable_first;        // ((I - B)^-1 c)(1)
  std::optional<double> upper_first;           // X_upper(1)
  std::optional<double> lower_first;           // X_lower(1)
  std::optional<double> pacing_direction_first;  // d(1)
  std::optional<ContractionCertificate> certificate;

  /// The conditions every closed-form pacing result relies on.
  bool core_conditions_pass() const noexcept {
    return fixed_point == ConditionStatus::pass && unstable_point == ConditionStatus::pass &&
           period_two == ConditionStatus::pass && pacing_nondegenerate == ConditionStatus::pass;
  }
};

/// Checks existence of the stable fixed point, the unstable fixed point, the
/// period-two orbit, non-degenerate pacing response, and (optionally) looks
/// for a contraction certificate.
ConditionReport check_conditions(const NormalFormMap& map, bool search_certificate = true,
                                 std::uint64_t seed = kDefaultCertificateSeed);


/// Searches for S with ||S A^2 S^-1|| < 1 and ||S A B S^-1|| < 1. Candidates
/// are the inverse eigenvector bases of A^2 and AB, then 200 random
/// well-conditioned matrices. Absence does not imply instability.
std::optional<ContractionCertificate> contraction_certificate(const NormalFormMap& map,
                                                              std::uint64_t seed = kDefaultCertificateSeed);

}  // namespace bcpace
