#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

#include "bcpace/matrix.hpp"
#include "bcpace/normal_form.hpp"

namespace bcpace {

using SmoothPiece = std::function<Vector(std::span<const double> z, double nu)>;
using BorderFunction = std::function<double(std::span<const double> z, double nu)>;

// Continuous two-piece map z -> f(z, nu): `above` applies where
// border(z, nu) >= 0 and `below` where border(z, nu) <= 0. The two pieces
// must agree on the border. Pieces are called concurrently during scans and
// must not share mutable state.
struct PiecewiseSmoothMap {
  std::size_t dim = 0;
  SmoothPiece above;
  SmoothPiece below;
  BorderFunction border;

  Vector operator()(std::span<const double> z, double nu) const;
};

/// Central-difference Jacobian with steps 1e-6 (1 + |z_i|).
Matrix jacobian(const SmoothPiece& f, std::span<const double> z, double nu);
/// Central-difference derivative in nu with step 1e-6 (1 + |nu|).
Vector parameter_derivative(const SmoothPiece& f, std::span<const double> z, double nu);
Vector border_gradient(const BorderFunction& beta, std::span<const double> z, double nu);
double border_parameter_derivative(const BorderFunction& beta, std::span<const double> z, double nu);

/// Fixed point of one smooth piece: damped Newton with finite-difference
/// Jacobians, falling back to 500 steps of direct iteration.
Vector solve_fixed_point(const SmoothPiece& f, std::span<const double> guess, double nu, double tol = 1e-12);

/// Largest |f(above) - f(below)| over `samples` points pushed onto the border
/// from a box of half-width `radius` around `center`.
double border_continuity_defect(const PiecewiseSmoothMap& map, std::span<const double> center, double nu,
                                double radius, int samples, std::uint64_t seed = 1);

struct BorderFixedPoint {
  Vector z;
  double nu = 0.0;
};

/// Bisects on nu for the fixed point that sits on the border, then polishes
/// (z, nu) jointly with Newton. At each nu the admissible fixed point is the
/// one whose border sign matches its piece; the stable one wins ties.
BorderFixedPoint locate_border_fixed_point(const PiecewiseSmoothMap& map, double nu_lo, double nu_hi,
                                           std::span<const double> z_guess);

struct ReductionResult {
  NormalFormMap normal;
  Matrix rotation;  // R with R grad(beta) = e1
  Vector shift;     // b
  Vector z_bif;
  double nu_bif = 0.0;
  double c_residual = 0.0;  // disagreement of the two expressions for c

  /// x = R (z - z_bif) + (nu - nu_bif) b.
  Vector to_normal_coordinates(std::span<const double> z, double nu) const;
  Vector from_normal_coordinates(std::span<const double> x, double mu) const;
};

inline constexpr double kMaxCoefficientResidual = 1e-6;

/// Linearizes both pieces at the border fixed point and changes coordinates
/// so the border becomes x(1) = 0 and mu = nu - nu_bif.
ReductionResult normal_form_reduce(const PiecewiseSmoothMap& map, std::span<const double> z_bif, double nu_bif);

}  // namespace bcpace
