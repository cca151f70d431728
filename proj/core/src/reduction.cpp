#include "bcpace/reduction.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

constexpr double kRelStep = 1e-6;
constexpr int kNewtonIterations = 100;
constexpr int kFallbackIterations = 500;
constexpr double kBracketWidth = 1e-9;
constexpr double kBorderFixedPointTol = 1e-9;

Vector checked(Vector v) {
  if (!all_finite(v)) throw Error(ErrorCode::evaluation_failure, "smooth piece returned a non-finite value");
  return v;
}

double checked(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::evaluation_failure, "border function returned a non-finite value");
  return v;
}

Vector residual(const SmoothPiece& f, std::span<const double> z, double nu) { return sub(checked(f(z, nu)), z); }

double fixed_point_scale(std::span<const double> z) { return 1.0 + norm_inf(z); }

struct Candidate {
  Vector z;
  double border = 0.0;
  bool stable = false;
};

std::optional<Candidate> piece_candidate(const SmoothPiece& f, const BorderFunction& beta, std::span<const double> guess,
                                         double nu) {
  try {
    Candidate c;
    c.z = solve_fixed_point(f, guess, nu);
    c.border = checked(beta(c.z, nu));
    c.stable = spectral_radius(jacobian(f, c.z, nu)) < 1.0;
    return c;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::no_convergence || e.code() == ErrorCode::singular_matrix) return std::nullopt;
    throw;
  }
}

// Admissible fixed point of the full map at nu: the piece's fixed point must
// lie on that piece's side of the border.
Candidate admissible_fixed_point(const PiecewiseSmoothMap& map, std::span<const double> guess, double nu) {
  auto above = piece_candidate(map.above, map.border, guess, nu);
  auto below = piece_candidate(map.below, map.border, guess, nu);
  const bool ok_above = above && above->border >= 0.0;
  const bool ok_below = below && below->border <= 0.0;
  if (ok_above && ok_below) {
    if (below->stable && !above->stable) return *below;
    return *above;
  }
  if (ok_above) return *above;
  if (ok_below) return *below;
  throw Error(ErrorCode::no_convergence, "no admissible fixed point at nu = " + std::to_string(nu));
}

// Newton on (z, nu) for f_above(z, nu) = z, beta(z, nu) = 0.
std::optional<BorderFixedPoint> polish_border_point(const PiecewiseSmoothMap& map, Vector z, double nu) {
  const std::size_t m = map.dim;
  auto system = [&](std::span<const double> w) {
    std::span<const double> zz = w.first(m);
    Vector out = residual(map.above, zz, w[m]);
    out.push_back(checked(map.border(zz, w[m])));
    return out;
  };
  Vector w = z;
  w.push_back(nu);
  for (int it = 0; it < 20; ++it) {
    const Vector r = system(w);
    if (norm_inf(r) <= 1e-14 * fixed_point_scale(w)) break;
    Matrix jac(m + 1, m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      const double h = kRelStep * (1.0 + std::abs(w[j]));
      Vector wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const Vector fp = system(wp), fm = system(wm);
      for (std::size_t i = 0; i <= m; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
    try {
      w = sub(w, lu_solve(jac, r));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::singular_matrix) return std::nullopt;
      throw;
    }
  }
  BorderFixedPoint p{Vector(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(m)), w[m]};
  return p;
}

}  // namespace

Vector PiecewiseSmoothMap::operator()(std::span<const double> z, double nu) const {
  return border(z, nu) >= 0.0 ? above(z, nu) : below(z, nu);
}

Matrix jacobian(const SmoothPiece& f, std::span<const double> z, double nu) {
  const std::size_t m = z.size();
  Vector zp(z.begin(), z.end());
  Matrix jac;
  for (std::size_t j = 0; j < m; ++j) {
    const double h = kRelStep * (1.0 + std::abs(z[j]));
    zp[j] = z[j] + h;
    const Vector fp = checked(f(zp, nu));
    zp[j] = z[j] - h;
    const Vector fm = checked(f(zp, nu));
    zp[j] = z[j];
    if (jac.empty()) jac = Matrix(fp.size(), m);
    for (std::size_t i = 0; i < fp.size(); ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
  }
  return jac;
}

Vector parameter_derivative(const SmoothPiece& f, std::span<const double> z, double nu) {
  const double h = kRelStep * (1.0 + std::abs(nu));
  return scaled(1.0 / (2.0 * h), sub(checked(f(z, nu + h)), checked(f(z, nu - h))));
}

Vector border_gradient(const BorderFunction& beta, std::span<const double> z, double nu) {
  Vector zp(z.begin(), z.end());
  Vector g(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double h = kRelStep * (1.0 + std::abs(z[j]));
    zp[j] = z[j] + h;
    const double bp = checked(beta(zp, nu));
    zp[j] = z[j] - h;
    const double bm = checked(beta(zp, nu));
    zp[j] = z[j];
    g[j] = (bp - bm) / (2.0 * h);
  }
  return g;
}

double border_parameter_derivative(const BorderFunction& beta, std::span<const double> z, double nu) {
  const double h = kRelStep * (1.0 + std::abs(nu));
  return (checked(beta(z, nu + h)) - checked(beta(z, nu - h))) / (2.0 * h);
}

Vector solve_fixed_point(const SmoothPiece& f, std::span<const double> guess, double nu, double tol) {
  if (!all_finite(guess)) throw Error(ErrorCode::invalid_argument, "fixed-point guess must be finite");
  Vector z(guess.begin(), guess.end());
  const Matrix id = Matrix::identity(z.size());
  bool newton_ok = true;
  try {
    Vector r = residual(f, z, nu);
    for (int it = 0; it < kNewtonIterations && norm_inf(r) > tol * fixed_point_scale(z); ++it) {
      const Vector step = lu_solve(jacobian(f, z, nu) - id, r);
      double lambda = 1.0;
      bool accepted = false;
      for (int k = 0; k < 30; ++k, lambda *= 0.5) {
        Vector trial = axpy(z, -lambda, step);
        Vector rt = residual(f, trial, nu);
        if (norm_inf(rt) < norm_inf(r)) {
          z = std::move(trial);
          r = std::move(rt);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    newton_ok = norm_inf(r) <= tol * fixed_point_scale(z);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular_matrix && e.code() != ErrorCode::evaluation_failure) throw;
    newton_ok = false;
    z.assign(guess.begin(), guess.end());
  }
  if (!newton_ok) {
    for (int it = 0; it < kFallbackIterations; ++it) z = checked(f(z, nu));
  }
  const double res = norm_inf(residual(f, z, nu));
  if (!(res <= std::max(tol, kBorderFixedPointTol) * fixed_point_scale(z))) {
    throw Error(ErrorCode::no_convergence, "fixed-point solve left residual " + std::to_string(res));
  }
  return z;
}

double border_continuity_defect(const PiecewiseSmoothMap& map, std::span<const double> center, double nu,
                                double radius, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector z(center.begin(), center.end());
    for (auto& e : z) e += radius * u(rng);
    for (int it = 0; it < 60; ++it) {
      const double b = checked(map.border(z, nu));
      if (std::abs(b) <= 1e-14 * fixed_point_scale(z)) break;
      const Vector g = border_gradient(map.border, z, nu);
      const double gg = dot(g, g);
      if (gg == 0.0) break;
      z = axpy(z, -b / gg, g);
    }
    worst = std::max(worst, norm_inf(sub(checked(map.above(z, nu)), checked(map.below(z, nu)))));
  }
  return worst;
}

BorderFixedPoint locate_border_fixed_point(const PiecewiseSmoothMap& map, double nu_lo, double nu_hi,
                                           std::span<const double> z_guess) {
  if (z_guess.size() != map.dim) throw Error(ErrorCode::dimension_mismatch, "guess length differs from map dimension");
  if (!(nu_lo < nu_hi)) throw Error(ErrorCode::invalid_argument, "bracket must satisfy nu_lo < nu_hi");
  Candidate lo = admissible_fixed_point(map, z_guess, nu_lo);
  Candidate hi = admissible_fixed_point(map, lo.z, nu_hi);
  if (lo.border == 0.0) return {lo.z, nu_lo};
  if (hi.border == 0.0) return {hi.z, nu_hi};
  if ((lo.border > 0.0) == (hi.border > 0.0)) {
    throw Error(ErrorCode::no_bracket, "border value of the fixed point has the same sign at both ends of [" +
                                           std::to_string(nu_lo) + ", " + std::to_string(nu_hi) + "]");
  }
  double a = nu_lo, b = nu_hi;
  Candidate mid = lo;
  while (b - a > kBracketWidth) {
    const double c = 0.5 * (a + b);
    if (c <= a || c >= b) break;
    mid = admissible_fixed_point(map, mid.z, c);
    if (mid.border == 0.0) {
      a = b = c;
      break;
    }
    if ((mid.border > 0.0) == (lo.border > 0.0)) {
      a = c;
    } else {
      b = c;
    }
  }
  BorderFixedPoint result{mid.z, 0.5 * (a + b)};
  if (auto polished = polish_border_point(map, mid.z, result.nu)) {
    if (std::abs(polished->nu - result.nu) <= 1e-6 * (1.0 + std::abs(result.nu)) && all_finite(polished->z)) {
      result = *polished;
    }
  }
  const double border_value = checked(map.border(result.z, result.nu));
  const double fp_residual = norm_inf(sub(checked(map(result.z, result.nu)), result.z));
  if (std::abs(border_value) > kBorderFixedPointTol || fp_residual > kBorderFixedPointTol) {
    throw Error(ErrorCode::no_convergence, "border fixed point residuals " + std::to_string(border_value) + ", " +
                                               std::to_string(fp_residual));
  }
  return result;
}

Vector ReductionResult::to_normal_coordinates(std::span<const double> z, double nu) const {
  return axpy(rotation * std::span<const double>(sub(z, z_bif)), nu - nu_bif, shift);
}

Vector ReductionResult::from_normal_coordinates(std::span<const double> x, double mu) const {
  return add(z_bif, lu_solve(rotation, axpy(x, -mu, shift)));
}

ReductionResult normal_form_reduce(const PiecewiseSmoothMap& map, std::span<const double> z_bif, double nu_bif) {
  const std::size_t m = map.dim;
  if (z_bif.size() != m) throw Error(ErrorCode::dimension_mismatch, "z_bif length differs from map dimension");
  const Vector grad = border_gradient(map.border, z_bif, nu_bif);
  const double gg = dot(grad, grad);
  if (!(std::sqrt(gg) > 1e-8)) throw Error(ErrorCode::degenerate_border, "border gradient vanishes at the bifurcation");

  // First row scaled so that it dots with grad to 1; the rest is an
  // orthonormal basis of the complement of grad.
  Matrix rot(m, m);
  for (std::size_t j = 0; j < m; ++j) rot(0, j) = grad[j] / gg;
  std::vector<Vector> basis{scaled(1.0 / std::sqrt(gg), grad)};
  std::size_t row = 1;
  for (std::size_t k = 0; k < m && row < m; ++k) {
    Vector v = unit_vector(m, k);
    for (const auto& q : basis) v = axpy(v, -dot(v, q), q);
    const double vn = norm2(v);
    if (vn < 1e-3) continue;
    v = scaled(1.0 / vn, v);
    for (std::size_t j = 0; j < m; ++j) rot(row, j) = v[j];
    basis.push_back(std::move(v));
    ++row;
  }
  if (row != m) throw Error(ErrorCode::degenerate_border, "could not complete the coordinate rotation");

  Vector shift(m, 0.0);
  shift[0] = border_parameter_derivative(map.border, z_bif, nu_bif) / gg;

  const Matrix rot_inv = inverse(rot);
  const Matrix a = rot * jacobian(map.above, z_bif, nu_bif) * rot_inv;
  const Matrix b = rot * jacobian(map.below, z_bif, nu_bif) * rot_inv;
  const Vector c_above =
      add(sub(shift, a * std::span<const double>(shift)), rot * std::span<const double>(parameter_derivative(map.above, z_bif, nu_bif)));
  const Vector c_below =
      add(sub(shift, b * std::span<const double>(shift)), rot * std::span<const double>(parameter_derivative(map.below, z_bif, nu_bif)));
  const double c_residual = norm_inf(sub(c_above, c_below));
  if (c_residual > kMaxCoefficientResidual) {
    throw Error(ErrorCode::continuity_violation,
                "the two expressions for c disagree by " + std::to_string(c_residual));
  }
  return ReductionResult{NormalFormMap(a, b, c_above, kMaxCoefficientResidual), rot, shift,
                         Vector(z_bif.begin(), z_bif.end()), nu_bif, c_residual};
}

}  // namespace bcpace
