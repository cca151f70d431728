#include "bcpace/normal_form.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

constexpr int kRandomCertificateTrials = 200;
constexpr double kMaxCandidateCondition = 1e3;

Matrix identity_minus(const Matrix& m) { return Matrix::identity(m.rows()) - m; }
Matrix identity_plus(const Matrix& m) { return Matrix::identity(m.rows()) + m; }

void require_dim(const NormalFormMap& map, std::span<const double> x) {
  if (x.size() != map.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "state has length " + std::to_string(x.size()) + ", map has dimension " + std::to_string(map.dim()));
  }
}

std::optional<double> first_or_empty(const auto& compute) {
  try {
    return compute()[0];
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_matrix) return std::nullopt;
    throw;
  }
}

std::optional<ContractionCertificate> try_candidate(const Matrix& s, const Matrix& a2, const Matrix& ab) {
  if (!all_finite(s)) return std::nullopt;
  try {
    const double n1 = s_norm(a2, s);
    const double n2 = s_norm(ab, s);
    const double theta = std::max(n1, n2);
    if (theta < 1.0 - kConditionMargin) return ContractionCertificate{s, theta};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::singular_matrix) throw;
  }
  return std::nullopt;
}

std::optional<Matrix> inverse_basis(const Matrix& m) {
  auto basis = real_eigenvector_basis(m);
  if (!basis) return std::nullopt;
  try {
    return inverse(*basis);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_matrix) return std::nullopt;
    throw;
  }
}

}  // namespace

NormalFormMap::NormalFormMap(Matrix above, Matrix below, Vector coupling, double continuity_tolerance)
    : above_(std::move(above)), below_(std::move(below)), coupling_(std::move(coupling)) {
  const std::size_t m = coupling_.size();
  if (m == 0 || m > 16) throw Error(ErrorCode::dimension_mismatch, "dimension must be in [1, 16]");
  if (above_.rows() != m || above_.cols() != m || below_.rows() != m || below_.cols() != m) {
    throw Error(ErrorCode::dimension_mismatch, "A and B must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if (!all_finite(above_) || !all_finite(below_) || !all_finite(coupling_)) {
    throw Error(ErrorCode::invalid_argument, "non-finite entry in normal form");
  }
  if (norm2(coupling_) == 0.0) throw Error(ErrorCode::invalid_argument, "coupling vector c must be nonzero");
  const double scale = frobenius_norm(above_) + frobenius_norm(below_);
  const Matrix jump = below_ - above_;
  for (std::size_t j = 1; j < m; ++j) {
    const double col = norm2(jump.col(j));
    if (col > continuity_tolerance * scale) {
      throw Error(ErrorCode::continuity_violation,
                  "column " + std::to_string(j + 1) + " of B - A is nonzero (" + std::to_string(col) + ")");
    }
  }
}

Vector evaluate(const NormalFormMap& map, std::span<const double> x, double mu) {
  require_dim(map, x);
  const Matrix& jac = x[0] >= 0.0 ? map.above() : map.below();
  return axpy(jac * x, mu, map.coupling());
}

Vector fixed_point_direction(const NormalFormMap& map) { return lu_solve(identity_minus(map.above()), map.coupling()); }

Vector fixed_point_stable(const NormalFormMap& map, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::invalid_argument, "stable fixed point requires mu > 0");
  if (spectral_radius(map.above()) >= 1.0) {
    throw Error(ErrorCode::condition_violated, "A has an eigenvalue on or outside the unit circle");
  }
  const Vector dir = fixed_point_direction(map);
  if (!(dir[0] > 0.0)) throw Error(ErrorCode::condition_violated, "X_fp(1) <= 0: fixed point not above the border");
  return scaled(mu, dir);
}

Vector fixed_point_unstable(const NormalFormMap& map, double mu) {
  if (!(mu < 0.0)) throw Error(ErrorCode::invalid_argument, "unstable fixed point requires mu < 0");
  const Vector dir = lu_solve(identity_minus(map.below()), map.coupling());
  if (!(dir[0] > 0.0)) {
    throw Error(ErrorCode::condition_violated, "((I - B)^-1 c)(1) <= 0: fixed point not below the border");
  }
  if (!(spectral_radius(map.below()) > 1.0)) {
    throw Error(ErrorCode::condition_violated, "B has no eigenvalue outside the unit circle");
  }
  return scaled(mu, dir);
}

PeriodTwoDirections period_two_directions(const NormalFormMap& map) {
  const Matrix& a = map.above();
  const Matrix& b = map.below();
  const Vector& c = map.coupling();
  return {lu_solve(identity_minus(b * a), identity_plus(b) * std::span<const double>(c)),
          lu_solve(identity_minus(a * b), identity_plus(a) * std::span<const double>(c))};
}

PeriodTwoOrbit period_two(const NormalFormMap& map, double mu) {
  if (!(mu < 0.0)) throw Error(ErrorCode::invalid_argument, "period-two orbit requires mu < 0");
  auto dirs = period_two_directions(map);
  if (!(dirs.upper[0] < 0.0 && dirs.lower[0] > 0.0)) {
    throw Error(ErrorCode::condition_violated, "period-two orbit does not straddle the border");
  }
  if (!(spectral_radius(map.above() * map.below()) < 1.0)) {
    throw Error(ErrorCode::condition_violated, "AB has an eigenvalue on or outside the unit circle");
  }
  PeriodTwoOrbit orbit;
  orbit.upper = scaled(mu, dirs.upper);
  orbit.lower = scaled(mu, dirs.lower);
  orbit.per_unit_mu = std::move(dirs);
  return orbit;
}

std::string_view to_string(ConditionStatus status) noexcept {
  switch (status) {
    case ConditionStatus::pass: return "pass";
    case ConditionStatus::fail: return "fail";
    case ConditionStatus::unverified: return "unverified";
  }
  return "unknown";
}

ConditionReport check_conditions(const NormalFormMap& map, bool search_certificate, std::uint64_t seed) {
  const Matrix& a = map.above();
  const Matrix& b = map.below();
  const Vector& c = map.coupling();
  const auto pass_if = [](bool ok) { return ok ? ConditionStatus::pass : ConditionStatus::fail; };

  ConditionReport r;
  r.eigenvalues_above = eigenvalues(a);
  r.eigenvalues_below = eigenvalues(b);
  r.eigenvalues_product = eigenvalues(a * b);
  for (const auto& l : r.eigenvalues_above) r.spectral_radius_above = std::max(r.spectral_radius_above, std::abs(l));
  for (const auto& l : r.eigenvalues_below) r.spectral_radius_below = std::max(r.spectral_radius_below, std::abs(l));
  for (const auto& l : r.eigenvalues_product) r.spectral_radius_product = std::max(r.spectral_radius_product, std::abs(l));

  r.fixed_point_first = first_or_empty([&] { return lu_solve(identity_minus(a), c); });
  r.fixed_point = pass_if(r.fixed_point_first && *r.fixed_point_first > kConditionMargin &&
                          r.spectral_radius_above < 1.0 - kConditionMargin);

  r.unstable_first = first_or_empty([&] { return lu_solve(identity_minus(b), c); });
  r.unstable_point = pass_if(r.unstable_first && *r.unstable_first > kConditionMargin &&
                             r.spectral_radius_below > 1.0 + kConditionMargin);

  r.upper_first = first_or_empty([&] { return lu_solve(identity_minus(b * a), identity_plus(b) * std::span<const double>(c)); });
  r.lower_first = first_or_empty([&] { return lu_solve(identity_minus(a * b), identity_plus(a) * std::span<const double>(c)); });
  r.period_two = pass_if(r.upper_first && r.lower_first && *r.upper_first < -kConditionMargin &&
                         *r.lower_first > kConditionMargin && r.spectral_radius_product < 1.0 - kConditionMargin);

  r.pacing_direction_first = first_or_empty([&] { return lu_solve(identity_plus(a), c); });
  r.pacing_nondegenerate = pass_if(r.pacing_direction_first && std::abs(*r.pacing_direction_first) > kConditionMargin);

  if (search_certificate) {
    r.certificate = contraction_certificate(map, seed);
    r.contraction = r.certificate ? ConditionStatus::pass : ConditionStatus::unverified;
  }
  return r;
}

std::optional<ContractionCertificate> contraction_certificate(const NormalFormMap& map, std::uint64_t seed) {
  const Matrix a2 = map.above() * map.above();
  const Matrix ab = map.above() * map.below();
  if (!(spectral_radius(a2) < 1.0 - kConditionMargin) || !(spectral_radius(ab) < 1.0 - kConditionMargin)) {
    return std::nullopt;
  }
  for (const Matrix* m : {&a2, &ab}) {
    if (auto s = inverse_basis(*m)) {
      if (auto cert = try_candidate(*s, a2, ab)) return cert;
    }
  }
  const std::size_t n = map.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  int tried = 0;
  int drawn = 0;
  while (tried < kRandomCertificateTrials && drawn < 50 * kRandomCertificateTrials) {
    ++drawn;
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) s(i, j) = entry(rng);
    }
    try {
      const double cond = operator_norm(s) * operator_norm(inverse(s));
      if (cond > kMaxCandidateCondition) continue;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::singular_matrix) continue;
      throw;
    }
    ++tried;
    if (auto cert = try_candidate(s, a2, ab)) return cert;
  }
  return std::nullopt;
}

}  // namespace bcpace
