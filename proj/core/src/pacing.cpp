#include "bcpace/pacing.hpp"

#include <cmath>
#include <string>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

constexpr double kBorderBand = 1e-9;
constexpr double kDegenerateDirection = 1e-12;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Slack for regime boundaries so mu == mu_crit computed two ways is accepted.
double regime_slack(double mu_c) { return 1e-12 * (1.0 + std::abs(mu_c)); }

// In the oriented convention the upper point is on odd beats. A physical
// delta of opposite sign to d(1) shifts it to even beats.
bool in_phase_upper_on_odd(const PacingDerived& derived, double delta) {
  return delta == 0.0 || sign(delta) == derived.orientation();
}

PacedResponse make_response(ResponseKind kind, Vector upper, Vector lower, bool upper_on_odd, double mu, double delta) {
  return PacedResponse{kind, std::move(upper), std::move(lower), upper_on_odd, mu, delta};
}

}  // namespace

std::string_view to_string(ResponseKind kind) noexcept {
  switch (kind) {
    case ResponseKind::unilateral: return "unilateral";
    case ResponseKind::bilateral_in_phase: return "bilateral_in_phase";
    case ResponseKind::bilateral_out_of_phase: return "bilateral_out_of_phase";
    case ResponseKind::unclassified: return "unclassified";
  }
  return "unclassified";
}

Vector paced_step(const NormalFormMap& map, std::span<const double> x, std::int64_t beat, double mu, double delta) {
  const double effective = (beat % 2 == 0) ? mu + delta : mu - delta;
  return evaluate(map, x, effective);
}

PacingDerived pacing_derived(const NormalFormMap& map) {
  const auto report = check_conditions(map, /*search_certificate=*/false);
  if (report.pacing_direction_first && std::abs(*report.pacing_direction_first) <= kDegenerateDirection) {
    throw Error(ErrorCode::condition_violated, "d(1) = 0: degenerate response to pacing");
  }
  if (!report.core_conditions_pass()) {
    if (!report.pacing_direction_first) throw Error(ErrorCode::singular_matrix, "I + A is singular");
    throw Error(ErrorCode::condition_violated, "map fails the B/C period-doubling conditions");
  }
  const Matrix& a = map.above();
  const Matrix& b = map.below();
  const Vector& c = map.coupling();
  const Matrix id = Matrix::identity(map.dim());

  PacingDerived out;
  out.d = lu_solve(id + a, c);
  out.fixed_point_dir = fixed_point_direction(map);
  out.rho = std::abs(out.d[0]) / out.fixed_point_dir[0];
  out.s_upper = lu_solve(id - b * a, (id - b) * std::span<const double>(c));
  out.s_lower = lu_solve(id - a * b, (id - a) * std::span<const double>(c));
  out.period_two_dir = period_two_directions(map);
  const double sigma = out.orientation();
  out.upper_crit = axpy(scaled(out.rho, out.fixed_point_dir), sigma, out.d);
  out.lower_crit = axpy(scaled(out.rho, out.fixed_point_dir), -sigma, out.d);
  return out;
}

double mu_crit(const PacingDerived& derived, double delta) {
  if (delta == 0.0) throw Error(ErrorCode::degenerate_delta, "mu_crit undefined for delta = 0");
  return derived.rho * std::abs(delta);
}

double mu_crit(const NormalFormMap& map, double delta) { return mu_crit(pacing_derived(map), delta); }

PacedResponse unilateral_solution(const PacingDerived& derived, double mu, double delta) {
  const double mu_c = derived.rho * std::abs(delta);
  if (mu < mu_c - regime_slack(mu_c)) {
    throw Error(ErrorCode::out_of_regime, "unilateral solution requires mu >= mu_crit = " + std::to_string(mu_c));
  }
  const double oriented = std::abs(delta) * derived.orientation();
  const Vector fp = scaled(mu, derived.fixed_point_dir);
  return make_response(ResponseKind::unilateral, axpy(fp, oriented, derived.d), axpy(fp, -oriented, derived.d),
                       in_phase_upper_on_odd(derived, delta), mu, delta);
}

PacedResponse unilateral_solution(const NormalFormMap& map, double mu, double delta) {
  return unilateral_solution(pacing_derived(map), mu, delta);
}

PacedResponse bilateral_in_phase(const PacingDerived& derived, double mu, double delta) {
  if (delta == 0.0) throw Error(ErrorCode::degenerate_delta, "bilateral solution requires delta != 0");
  const double mu_c = mu_crit(derived, delta);
  if (mu > mu_c + regime_slack(mu_c)) {
    throw Error(ErrorCode::out_of_regime, "bilateral solution requires mu <= mu_crit = " + std::to_string(mu_c));
  }
  const double oriented = std::abs(delta) * derived.orientation();
  const auto& dir = derived.period_two_dir;
  return make_response(ResponseKind::bilateral_in_phase, axpy(scaled(mu, dir.upper), oriented, derived.s_upper),
                       axpy(scaled(mu, dir.lower), -oriented, derived.s_lower), in_phase_upper_on_odd(derived, delta),
                       mu, delta);
}

PacedResponse bilateral_in_phase(const NormalFormMap& map, double mu, double delta) {
  return bilateral_in_phase(pacing_derived(map), mu, delta);
}

std::optional<PacedResponse> bilateral_out_of_phase(const PacingDerived& derived, double mu, double delta) {
  if (delta == 0.0) throw Error(ErrorCode::degenerate_delta, "out-of-phase solution requires delta != 0");
  const double oriented = std::abs(delta) * derived.orientation();
  const auto& dir = derived.period_two_dir;
  // Relative slack so the boundary case mu X_u(1) = delta s_u(1) is kept.
  const double lhs = mu * dir.upper[0], rhs = oriented * derived.s_upper[0];
  if (lhs < rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs))) return std::nullopt;
  Vector upper = axpy(scaled(mu, dir.upper), -oriented, derived.s_upper);
  Vector lower = axpy(scaled(mu, dir.lower), oriented, derived.s_lower);
  if (lower[0] > 1e-12 * (std::abs(mu * dir.lower[0]) + std::abs(oriented * derived.s_lower[0]))) return std::nullopt;
  return make_response(ResponseKind::bilateral_out_of_phase, std::move(upper), std::move(lower),
                       !in_phase_upper_on_odd(derived, delta), mu, delta);
}

std::optional<PacedResponse> bilateral_out_of_phase(const NormalFormMap& map, double mu, double delta) {
  return bilateral_out_of_phase(pacing_derived(map), mu, delta);
}

PacedResponse predicted_response(const PacingDerived& derived, double mu, double delta) {
  if (delta == 0.0) throw Error(ErrorCode::degenerate_delta, "predicted response requires delta != 0");
  if (mu >= mu_crit(derived, delta)) return unilateral_solution(derived, mu, delta);
  return bilateral_in_phase(derived, mu, delta);
}

PacedResponse predicted_response(const NormalFormMap& map, double mu, double delta) {
  return predicted_response(pacing_derived(map), mu, delta);
}

Vector two_beat_composition(const NormalFormMap& map, std::span<const double> x, double mu, double oriented_delta) {
  if (x.size() != map.dim()) throw Error(ErrorCode::dimension_mismatch, "two_beat_composition: state length");
  const Matrix& first = x[0] >= 0.0 ? map.above() : map.below();
  const Vector mid = axpy(first * x, mu + oriented_delta, map.coupling());
  return axpy(map.above() * std::span<const double>(mid), mu - oriented_delta, map.coupling());
}

PeriodTwoDetection detect_period_two(const BeatMap& step, std::span<const double> x0, const SimulationOptions& opts) {
  if (!all_finite(x0)) throw Error(ErrorCode::invalid_argument, "initial state must be finite");
  PeriodTwoDetection out;
  Vector x(x0.begin(), x0.end());
  std::int64_t n = 0;
  for (; n < opts.transient && n < opts.max_beats; ++n) x = step(x, n);

  // x is now x_n. Track the previous even iterate.
  std::optional<Vector> prev_even;
  int streak = 0;
  while (n < opts.max_beats) {
    if (!all_finite(x)) break;
    if (n % 2 == 0) {
      if (prev_even) {
        out.last_difference = norm_inf(sub(x, *prev_even));
        streak = out.last_difference <= opts.tol ? streak + 1 : 0;
        if (streak >= opts.consecutive) {
          out.converged = true;
          out.even_point = x;
          out.odd_point = step(x, n);
          out.beats = n + 1;
          return out;
        }
      }
      prev_even = x;
    }
    x = step(x, n);
    ++n;
  }
  out.beats = n;
  out.even_point = x;
  return out;
}

SimulationResult simulate_paced(const NormalFormMap& map, double mu, double delta, std::span<const double> x0,
                                const SimulationOptions& opts) {
  if (x0.size() != map.dim()) throw Error(ErrorCode::dimension_mismatch, "initial state length");
  SimulationResult result;
  result.detection = detect_period_two(
      [&](std::span<const double> x, std::int64_t n) { return paced_step(map, x, n, mu, delta); }, x0, opts);
  if (!result.detection.converged) return result;

  const auto& even = result.detection.even_point;
  const auto& odd = result.detection.odd_point;
  const bool odd_is_upper = odd[0] > even[0];
  PacedResponse resp;
  resp.mu = mu;
  resp.delta = delta;
  resp.upper = odd_is_upper ? odd : even;
  resp.lower = odd_is_upper ? even : odd;
  resp.upper_on_odd_beats = odd_is_upper;

  std::optional<PacingDerived> derived;
  try {
    derived = pacing_derived(map);
  } catch (const Error&) {
    derived.reset();
  }
  const bool in_phase_odd = derived ? in_phase_upper_on_odd(*derived, delta) : (delta >= 0.0);

  const double hi = resp.upper[0];
  const double lo = resp.lower[0];
  if (std::abs(lo) <= kBorderBand && derived && delta != 0.0) {
    resp.kind = predicted_response(*derived, mu, delta).kind;
  } else if (lo >= -kBorderBand) {
    resp.kind = ResponseKind::unilateral;
  } else if (hi > 0.0) {
    resp.kind = (odd_is_upper == in_phase_odd) ? ResponseKind::bilateral_in_phase : ResponseKind::bilateral_out_of_phase;
  } else {
    resp.kind = ResponseKind::unclassified;
  }
  result.response = std::move(resp);
  return result;
}

}  // namespace bcpace
