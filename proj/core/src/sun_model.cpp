#include "bcpace/sun_model.hpp"

#include <cmath>
#include <string>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

double recovery(const RecoveryCoefficients& k, double a) { return k.intercept - k.slope * a; }

double drift_step(double a, double r, double h, const SunParams& p) {
  return r * std::exp(-(a + h) / p.tau_fat) + p.fatigue * std::exp(-h / p.tau_fat);
}

Vector piece(std::span<const double> z, double h, const SunParams& p, const RecoveryCoefficients& k) {
  const double r_next = drift_step(z[0], z[1], h, p);
  return {p.a_min + r_next + recovery(k, z[0]) * std::exp(-h / p.tau_rec), r_next};
}

SunState to_state(std::span<const double> z) { return {z[0], z[1]}; }

// Drift fixed point for a given A, used as an initial guess.
double drift_guess(double a, double h, const SunParams& p) {
  return p.fatigue * std::exp(-h / p.tau_fat) / (1.0 - std::exp(-(a + h) / p.tau_fat));
}

}  // namespace

void SunParams::validate() const {
  for (double v : {a_min, tau_rec, tau_fat, border_a, at_or_below_border.intercept, at_or_below_border.slope,
                   above_border.intercept, above_border.slope}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "Sun parameters must be positive");
  }
  if (!(fatigue >= 0.0) || !std::isfinite(fatigue)) {
    throw Error(ErrorCode::invalid_argument, "fatigue magnitude must be non-negative");
  }
  const double lo = recovery(at_or_below_border, border_a);
  const double hi = recovery(above_border, border_a);
  if (std::abs(lo - hi) > 1e-9 * (1.0 + std::abs(lo))) {
    throw Error(ErrorCode::continuity_violation,
                "recovery pieces disagree at the border: " + std::to_string(lo) + " vs " + std::to_string(hi));
  }
}

SunState sun_step(const SunState& state, double h, const SunParams& params) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "pacing interval H must be positive");
  const auto& k = state.a <= params.border_a ? params.at_or_below_border : params.above_border;
  const double z[2] = {state.a, state.r};
  return to_state(piece(z, h, params, k));
}

PiecewiseSmoothMap sun_piecewise_map(const SunParams& params) {
  params.validate();
  PiecewiseSmoothMap map;
  map.dim = 2;
  map.above = [params](std::span<const double> z, double h) {
    return piece(z, h, params, params.at_or_below_border);
  };
  map.below = [params](std::span<const double> z, double h) { return piece(z, h, params, params.above_border); };
  map.border = [params](std::span<const double> z, double) { return params.border_a - z[0]; };
  return map;
}

SunState sun_fixed_point(double h, const SunParams& params) {
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "pacing interval H must be positive");
  const auto map = sun_piecewise_map(params);
  const double guess[2] = {params.border_a, drift_guess(params.border_a, h, params)};
  const Vector za = solve_fixed_point(map.above, guess, h);
  if (map.border(za, h) >= 0.0) return to_state(za);
  const Vector zb = solve_fixed_point(map.below, guess, h);
  if (map.border(zb, h) <= 0.0) return to_state(zb);
  throw Error(ErrorCode::no_convergence, "no admissible Sun fixed point at H = " + std::to_string(h));
}

SunBifurcation locate_sun_bifurcation(const SunParams& params, double h_lo, double h_hi) {
  if (!(h_lo > 0.0) || !(h_lo < h_hi)) throw Error(ErrorCode::invalid_argument, "need 0 < h_lo < h_hi");
  const auto map = sun_piecewise_map(params);
  const double mid = 0.5 * (h_lo + h_hi);
  const double guess[2] = {params.border_a, drift_guess(params.border_a, mid, params)};
  const auto p = locate_border_fixed_point(map, h_lo, h_hi, guess);
  return {p.nu, to_state(p.z)};
}

double find_H_bif(const SunParams& params, double h_lo, double h_hi) {
  return locate_sun_bifurcation(params, h_lo, h_hi).h_bif;
}

ReductionResult sun_reduce(const SunParams& params, double h_lo, double h_hi) {
  const auto bif = locate_sun_bifurcation(params, h_lo, h_hi);
  const double z[2] = {bif.state.a, bif.state.r};
  return normal_form_reduce(sun_piecewise_map(params), z, bif.h_bif);
}

SunCaseStudy::SunCaseStudy(SunParams params, double h_lo, double h_hi)
    : params_(params),
      bifurcation_(locate_sun_bifurcation(params_, h_lo, h_hi)),
      reduction_([&] {
        const double z[2] = {bifurcation_.state.a, bifurcation_.state.r};
        return normal_form_reduce(sun_piecewise_map(params_), z, bifurcation_.h_bif);
      }()),
      derived_(pacing_derived(reduction_.normal)),
      gain_(gain_params(derived_)) {}

SunGainResult SunCaseStudy::gain_experiment(double h, double delta, const SimulationOptions& opts) const {
  if (delta == 0.0) throw Error(ErrorCode::degenerate_delta, "pacing amplitude must be nonzero");
  if (!(h - std::abs(delta) > 0.0)) throw Error(ErrorCode::invalid_argument, "paced interval H - |delta| must stay positive");
  const SunState start = sun_fixed_point(h, params_);
  const double x0[2] = {start.a, start.r};
  const SunParams& p = params_;
  const BeatMap step = [&p, h, delta](std::span<const double> x, std::int64_t beat) {
    const double hn = beat % 2 == 0 ? h + delta : h - delta;
    const SunState next = sun_step({x[0], x[1]}, hn, p);
    return Vector{next.a, next.r};
  };
  const auto det = detect_period_two(step, x0, opts);
  if (!det.converged) {
    throw Error(ErrorCode::no_convergence, "paced Sun orbit did not settle at H = " + std::to_string(h) +
                                               ", delta = " + std::to_string(delta));
  }
  SunGainResult out;
  out.gamma_sim = std::abs(det.even_point[0] - det.odd_point[0]) / (2.0 * std::abs(delta));
  const double mu = h - bifurcation_.h_bif;
  if (mu >= 0.0) out.gamma_theory = gain_theory_bc(gain_, mu, delta);
  out.even_point = to_state(det.even_point);
  out.odd_point = to_state(det.odd_point);
  out.beats = det.beats;
  return out;
}

GainCurve SunCaseStudy::gain_scan(ScanAxis axis, double fixed, std::span<const double> grid,
                                  const SimulationOptions& opts) const {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::invalid_argument, "scan grid must be strictly increasing");
  }
  GainCurve curve{axis, fixed, std::vector<GainSample>(grid.size())};
  parallel_for_index(grid.size(), [&](std::size_t i) {
    GainSample& s = curve.samples[i];
    s.param = grid[i];
    const double mu = axis == ScanAxis::mu ? grid[i] : fixed;
    const double delta = axis == ScanAxis::mu ? fixed : grid[i];
    try {
      const auto r = gain_experiment(bifurcation_.h_bif + mu, delta, opts);
      s.simulated = r.gamma_sim;
      s.theory = r.gamma_theory;
    } catch (const Error&) {
      s.simulated.reset();
    }
    if (!s.theory) {
      try {
        s.theory = gain_theory_bc(gain_, mu, delta);
      } catch (const Error&) {
        s.theory.reset();
      }
    }
  });
  return curve;
}

SunGainResult sun_gain_experiment(double h, double delta, const SunParams& params, const SimulationOptions& opts) {
  return SunCaseStudy(params).gain_experiment(h, delta, opts);
}

}  // namespace bcpace
