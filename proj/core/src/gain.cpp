#include "bcpace/gain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

void require_delta(double delta) {
  if (delta == 0.0 || !std::isfinite(delta)) throw Error(ErrorCode::degenerate_delta, "gain requires finite delta != 0");
}

void require_mu(double mu) {
  if (!(mu >= 0.0)) throw Error(ErrorCode::out_of_regime, "B/C gain formula holds for mu >= 0");
}

void require_increasing(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "scan grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::invalid_argument, "scan grid must be strictly increasing");
  }
}

}  // namespace

GainParams gain_params(const PacingDerived& derived) {
  GainParams p;
  p.gamma_const = std::abs(derived.d[0]);
  p.gamma_slope = 0.5 * (derived.period_two_dir.lower[0] - derived.period_two_dir.upper[0]);
  p.rho = derived.rho;
  return p;
}

GainParams gain_params(const NormalFormMap& map) { return gain_params(pacing_derived(map)); }

double gain_theory_bc(const GainParams& params, double mu, double delta) {
  require_delta(delta);
  require_mu(mu);
  const double ad = std::abs(delta);
  if (mu >= params.rho * ad) return params.gamma_const;
  return params.gamma_const + params.gamma_slope * (params.rho - mu / ad);
}

double gain_theory_bc(const NormalFormMap& map, double mu, double delta) {
  return gain_theory_bc(gain_params(map), mu, delta);
}

double generalized_gain(const PacingDerived& derived, double mu, double delta, std::size_t component) {
  require_delta(delta);
  require_mu(mu);
  if (component >= derived.d.size()) {
    throw Error(ErrorCode::index_out_of_range, "component " + std::to_string(component) + " out of range");
  }
  const double g_const = derived.orientation() * derived.d[component];
  const double ad = std::abs(delta);
  if (mu >= derived.rho * ad) return g_const;
  const double k = 0.5 * (derived.period_two_dir.lower[component] - derived.period_two_dir.upper[component]);
  return g_const + (derived.rho - mu / ad) * k;
}

double generalized_gain(const NormalFormMap& map, double mu, double delta, std::size_t component) {
  return generalized_gain(pacing_derived(map), mu, delta, component);
}

double empirical_gain(const PacedResponse& response, std::size_t component) {
  require_delta(response.delta);
  if (component >= response.upper.size()) throw Error(ErrorCode::index_out_of_range, "component out of range");
  return (response.upper[component] - response.lower[component]) / (2.0 * std::abs(response.delta));
}

double positive_cubic_root(double cubic, double linear) {
  if (!(cubic >= 0.0) || !(linear >= 0.0) || !std::isfinite(cubic) || !std::isfinite(linear)) {
    throw Error(ErrorCode::invalid_argument, "cubic coefficients must be finite and non-negative");
  }
  if (cubic == 0.0 && linear == 0.0) throw Error(ErrorCode::degenerate_input, "gain diverges when both terms vanish");
  const auto h = [&](double g) { return cubic * g * g * g + linear * g - 1.0; };
  // Each term alone bounds the root from above.
  double hi = std::numeric_limits<double>::infinity();
  if (linear > 0.0) hi = std::min(hi, 1.0 / linear);
  if (cubic > 0.0) hi = std::min(hi, 1.0 / std::cbrt(cubic));
  hi *= 1.0 + 1e-12;
  while (h(hi) < 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(h(lo)) <= std::abs(h(hi)) ? lo : hi;
}

double gain_classical(double mu, double delta) {
  if (!(mu >= 0.0)) throw Error(ErrorCode::invalid_argument, "classical gain requires mu >= 0");
  if (mu == 0.0 && delta == 0.0) throw Error(ErrorCode::degenerate_input, "classical gain diverges at mu = delta = 0");
  return positive_cubic_root(delta * delta, mu);
}

std::string_view to_string(ScanAxis axis) noexcept { return axis == ScanAxis::mu ? "mu" : "delta"; }

std::vector<double> linear_grid(double start, double stop, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::invalid_argument, "grid count must be >= 1");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = start;
    return g;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = start + step * static_cast<double>(i);
  g.back() = stop;
  return g;
}

void parallel_for_index(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

GainCurve gain_scan(const NormalFormMap& map, ScanAxis axis, double fixed, std::span<const double> grid,
                    const SimulationOptions& opts) {
  require_increasing(grid);
  const PacingDerived derived = pacing_derived(map);
  const GainParams params = gain_params(derived);
  GainCurve curve{axis, fixed, std::vector<GainSample>(grid.size())};
  parallel_for_index(grid.size(), [&](std::size_t i) {
    GainSample& s = curve.samples[i];
    s.param = grid[i];
    const double mu = axis == ScanAxis::mu ? grid[i] : fixed;
    const double delta = axis == ScanAxis::mu ? fixed : grid[i];
    try {
      s.theory = gain_theory_bc(params, mu, delta);
    } catch (const Error&) {
      s.theory.reset();
    }
    try {
      const Vector x0 = scaled(std::max(mu, 0.0), derived.fixed_point_dir);
      const auto sim = simulate_paced(map, mu, delta, x0, opts);
      if (sim.response) s.simulated = empirical_gain(*sim.response);
    } catch (const Error&) {
      s.simulated.reset();
    }
  });
  return curve;
}

GainCurve gain_scan_classical(ScanAxis axis, double fixed, std::span<const double> grid) {
  require_increasing(grid);
  GainCurve curve{axis, fixed, std::vector<GainSample>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GainSample& s = curve.samples[i];
    s.param = grid[i];
    try {
      s.theory = axis == ScanAxis::mu ? gain_classical(grid[i], fixed) : gain_classical(fixed, grid[i]);
    } catch (const Error&) {
      s.theory.reset();
    }
  }
  return curve;
}

}  // namespace bcpace
