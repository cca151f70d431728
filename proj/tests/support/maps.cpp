#include "maps.hpp"

#include <cmath>
#include <stdexcept>

#include "bcpace/error.hpp"

namespace bcpace::testing {

NormalFormMap golden_map() { return NormalFormMap(Matrix{{0.5}}, Matrix{{-1.5}}, Vector{1.0}); }

namespace {

bool entries_bounded(const Vector& v, double bound) {
  for (double x : v) {
    if (!(std::abs(x) <= bound)) return false;
  }
  return true;
}

}  // namespace

NormalFormMap random_valid_map(std::mt19937_64& rng, const RandomMapOptions& o) {
  std::uniform_int_distribution<std::size_t> dim_dist(1, o.max_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 200000; ++attempt) {
    const std::size_t m = dim_dist(rng);
    Matrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = normal(rng);
    const double ra = spectral_radius(a);
    if (ra == 0.0) continue;
    a = (o.max_radius * unit(rng) / ra) * a;
    Matrix b = a;
    const double scale = 0.5 + 3.0 * unit(rng);
    for (std::size_t i = 0; i < m; ++i) b(i, 0) += scale * normal(rng);
    Vector c(m);
    for (auto& x : c) x = normal(rng);
    try {
      NormalFormMap map(a, b, c);
      const auto report = check_conditions(map, false);
      if (!report.core_conditions_pass()) continue;
      if (report.spectral_radius_above > o.max_radius || report.spectral_radius_product > o.max_radius) continue;
      if (*report.fixed_point_first < o.min_margin || *report.unstable_first < o.min_margin ||
          -*report.upper_first < o.min_margin || *report.lower_first < o.min_margin ||
          std::abs(*report.pacing_direction_first) < o.min_margin) {
        continue;
      }
      const PacingDerived d = pacing_derived(map);
      if (!entries_bounded(d.d, o.max_entry) || !entries_bounded(d.fixed_point_dir, o.max_entry) ||
          !entries_bounded(d.s_upper, o.max_entry) || !entries_bounded(d.s_lower, o.max_entry) ||
          !entries_bounded(d.period_two_dir.upper, o.max_entry) ||
          !entries_bounded(d.period_two_dir.lower, o.max_entry)) {
        continue;
      }
      return map;
    } catch (const Error&) {
      continue;
    }
  }
  throw std::runtime_error("random_valid_map: rejection budget exhausted");
}

PacingPoint random_pacing_point(std::mt19937_64& rng, const PacingDerived& derived) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double magnitude = 0.01 + 2.0 * unit(rng);
  const double delta = unit(rng) < 0.5 ? -magnitude : magnitude;
  const double mu = derived.rho * magnitude * 2.0 * unit(rng);
  return {mu, delta};
}

}  // namespace bcpace::testing
