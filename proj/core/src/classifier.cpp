#include "bcpace/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "bcpace/error.hpp"
#include "bcpace/gain.hpp"

namespace bcpace {

namespace {

constexpr int kKinkGridSize = 120;
constexpr int kClassicalGridP = 41;
constexpr int kClassicalGridQ = 31;

double mean_gamma(std::span<const GainObservation> s) {
  double m = 0.0;
  for (const auto& o : s) m += o.gamma;
  return m / static_cast<double>(s.size());
}

double rms_about_mean(std::span<const GainObservation> s) {
  const double m = mean_gamma(s);
  double acc = 0.0;
  for (const auto& o : s) acc += (o.gamma - m) * (o.gamma - m);
  return std::sqrt(acc / static_cast<double>(s.size()));
}

// Best non-negative (c0, a) for Gamma ~ c0 + a * phi at a fixed kink.
BorderCollisionFit fit_at_kink(std::span<const GainObservation> s, double kink) {
  const auto n = static_cast<double>(s.size());
  std::vector<double> phi(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) phi[i] = std::max(0.0, 1.0 - kink / s[i].delta);
  double mp = 0.0, mg = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    mp += phi[i];
    mg += s[i].gamma;
  }
  mp /= n;
  mg /= n;
  double spp = 0.0, spg = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    spp += (phi[i] - mp) * (phi[i] - mp);
    spg += (phi[i] - mp) * (s[i].gamma - mg);
  }
  double a = spp > 1e-300 ? spg / spp : 0.0;
  double c0 = mg - a * mp;
  if (a < 0.0) {
    a = 0.0;
    c0 = mg;
  }
  if (c0 < 0.0) {
    double pp = 0.0, pg = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      pp += phi[i] * phi[i];
      pg += phi[i] * s[i].gamma;
    }
    c0 = 0.0;
    a = pp > 0.0 ? std::max(0.0, pg / pp) : 0.0;
  }
  BorderCollisionFit fit{c0, a, a * kink, 0.0};
  double acc = 0.0;
  for (const auto& o : s) {
    const double r = o.gamma - fit.evaluate(o.delta);
    acc += r * r;
  }
  fit.residual = std::sqrt(acc / n);
  return fit;
}

double classical_rms(std::span<const GainObservation> s, double p, double q) {
  double acc = 0.0;
  for (const auto& o : s) {
    const double r = o.gamma - positive_cubic_root(p * o.delta * o.delta, q);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(s.size()));
}

void validate(std::span<const GainObservation> samples, std::size_t min_samples) {
  std::set<double> distinct;
  for (const auto& o : samples) {
    if (!(o.delta > 0.0) || !(o.gamma > 0.0) || !std::isfinite(o.delta) || !std::isfinite(o.gamma)) {
      throw Error(ErrorCode::invalid_argument, "classifier samples need finite delta > 0 and gamma > 0");
    }
    distinct.insert(o.delta);
  }
  if (distinct.size() < min_samples) {
    throw Error(ErrorCode::insufficient_data, "need at least " + std::to_string(min_samples) +
                                                  " samples with distinct delta, got " + std::to_string(distinct.size()));
  }
}

std::vector<double> average_ranks(std::vector<double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double BorderCollisionFit::evaluate(double delta) const noexcept { return c0 + std::max(0.0, a - b / delta); }

double ClassicalFit::evaluate(double delta) const { return positive_cubic_root(p * delta * delta, q); }

std::string_view to_string(BifurcationLabel label) noexcept {
  switch (label) {
    case BifurcationLabel::border_collision: return "border_collision";
    case BifurcationLabel::classical: return "classical";
    case BifurcationLabel::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

BorderCollisionFit fit_border_collision(std::span<const GainObservation> samples) {
  if (samples.empty()) throw Error(ErrorCode::insufficient_data, "no samples");
  double dmin = samples[0].delta, dmax = samples[0].delta;
  for (const auto& o : samples) {
    dmin = std::min(dmin, o.delta);
    dmax = std::max(dmax, o.delta);
  }
  // Kinks from well below the smallest delta up to the largest; beyond that
  // the model is a constant, which t = dmax already represents.
  std::vector<double> kinks{0.0};
  const double lo = std::log(0.05 * dmin);
  const double hi = std::log(dmax);
  for (int k = 0; k < kKinkGridSize; ++k) kinks.push_back(std::exp(lo + (hi - lo) * k / (kKinkGridSize - 1)));

  std::size_t best = 0;
  BorderCollisionFit best_fit = fit_at_kink(samples, kinks[0]);
  for (std::size_t k = 1; k < kinks.size(); ++k) {
    auto f = fit_at_kink(samples, kinks[k]);
    if (f.residual < best_fit.residual) {
      best_fit = f;
      best = k;
    }
  }
  // Golden-section refinement of the kink between the neighbouring grid nodes.
  double left = kinks[best == 0 ? 0 : best - 1];
  double right = kinks[std::min(best + 1, kinks.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = right - g * (right - left);
  double x2 = left + g * (right - left);
  double f1 = fit_at_kink(samples, x1).residual;
  double f2 = fit_at_kink(samples, x2).residual;
  for (int it = 0; it < 80 && right - left > 1e-12 * (1.0 + right); ++it) {
    if (f1 < f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - g * (right - left);
      f1 = fit_at_kink(samples, x1).residual;
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + g * (right - left);
      f2 = fit_at_kink(samples, x2).residual;
    }
  }
  auto refined = fit_at_kink(samples, 0.5 * (left + right));
  return refined.residual < best_fit.residual ? refined : best_fit;
}

ClassicalFit fit_classical(std::span<const GainObservation> samples) {
  if (samples.empty()) throw Error(ErrorCode::insufficient_data, "no samples");
  double cubic_scale = 0.0;
  for (const auto& o : samples) cubic_scale += o.delta * o.delta * o.gamma * o.gamma * o.gamma;
  cubic_scale /= static_cast<double>(samples.size());
  const double log_p_ref = std::log10(1.0 / cubic_scale);
  const double log_q_ref = std::log10(1.0 / mean_gamma(samples));

  double best_lp = log_p_ref, best_lq = log_q_ref;
  double best_r = classical_rms(samples, std::pow(10.0, best_lp), std::pow(10.0, best_lq));
  for (int i = 0; i < kClassicalGridP; ++i) {
    const double lp = log_p_ref - 8.0 + 10.0 * i / (kClassicalGridP - 1);
    for (int j = 0; j < kClassicalGridQ; ++j) {
      const double lq = log_q_ref - 2.0 + 3.0 * j / (kClassicalGridQ - 1);
      const double r = classical_rms(samples, std::pow(10.0, lp), std::pow(10.0, lq));
      if (r < best_r) {
        best_r = r;
        best_lp = lp;
        best_lq = lq;
      }
    }
  }
  // Coordinate descent in log space with a shrinking step.
  for (double step = 0.25; step > 1e-9;) {
    bool improved = false;
    for (int axis = 0; axis < 2; ++axis) {
      for (double dir : {-1.0, 1.0}) {
        const double lp = best_lp + (axis == 0 ? dir * step : 0.0);
        const double lq = best_lq + (axis == 1 ? dir * step : 0.0);
        const double r = classical_rms(samples, std::pow(10.0, lp), std::pow(10.0, lq));
        if (r < best_r) {
          best_r = r;
          best_lp = lp;
          best_lq = lq;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return ClassicalFit{std::pow(10.0, best_lp), std::pow(10.0, best_lq), best_r};
}

double spearman(std::span<const GainObservation> samples) {
  std::vector<double> d, g;
  for (const auto& o : samples) {
    d.push_back(o.delta);
    g.push_back(o.gamma);
  }
  const auto rd = average_ranks(d);
  const auto rg = average_ranks(g);
  const double n = static_cast<double>(samples.size());
  const double md = std::accumulate(rd.begin(), rd.end(), 0.0) / n;
  const double mg = std::accumulate(rg.begin(), rg.end(), 0.0) / n;
  double sdd = 0.0, sgg = 0.0, sdg = 0.0;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    sdd += (rd[i] - md) * (rd[i] - md);
    sgg += (rg[i] - mg) * (rg[i] - mg);
    sdg += (rd[i] - md) * (rg[i] - mg);
  }
  if (sdd == 0.0 || sgg == 0.0) return 0.0;
  return sdg / std::sqrt(sdd * sgg);
}

ClassifierVerdict classify_bifurcation(std::span<const GainObservation> samples, std::optional<double> mu_known,
                                       const ClassifierOptions& options) {
  validate(samples, options.min_samples);
  ClassifierVerdict v;
  v.mu_known = mu_known;
  v.bc_fit = fit_border_collision(samples);
  v.classical_fit = fit_classical(samples);
  v.monotonicity = spearman(samples);
  v.constant_residual = rms_about_mean(samples);

  const double floor = 1e-9 * mean_gamma(samples);
  const double r_bc = v.bc_fit.residual;
  const double r_cl = v.classical_fit.residual;
  const double best = std::min(r_bc, r_cl);
  if (v.constant_residual <= floor || best >= options.structure_ratio * v.constant_residual) {
    v.label = BifurcationLabel::inconclusive;
    return v;
  }
  const double rel = std::abs(r_bc - r_cl) / std::max({r_bc, r_cl, floor});
  if (rel < options.residual_ratio && std::abs(v.monotonicity) <= options.monotonicity_band) {
    v.label = BifurcationLabel::inconclusive;
    return v;
  }
  v.label = r_bc < r_cl ? BifurcationLabel::border_collision : BifurcationLabel::classical;
  return v;
}

}  // namespace bcpace
