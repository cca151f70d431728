#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace bcpace {

struct GainObservation {
  double delta = 0.0;  // > 0
  double gamma = 0.0;  // > 0
};

/// Gamma(delta) = c0 + max(0, a - b / delta), all parameters >= 0.
struct BorderCollisionFit {
  double c0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;  // RMS in Gamma
  double evaluate(double delta) const noexcept;
};

/// Gamma(delta) is the positive root of p delta^2 G^3 + q G - 1 = 0.
struct ClassicalFit {
  double p = 0.0;
  double q = 0.0;
  double residual = 0.0;
  double evaluate(double delta) const;
};

enum class BifurcationLabel { border_collision, classical, inconclusive };
std::string_view to_string(BifurcationLabel label) noexcept;

struct ClassifierOptions {
  std::size_t min_samples = 5;
  // Residuals closer than this (relative) do not separate the models.
  double residual_ratio = 0.2;
  // |Spearman| at or below this is treated as "no trend".
  double monotonicity_band = 0.3;
  // The winning model must cut the constant-fit RMS below this fraction
  // (0.3 leaves about 9% of the variance unexplained), otherwise the data
  // show no structure either model could explain. Eight flat points with 2%
  // noise pass a 0.5 guard about 1.6% of the time by chance.
  double structure_ratio = 0.3;
};

struct ClassifierVerdict {
  BifurcationLabel label = BifurcationLabel::inconclusive;
  BorderCollisionFit bc_fit;
  ClassicalFit classical_fit;
  double monotonicity = 0.0;       // Spearman rank correlation of (delta, Gamma)
  double constant_residual = 0.0;  // RMS about the mean
  std::optional<double> mu_known;
};

BorderCollisionFit fit_border_collision(std::span<const GainObservation> samples);
ClassicalFit fit_classical(std::span<const GainObservation> samples);
/// Spearman rank correlation with average ranks for ties; 0 when either
/// variable is constant.
double spearman(std::span<const GainObservation> samples);

/// Decides whether gain-vs-amplitude data look like a border-collision
/// (flat, then increasing) or a classical (smoothly decreasing) response.
/// `mu_known` is carried into the verdict; neither model's parameters can be
/// pinned by it without the unknown rescaling, so the fits ignore it.
ClassifierVerdict classify_bifurcation(std::span<const GainObservation> samples,
                                       std::optional<double> mu_known = std::nullopt,
                                       const ClassifierOptions& options = {});

}  // namespace bcpace
