#pragma once

#include <random>

#include "bcpace/normal_form.hpp"
#include "bcpace/pacing.hpp"

namespace bcpace::testing {

/// x -> 0.5 x + mu above the border, -1.5 x + mu below.
NormalFormMap golden_map();

struct RandomMapOptions {
  std::size_t max_dim = 3;
  // Upper bound for rho(A) and rho(AB); keeps simulations short.
  double max_radius = 0.9;
  // Lower bound on |X_fp(1)|, |X_u(1)|, X_l(1), |d(1)|, ((I-B)^-1 c)(1).
  double min_margin = 0.05;
  // Upper bound on any entry of the closed-form direction vectors.
  double max_entry = 50.0;
};

/// Rejection-samples a map passing the core conditions with B = A + u e1^T.
NormalFormMap random_valid_map(std::mt19937_64& rng, const RandomMapOptions& options = {});

/// Random (mu, delta) with mu >= 0: roughly half unilateral, half bilateral.
struct PacingPoint {
  double mu;
  double delta;
};
PacingPoint random_pacing_point(std::mt19937_64& rng, const PacingDerived& derived);

}  // namespace bcpace::testing
