// SPDX-License-Identifier: Apache-2.0
//
// Closed-form sender objectives. Each is minimized exactly by the senders that
// are optimal for the corresponding game under an unrestricted receiver.
#pragma once

#include <optional>

#include "semcomm/core.hpp"

namespace semcomm {

/// Sum_m p_m Var[X | m]: expected unexplained variance.
double reco_objective(const Protocol& protocol, const InputSpace& space);

/// f(p) = p * E log(1 + Binomial(d - 1, p)), by exact summation over k.
double binomial_log_moment(double p, unsigned d);

struct DiscObjective {
  /// Sum_m f(p_m); equals the synchronized expected loss.
  double value = 0.0;
  /// Sum_m p_m^2, reported for d = 2 only (value / log 2).
  std::optional<double> simplified;
};

DiscObjective disc_objective(const Protocol& protocol, const InputSpace& space, unsigned d);

/// -I(X; S(X)) = -H(S(X)) for a deterministic sender.
double global_objective(const Protocol& protocol, const InputSpace& space);

struct SupervisedObjective {
  double value = 0.0;
  /// Sum_m P(m)^2.
  double diversity = 0.0;
  /// Sum_{m,y} P(m, y)^2.
  double purity = 0.0;
};

SupervisedObjective supervised_objective(const Protocol& protocol, const InputSpace& space, const LabelMap& labels);

/// -I(Y; S(X)).
double classification_objective(const Protocol& protocol, const InputSpace& space, const LabelMap& labels);

struct ConvexityReport {
  bool convex = false;
  double min_second_difference = 0.0;
  double worst_p = 0.0;
};

/// Central second differences of binomial_log_moment on a grid over [0, 1].
ConvexityReport convexity_check(unsigned d, double grid_step = 1e-3);

/// Closed-form objective of the game in `spec` (binomial form for
/// discrimination, two-term form for supervised play).
double objective_value(const Protocol& protocol, const InputSpace& space, const GameSpec& spec);

}  // namespace semcomm
