// SPDX-License-Identifier: Apache-2.0
#include "semcomm/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semcomm/info.hpp"

namespace semcomm {

double reco_objective(const Protocol& protocol, const InputSpace& space) {
  const auto p = message_probabilities(protocol, space);
  double total = 0.0;
  for (Index m = 0; m < p.size(); ++m)
    if (p[m] > 0.0) total += p[m] * conditional_stats(protocol, space, m).variance;
  return total;
}

double binomial_log_moment(double p, unsigned d) {
  if (d < 2) throw PreconditionError("binomial_log_moment needs d >= 2");
  if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw PreconditionError("binomial_log_moment needs p in [0, 1]");
  // Masses summed from normalized weights may overshoot by an ulp.
  p = std::clamp(p, 0.0, 1.0);
  if (p == 0.0) return 0.0;
  const unsigned n = d - 1;
  double expectation = 0.0;
  for (unsigned k = 1; k <= n; ++k) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                           k * std::log(p) + (n - k == 0 ? 0.0 : (n - k) * std::log1p(-p));
    expectation += std::exp(log_pmf) * std::log1p(static_cast<double>(k));
  }
  return p * expectation;
}

DiscObjective disc_objective(const Protocol& protocol, const InputSpace& space, unsigned d) {
  const auto p = message_probabilities(protocol, space);
  DiscObjective out;
  double squares = 0.0;
  for (double pm : p) {
    out.value += binomial_log_moment(pm, d);
    squares += pm * pm;
  }
  if (d == 2) out.simplified = squares;
  return out;
}

double global_objective(const Protocol& protocol, const InputSpace& space) {
  const auto p = message_probabilities(protocol, space);
  const double value = -entropy(p);

  std::vector<Index> identity(space.size());
  for (Index i = 0; i < identity.size(); ++i) identity[i] = i;
  const auto joint = joint_table(protocol.assignment(), protocol.message_count(), identity, space.size(), space.weights());
  const double check = -(entropy(space.weights()) - conditional_entropy(joint));
  if (std::abs(check - value) > 1e-10)
    throw Error("global objective disagrees with H(X) - H(X|S): " + std::to_string(value) + " vs " +
                std::to_string(check));
  return value;
}

SupervisedObjective supervised_objective(const Protocol& protocol, const InputSpace& space, const LabelMap& labels) {
  check_compatible(protocol, space);
  if (labels.size() != space.size()) throw PreconditionError("label map does not cover the input space");
  const auto joint =
      joint_table(protocol.assignment(), protocol.message_count(), labels.labels(), labels.label_count(), space.weights());
  SupervisedObjective out;
  for (const auto& row : joint.cells) {
    double pm = 0.0;
    for (double v : row) {
      pm += v;
      out.purity += v * v;
    }
    out.diversity += pm * pm;
  }
  out.value = out.diversity - out.purity;
  return out;
}

double classification_objective(const Protocol& protocol, const InputSpace& space, const LabelMap& labels) {
  check_compatible(protocol, space);
  if (labels.size() != space.size()) throw PreconditionError("label map does not cover the input space");
  return -mutual_information(
      joint_table(protocol.assignment(), protocol.message_count(), labels.labels(), labels.label_count(), space.weights()));
}

ConvexityReport convexity_check(unsigned d, double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 1e-3) throw PreconditionError("convexity grid step must be in (0, 1e-3]");
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid_step));
  ConvexityReport report;
  report.min_second_difference = HUGE_VAL;
  auto f = [&](std::size_t i) { return binomial_log_moment(std::min(1.0, static_cast<double>(i) / steps), d); };
  double prev = f(0), cur = f(1);
  for (std::size_t i = 1; i < steps; ++i) {
    const double next = f(i + 1);
    const double second = prev - 2.0 * cur + next;
    if (second < report.min_second_difference) {
      report.min_second_difference = second;
      report.worst_p = static_cast<double>(i) / steps;
    }
    prev = cur;
    cur = next;
  }
  report.convex = report.min_second_difference >= -1e-9;
  return report;
}

double objective_value(const Protocol& protocol, const InputSpace& space, const GameSpec& spec) {
  spec.validate(space.size());
  switch (spec.kind) {
    case GameKind::Reconstruction: return reco_objective(protocol, space);
    case GameKind::Discrimination: return disc_objective(protocol, space, spec.candidates).value;
    case GameKind::Global: return global_objective(protocol, space);
    case GameKind::Supervised:
      if (spec.candidates != 2) throw PreconditionError("supervised closed form is only known for d = 2");
      return supervised_objective(protocol, space, *spec.labels).value;
    case GameKind::Classification: return classification_objective(protocol, space, *spec.labels);
  }
  throw PreconditionError("unknown game kind");
}

}  // namespace semcomm
