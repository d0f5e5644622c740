// SPDX-License-Identifier: Apache-2.0
#include "semcomm/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semcomm/objectives.hpp"

namespace semcomm {

SemanticConsistencyReport semantic_consistency(const Protocol& protocol, const InputSpace& space, double margin) {
  SemanticConsistencyReport r;
  r.total = input_variance(space);
  r.unexplained = reco_objective(protocol, space);
  const Point mean = input_mean(space);
  const auto p = message_probabilities(protocol, space);
  for (Index m = 0; m < p.size(); ++m)
    if (p[m] > 0.0) r.explained += p[m] * squared_distance(conditional_stats(protocol, space, m).mean, mean);
  const double gap = r.total - r.unexplained;
  r.boundary = std::abs(gap) <= kBoundaryTolerance;
  r.consistent = !r.boundary && gap > margin;
  return r;
}

SpatialReport spatial_meaningfulness(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages,
                                     double epsilon0, double margin) {
  check_compatible(protocol, space);
  if (protocol.message_count() > messages.size())
    throw PreconditionError("protocol uses more messages than the message space holds");
  SpatialReport report;
  report.epsilon0 = epsilon0;
  if (messages.size() >= 2) {
    report.epsilon_m = epsilon_m(messages);
    if (epsilon0 < report.epsilon_m - kBoundaryTolerance)
      report.warnings.push_back("epsilon0 is below epsilon_M; only same-message pairs fall under the thresholds");
  }

  struct PairTerm {
    double distance, mass, sqdist;
  };
  const std::size_t n = space.size();
  std::vector<PairTerm> pairs;
  pairs.reserve(n * n);
  double unconditional = 0.0;
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      const double mass = space.weight(a) * space.weight(b);
      const double sq = squared_distance(space.point(a), space.point(b));
      const double dist = protocol[a] == protocol[b] ? 0.0 : messages.distance(protocol[a], protocol[b]);
      pairs.push_back({dist, mass, sq});
      unconditional += mass * sq;
    }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const PairTerm& x, const PairTerm& y) { return x.distance < y.distance; });

  std::vector<double> thresholds{0.0};
  for (const auto& t : pairs)
    if (t.distance > 0.0 && t.distance <= epsilon0 + kBoundaryTolerance &&
        t.distance - thresholds.back() > kBoundaryTolerance)
      thresholds.push_back(t.distance);

  report.meaningful = true;
  std::size_t cursor = 0;
  double mass = 0.0, sum = 0.0;
  for (double eps : thresholds) {
    while (cursor < pairs.size() && pairs[cursor].distance <= eps + kBoundaryTolerance) {
      mass += pairs[cursor].mass;
      sum += pairs[cursor].mass * pairs[cursor].sqdist;
      ++cursor;
    }
    ThresholdResult t;
    t.epsilon = eps;
    t.unconditional = unconditional;
    t.pair_mass = mass;
    if (mass <= 0.0) {
      t.vacuous = true;
      report.warnings.push_back("no input pair within epsilon = " + std::to_string(eps) + "; threshold skipped");
      report.thresholds.push_back(t);
      continue;
    }
    t.conditional = sum / mass;
    const double gap = unconditional - t.conditional;
    t.boundary = std::abs(gap) <= kBoundaryTolerance;
    t.holds = !t.boundary && gap > margin;
    report.meaningful = report.meaningful && t.holds;
    report.thresholds.push_back(t);
  }
  return report;
}

ReceiverTable receiver_table(const ReconstructionReceiver& receiver) {
  ReceiverTable table;
  for (Index m = 0; m < receiver.message_count(); ++m) {
    if (!receiver.defined(m)) continue;
    table.messages.push_back(m);
    table.candidates.emplace_back();
    table.outputs.push_back(receiver.at(m));
  }
  return table;
}

ReceiverTable receiver_table(const DiscriminationReceiver& receiver, std::size_t input_count, double max_rows) {
  const unsigned d = receiver.candidates();
  const double rows = discrimination_table_rows(receiver.message_count(), input_count, d);
  if (rows > max_rows) throw BudgetError("receiver table too large for a pairwise check", rows, max_rows);
  ReceiverTable table;
  std::vector<Index> cands(d, 0);
  for (Index m = 0; m < receiver.message_count(); ++m) {
    std::fill(cands.begin(), cands.end(), 0);
    while (true) {
      table.messages.push_back(m);
      table.candidates.push_back(cands);
      table.outputs.push_back(receiver(m, cands));
      std::size_t pos = d;
      while (pos > 0 && ++cands[pos - 1] == input_count) cands[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return table;
}

double simplicity_constant(const InputSpace& space, double epsilon0) {
  if (!(epsilon0 > 0.0)) throw PreconditionError("epsilon0 must be positive");
  return (std::sqrt(2.0) - 1.0) / (2.0 * epsilon0) * std::sqrt(input_variance(space));
}

SimplicityReport receiver_simplicity(const ReceiverTable& table, const MessageSpace& messages,
                                     const InputSpace& space, double epsilon0) {
  if (table.messages.size() != table.outputs.size() || table.candidates.size() != table.outputs.size())
    throw PreconditionError("receiver table columns differ in length");
  SimplicityReport r;
  r.k = simplicity_constant(space, epsilon0);
  const bool has_candidates = !table.candidates.empty() && !table.candidates.front().empty();
  r.embedding = has_candidates ? "message distance joined with candidate coordinates" : "message distance";

  const std::size_t rows = table.outputs.size();
  for (Index a = 0; a < rows; ++a)
    for (Index b = a + 1; b < rows; ++b) {
      const double out = euclidean_distance(table.outputs[a], table.outputs[b]);
      if (out == 0.0) continue;
      double dom2 = 0.0;
      if (table.messages[a] != table.messages[b]) {
        const double dm = messages.distance(table.messages[a], table.messages[b]);
        dom2 = dm * dm;
      }
      const auto& ca = table.candidates[a];
      const auto& cb = table.candidates[b];
      if (ca.size() != cb.size()) throw PreconditionError("receiver table rows differ in candidate count");
      for (std::size_t j = 0; j < ca.size(); ++j) dom2 += squared_distance(space.point(ca[j]), space.point(cb[j]));
      if (dom2 == 0.0) {
        if (out > kBoundaryTolerance && !r.unbounded) {
          r.unbounded = true;
          r.witness_a = a;
          r.witness_b = b;
          r.diagnostic = "rows " + std::to_string(a) + " and " + std::to_string(b) +
                         " share an embedding but differ in output";
        }
        continue;
      }
      const double ratio = out / std::sqrt(dom2);
      if (ratio > r.worst_ratio) {
        r.worst_ratio = ratio;
        if (!r.unbounded) {
          r.witness_a = a;
          r.witness_b = b;
        }
      }
    }
  r.simple = !r.unbounded && r.worst_ratio <= r.k + kBoundaryTolerance;
  if (!r.simple && !r.unbounded)
    r.diagnostic = "rows " + std::to_string(r.witness_a) + " and " + std::to_string(r.witness_b) + " reach ratio " +
                   std::to_string(r.worst_ratio) + " > k = " + std::to_string(r.k);
  return r;
}

ConstantReceiver optimal_constant_receiver(const InputSpace& space, const GameSpec& spec, std::size_t message_count) {
  if (message_count == 0) throw PreconditionError("constant receiver needs at least one message");
  switch (spec.kind) {
    case GameKind::Reconstruction:
      return {ReconstructionReceiver(std::vector<std::optional<Point>>(message_count, input_mean(space))),
              input_variance(space)};
    case GameKind::Discrimination:
      if (spec.candidates < 2) throw PreconditionError("candidate count d must be >= 2");
      return {DiscriminationReceiver::constant(message_count, std::vector<double>(spec.candidates, 1.0 / spec.candidates)),
              std::log(static_cast<double>(spec.candidates))};
    default:
      throw PreconditionError("optimal constant receiver is defined for reconstruction and discrimination only");
  }
}

NonDegeneracyReport non_degeneracy(const Receiver& receiver, const InputSpace& space, const GameSpec& spec,
                                   const EvalOptions& options) {
  const double constant = optimal_constant_receiver(space, spec).loss;
  SenderResult sender = synchronized_sender(receiver, space, spec, TieBreak::Lowest, options);
  Loss sup{0.0, false};
  for (const Loss& l : sender.achieved)
    if (sup < l) sup = l;
  const bool ok = !sup.infinite && sup.nats <= 0.25 * constant + kBoundaryTolerance;
  return NonDegeneracyReport{ok, sup, constant, std::move(sender.protocol), std::move(sender.achieved)};
}

}  // namespace semcomm
