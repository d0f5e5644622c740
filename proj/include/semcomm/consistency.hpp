// SPDX-License-Identifier: Apache-2.0
//
// Decision procedures for semantic consistency, spatial meaningfulness,
// receiver simplicity and receiver non-degeneracy.
#pragma once

#include <string>
#include <vector>

#include "semcomm/games.hpp"

namespace semcomm {

/// Differences within this bound count as equality, hence as failure of a
/// strict inequality.
inline constexpr double kBoundaryTolerance = 1e-12;

struct SemanticConsistencyReport {
  bool consistent = false;
  /// |explained variance| <= kBoundaryTolerance.
  bool boundary = false;
  double explained = 0.0;
  double unexplained = 0.0;
  double total = 0.0;
};

/// E_m Var[X | m] < Var[X] by more than `margin`.
SemanticConsistencyReport semantic_consistency(const Protocol& protocol, const InputSpace& space, double margin = 0.0);

struct ThresholdResult {
  /// 0 stands for the limit epsilon -> 0+, i.e. same-message pairs.
  double epsilon = 0.0;
  bool vacuous = false;
  bool holds = false;
  bool boundary = false;
  double conditional = 0.0;
  double unconditional = 0.0;
  /// P(d_M(S(x1), S(x2)) <= epsilon).
  double pair_mass = 0.0;
};

struct SpatialReport {
  bool meaningful = false;
  double epsilon0 = 0.0;
  double epsilon_m = 0.0;
  std::vector<ThresholdResult> thresholds;
  std::vector<std::string> warnings;
};

/// Checks the conditional pairwise inequality at epsilon -> 0+ and at every
/// realized message distance in (0, epsilon0]; the conditional expectation is
/// constant between realized distances.
SpatialReport spatial_meaningfulness(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages,
                                     double epsilon0, double margin = 0.0);

/// A finite receiver as explicit (message, candidates) -> output rows.
struct ReceiverTable {
  std::vector<Index> messages;
  /// One empty tuple per row for reconstruction receivers.
  std::vector<std::vector<Index>> candidates;
  std::vector<Point> outputs;
};

/// Rows for every defined message.
ReceiverTable receiver_table(const ReconstructionReceiver& receiver);

/// Rows for every (message, candidate tuple); refuses above `max_rows`.
ReceiverTable receiver_table(const DiscriminationReceiver& receiver, std::size_t input_count, double max_rows = 1e5);

struct SimplicityReport {
  bool simple = false;
  double k = 0.0;
  double worst_ratio = 0.0;
  /// Two rows at domain distance 0 with different outputs.
  bool unbounded = false;
  Index witness_a = 0;
  Index witness_b = 0;
  std::string diagnostic;
  std::string embedding;
};

/// k = (sqrt 2 - 1) / (2 epsilon0) * sqrt Var[X]. The domain distance of two
/// rows is sqrt(d_M(m, m')^2 + sum_j ||x_j - x'_j||^2).
double simplicity_constant(const InputSpace& space, double epsilon0);

SimplicityReport receiver_simplicity(const ReceiverTable& table, const MessageSpace& messages,
                                     const InputSpace& space, double epsilon0);

struct ConstantReceiver {
  Receiver receiver;
  double loss = 0.0;
};

/// Best constant receiver: E[X] for reconstruction, uniform over d positions
/// for discrimination.
ConstantReceiver optimal_constant_receiver(const InputSpace& space, const GameSpec& spec,
                                           std::size_t message_count = 1);

struct NonDegeneracyReport {
  bool non_degenerate = false;
  Loss sup_loss;
  double constant_loss = 0.0;
  /// One synchronized sender; the per-input losses do not depend on the choice.
  Protocol sender;
  std::vector<Loss> per_input;
};

NonDegeneracyReport non_degeneracy(const Receiver& receiver, const InputSpace& space, const GameSpec& spec,
                                   const EvalOptions& options = {});

}  // namespace semcomm
