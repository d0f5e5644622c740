// SPDX-License-Identifier: Apache-2.0
//
// Ground-truth loss evaluators for the five games, closed-form synchronized
// receivers, and synchronized senders. This is the oracle layer the closed-form
// objectives are checked against.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "semcomm/core.hpp"

namespace semcomm {

/// A per-input or expected loss in nats. Infinite losses (zero likelihood on
/// a realizable outcome) carry a flag instead of a float sentinel.
struct Loss {
  double nats = 0.0;
  bool infinite = false;

  static Loss inf() { return Loss{0.0, true}; }
};

/// Strict order on losses; every finite loss is below every infinite one.
bool operator<(const Loss& a, const Loss& b);

enum class EvalMode { Exact, MonteCarlo, Auto };

struct EvalOptions {
  EvalMode mode = EvalMode::Auto;
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  /// Elementary-term budget for exact enumeration; Auto switches to
  /// Monte-Carlo above it, Exact refuses with BudgetError.
  double exact_budget = 1e8;
};

struct LossReport {
  Loss expected;
  std::vector<Loss> per_input;
  EvalMode mode = EvalMode::Exact;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double standard_error = 0.0;
};

// Receivers -------------------------------------------------------------------

/// Message -> predicted point. Messages without an output are undefined.
class ReconstructionReceiver {
 public:
  explicit ReconstructionReceiver(std::vector<std::optional<Point>> outputs);

  std::size_t message_count() const noexcept { return outputs_.size(); }
  bool defined(Index message) const { return outputs_.at(message).has_value(); }
  /// Throws PreconditionError for undefined messages.
  const Point& at(Index message) const;

 private:
  std::vector<std::optional<Point>> outputs_;
};

/// (message, candidate tuple) -> distribution over candidate positions.
/// Candidates are input indices. Closed forms live behind a function; dense
/// tables are one layout of that function.
class DiscriminationReceiver {
 public:
  using Function = std::function<void(Index message, std::span<const Index> candidates, std::span<double> out)>;

  DiscriminationReceiver(std::size_t message_count, unsigned candidates, Function fn);

  /// Same distribution for every query.
  static DiscriminationReceiver constant(std::size_t message_count, std::vector<double> distribution);

  /// Dense table with one row of `candidates` probabilities per
  /// (message, tuple), rows ordered by message then by the tuple read as a
  /// base-N number.
  static DiscriminationReceiver from_table(std::size_t message_count, std::size_t input_count,
                                           unsigned candidates, std::vector<double> table);

  std::size_t message_count() const noexcept { return message_count_; }
  unsigned candidates() const noexcept { return candidates_; }

  void evaluate(Index message, std::span<const Index> candidates, std::span<double> out) const;
  std::vector<double> operator()(Index message, std::span<const Index> candidates) const;

 private:
  std::size_t message_count_;
  unsigned candidates_;
  Function fn_;
};

/// Message -> distribution over input indices.
class GlobalReceiver {
 public:
  explicit GlobalReceiver(std::vector<std::optional<std::vector<double>>> rows);

  std::size_t message_count() const noexcept { return rows_.size(); }
  bool defined(Index message) const { return rows_.at(message).has_value(); }
  const std::vector<double>& at(Index message) const;

 private:
  std::vector<std::optional<std::vector<double>>> rows_;
};

using Receiver = std::variant<ReconstructionReceiver, DiscriminationReceiver, GlobalReceiver>;

/// Number of dense rows of a discrimination receiver: K * N^d.
double discrimination_table_rows(std::size_t message_count, std::size_t input_count, unsigned candidates);

/// Dense table of `receiver` over every (message, tuple); refuses above
/// `max_rows` rows.
std::vector<double> tabulate(const DiscriminationReceiver& receiver, std::size_t input_count,
                             double max_rows = 1e6);

// Evaluators --------------------------------------------------------------------

LossReport eval_reconstruction(const Protocol& protocol, const ReconstructionReceiver& receiver,
                               const InputSpace& space);

/// Vanilla d-candidates game: uniform target position, d-1 distractors drawn
/// i.i.d. from X with replacement.
LossReport eval_discrimination(const Protocol& protocol, const DiscriminationReceiver& receiver,
                               const InputSpace& space, unsigned candidates,
                               const EvalOptions& options = {});

LossReport eval_global(const Protocol& protocol, const GlobalReceiver& receiver, const InputSpace& space);

/// Distractors drawn from X conditioned on a label different from the
/// target's. Requires balanced labels (within 1e-9) and at least two labels.
LossReport eval_supervised(const Protocol& protocol, const DiscriminationReceiver& receiver,
                           const InputSpace& space, const LabelMap& labels, unsigned candidates = 2,
                           const EvalOptions& options = {});

/// One candidate per label, candidate i drawn from X | Y = i; the receiver
/// must point at the candidate sharing the target's label.
LossReport eval_classification(const Protocol& protocol, const DiscriminationReceiver& receiver,
                               const InputSpace& space, const LabelMap& labels,
                               const EvalOptions& options = {});

/// Evaluates `receiver` on the game described by `spec`.
LossReport evaluate_game(const Protocol& protocol, const Receiver& receiver, const InputSpace& space,
                         const GameSpec& spec, const EvalOptions& options = {});

// Synchronized agents ---------------------------------------------------------------

/// Conditional means; undefined for unused messages.
ReconstructionReceiver synchronized_reconstruction_receiver(const Protocol& protocol, const InputSpace& space);

/// Uniform over the candidate positions whose input shares the message
/// (uniform over all positions when none does).
DiscriminationReceiver synchronized_discrimination_receiver(const Protocol& protocol, unsigned candidates);

/// f_X( . | S(X) = m); undefined for unused messages.
GlobalReceiver synchronized_global_receiver(const Protocol& protocol, const InputSpace& space);

/// Indicator normalization over positions that share the message and whose
/// label differs from every other candidate's.
DiscriminationReceiver synchronized_supervised_receiver(const Protocol& protocol, const LabelMap& labels,
                                                        unsigned candidates);

/// P(Y = j | X in [m]) for every query with message m.
DiscriminationReceiver synchronized_classification_receiver(const Protocol& protocol, const InputSpace& space,
                                                            const LabelMap& labels);

Receiver synchronized_receiver(const Protocol& protocol, const InputSpace& space, const GameSpec& spec);

enum class TieBreak { Lowest, Highest };

struct SenderResult {
  Protocol protocol;
  /// Loss achieved by each input under its chosen message.
  std::vector<Loss> achieved;
};

/// Maps each input to a loss-minimizing message. Losses within 1e-12 of the
/// minimum are ties, resolved by `tie_break`.
SenderResult synchronized_sender(const Receiver& receiver, const InputSpace& space, const GameSpec& spec,
                                 TieBreak tie_break = TieBreak::Lowest, const EvalOptions& options = {});

struct CandidateUnawareReport {
  bool equivalent = false;
  std::size_t queries = 0;
  double max_probability_gap = 0.0;
  double loss_gap = 0.0;
};

/// Compares the normalized indicator-score receiver R(m, x) = 1{S(x) = m}
/// with the synchronized discrimination receiver on every reachable query.
CandidateUnawareReport candidate_unaware_equivalence(const Protocol& protocol, const InputSpace& space,
                                                     unsigned candidates);

}  // namespace semcomm
