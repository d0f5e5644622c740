// SPDX-License-Identifier: Apache-2.0
//
// Seeded random instances for property suites and the `verify` subcommand.
#pragma once

#include <cstdint>

#include "semcomm/games.hpp"
#include "semcomm/random.hpp"

namespace semcomm {

struct InstanceLimits {
  std::size_t max_inputs = 8;
  std::size_t max_dimension = 3;
  std::size_t max_messages = 4;
  bool uniform = false;
};

struct RandomInstance {
  InputSpace space;
  Protocol protocol;
};

/// 2..max_inputs distinct points with coordinates uniform in [-3, 3] and
/// either uniform or random strictly positive weights.
InputSpace random_input_space(Rng& rng, const InstanceLimits& limits = {});

/// Random assignment into 1..max_messages messages; unused messages allowed.
Protocol random_protocol(Rng& rng, std::size_t inputs, std::size_t max_messages);

/// Instance `index` of the population drawn from `seed`.
RandomInstance random_instance(std::uint64_t seed, std::uint64_t index, const InstanceLimits& limits = {});

/// Labels with exactly inputs / label_count inputs each, in random order.
/// Requires label_count to divide inputs.
LabelMap random_balanced_labels(Rng& rng, std::size_t inputs, std::size_t label_count);

/// A reconstruction receiver that is simple and non-degenerate at epsilon0,
/// on its own input space and scalar message space.
struct ClusteredReceiverInstance {
  InputSpace space;
  MessageSpace messages;
  ReconstructionReceiver receiver;
  double epsilon0 = 1.0;
  std::size_t attempts = 0;
};

/// Clustered inputs on a line: at least 17 messages spaced >= epsilon0 apart,
/// receiver outputs near the cluster centers. Candidates are redrawn until
/// simplicity and non-degeneracy both hold; throws Error after 1000 attempts.
ClusteredReceiverInstance random_clustered_receiver(std::uint64_t seed, std::uint64_t index);

}  // namespace semcomm
