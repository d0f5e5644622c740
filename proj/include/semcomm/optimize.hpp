// SPDX-License-Identifier: Apache-2.0
//
// Protocol search: exhaustive enumeration, k-means alternation for the
// reconstruction game, and balanced partition constructors.
#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "semcomm/games.hpp"

namespace semcomm {

struct ExhaustiveOptions {
  double budget = 1e7;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct ExhaustiveResult {
  double value = 0.0;
  /// Every protocol within 1e-12 of the optimum, in enumeration order.
  std::vector<Protocol> optimal;
  /// `optimal` up to message relabeling, first-appearance labels, sorted.
  std::vector<Protocol> canonical;
  std::size_t evaluated = 0;
};

/// Minimizes the closed-form objective of `spec` over all K^N protocols.
/// Protocols are enumerated as base-K numbers with input 0 most significant.
ExhaustiveResult exhaustive_search(const InputSpace& space, std::size_t message_count, const GameSpec& spec,
                                   const ExhaustiveOptions& options = {});

/// Relabels messages in order of first appearance.
Protocol canonicalize(const Protocol& protocol);

struct RandomInit {
  std::uint64_t seed = 0;
};

using KMeansInit = std::variant<RandomInit, std::vector<Point>>;

struct KMeansResult {
  Protocol protocol;
  ReconstructionReceiver receiver;
  /// Objective after every update step; non-increasing.
  std::vector<double> trace;
  std::size_t rounds = 0;
  bool converged = false;
  std::size_t reseeds = 0;
};

/// Alternates nearest-centroid assignment (lowest index on ties) with
/// class-mean updates. Stops when the assignment is stable or the objective
/// decreases by less than `tol`. An empty cluster's centroid moves to the
/// point farthest from its nearest centroid.
KMeansResult kmeans_alternation(const InputSpace& space, std::size_t k, const KMeansInit& init,
                                std::size_t max_iters = 100, double tol = 1e-12);

enum class PartitionFlavor { GreedyUniform, AdversarialAntipodal };

PartitionFlavor parse_partition_flavor(std::string_view text);

/// GreedyUniform: inputs by decreasing weight, each into the lightest message.
/// AdversarialAntipodal: repeatedly pairs the two farthest unmatched inputs
/// (lowest index pair on ties); needs N = 2K and a uniform prior.
Protocol balanced_partition(const InputSpace& space, std::size_t k, PartitionFlavor flavor);

}  // namespace semcomm
