// SPDX-License-Identifier: Apache-2.0
//
// Protocol metrics: message variance and its random baseline, purity,
// topographic similarity, disentanglement scores, cluster variance and
// discrimination accuracy.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "semcomm/core.hpp"

namespace semcomm {

/// Sum_m 1/(2 p_m) Sum_{x1, x2 in [m]} w1 w2 ||x1 - x2||^2 over ordered pairs,
/// self pairs included. Reduces to the unweighted 1/(2N) Sum_m 1/|[m]| form
/// for uniform weights.
double message_variance(const Protocol& protocol, const InputSpace& space);

using ProtocolMetric = std::function<double(const Protocol&)>;

struct BaselineReport {
  double mean = 0.0;
  /// Population standard deviation over the shuffles.
  double std = 0.0;
  std::size_t shuffles = 0;
  std::vector<std::string> warnings;
};

/// Applies `metric` to `repeats` seeded shuffles of the assignment, which
/// preserve class sizes.
BaselineReport random_baseline(const Protocol& protocol, const InputSpace& space, const ProtocolMetric& metric,
                               std::size_t repeats, std::uint64_t seed);

/// Same, over every distinct shuffle of the assignment.
BaselineReport random_baseline_exhaustive(const Protocol& protocol, const InputSpace& space,
                                          const ProtocolMetric& metric, double budget = 1e6);

/// Weighted mean over messages of the majority label's share of the class.
double purity(const Protocol& protocol, const InputSpace& space, const LabelMap& labels);

/// Purity with each message scored by its best attribute.
double max_purity(const Protocol& protocol, const InputSpace& space, const std::vector<LabelMap>& attributes);

std::size_t levenshtein(std::span<const int> a, std::span<const int> b);

/// Spearman correlation of all unordered pairs (x_i, x_j), input Euclidean
/// distance against message distance. Symbol messages use edit distance.
/// Throws "topsim undefined (zero variance)" for a constant distance vector.
double topsim(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages);

/// Average-rank Spearman correlation.
double spearman(std::span<const double> a, std::span<const double> b);

enum class DisentanglementKind { PosDis, BosDis, SPosDis };

std::string_view to_string(DisentanglementKind kind);

struct DisentanglementReport {
  double value = 0.0;
  /// Units with non-zero entropy; the value is their mean score.
  std::size_t units = 0;
  std::string normalization;
};

/// PosDis scores message positions, BosDis per-symbol occurrence counts and
/// S-PosDis attributes, each by its MI gap over its own entropy.
DisentanglementReport disentanglement(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages,
                                      const std::vector<LabelMap>& attributes, DisentanglementKind kind);

/// {0,1}, {2,3}, ... over the vocabulary.
std::vector<std::vector<int>> consecutive_symbol_groups(unsigned vocab, unsigned group_size = 2);

/// Message variance after merging the messages that share a symbol group.
double cluster_variance(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages,
                        const std::vector<std::vector<int>>& groups);

enum class AccuracyReceiver { Synchronized, ReconstructionNearest };

AccuracyReceiver parse_accuracy_receiver(std::string_view text);

struct AccuracyReport {
  double accuracy = 0.0;
  std::size_t episodes = 0;
  double standard_error = 0.0;
  bool exact = false;
};

/// Monte-Carlo accuracy with `trials` episodes per target; ties are broken
/// uniformly in the seeded stream. A distractor equal to the target occupies
/// its own position, so only the target's position counts as correct.
AccuracyReport discrimination_accuracy(const Protocol& protocol, const InputSpace& space, AccuracyReceiver receiver,
                                       unsigned d, std::uint64_t seed, std::size_t trials = 1);

/// Expected accuracy over every target position and distractor tuple, ties
/// credited fractionally.
AccuracyReport discrimination_accuracy_exact(const Protocol& protocol, const InputSpace& space,
                                             AccuracyReceiver receiver, unsigned d, double budget = 1e8);

}  // namespace semcomm
