// SPDX-License-Identifier: Apache-2.0
//
// Input spaces, message spaces, protocols and labels, plus the elementary
// statistics every other module builds on.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "semcomm/error.hpp"

namespace semcomm {

using Index = std::size_t;
using Point = std::vector<double>;

double squared_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Finite weighted point set: the input random variable.
///
/// Weights are probabilities. They must be strictly positive and sum to one
/// within 1e-12; all points share one dimension and are finite.
class InputSpace {
 public:
  InputSpace(std::vector<Point> points, std::vector<double> weights);

  /// Uniform prior over `points`.
  static InputSpace uniform(std::vector<Point> points);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dimension() const noexcept { return points_.front().size(); }
  const Point& point(Index i) const { return points_.at(i); }
  double weight(Index i) const { return weights_.at(i); }
  std::span<const Point> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  bool is_uniform(double tolerance = 1e-12) const;

 private:
  std::vector<Point> points_;
  std::vector<double> weights_;
};

enum class MessageMetric { Hamming, Euclidean, Table };

/// Finite message set with an explicit metric.
///
/// Symbol messages are sequences over the vocabulary 0..V-1 under Hamming
/// distance. A product space holds all V^L sequences, indexed as base-V
/// numbers with the first symbol most significant.
class MessageSpace {
 public:
  static MessageSpace symbol_product(unsigned vocab, unsigned length);
  static MessageSpace symbol_list(unsigned vocab, std::vector<std::vector<int>> sequences);
  static MessageSpace euclidean(std::vector<Point> vectors);
  static MessageSpace table(std::vector<std::vector<double>> distances);

  std::size_t size() const noexcept { return size_; }
  MessageMetric metric() const noexcept { return metric_; }
  double distance(Index a, Index b) const;

  bool has_symbols() const noexcept { return metric_ == MessageMetric::Hamming; }
  bool is_product() const noexcept { return product_; }
  unsigned vocab() const noexcept { return vocab_; }
  unsigned length() const noexcept { return length_; }
  /// Symbol sequence of message `m`; only for symbol spaces.
  std::vector<int> symbols(Index m) const;
  /// Vector form of message `m`; only for Euclidean spaces.
  const Point& vector(Index m) const;

  /// Text form used in protocol files: symbol strings such as "0371", or the
  /// coordinates of Euclidean messages joined by ';', or "m<i>" for tables.
  std::string label(Index m) const;
  std::optional<Index> find(std::string_view label) const;

 private:
  MessageSpace() = default;

  MessageMetric metric_ = MessageMetric::Hamming;
  std::size_t size_ = 0;
  bool product_ = false;
  unsigned vocab_ = 0;
  unsigned length_ = 0;
  std::vector<std::vector<int>> sequences_;
  std::vector<Point> vectors_;
  std::vector<std::vector<double>> table_;
};

/// Parses a symbol string. Plain strings use one base-36 digit per symbol;
/// strings containing ' ', '-' or ':' are split on those separators.
std::vector<int> parse_symbols(std::string_view text);
std::string format_symbols(std::span<const int> symbols);

/// Deterministic sender: a total map from input index to message index.
class Protocol {
 public:
  Protocol(std::vector<Index> assignment, std::size_t message_count);

  static Protocol identity(std::size_t inputs);
  static Protocol constant(std::size_t inputs, std::size_t message_count);

  std::size_t input_count() const noexcept { return assignment_.size(); }
  std::size_t message_count() const noexcept { return message_count_; }
  Index operator[](Index input) const { return assignment_.at(input); }
  std::span<const Index> assignment() const noexcept { return assignment_; }

  friend bool operator==(const Protocol&, const Protocol&) = default;

 private:
  std::vector<Index> assignment_;
  std::size_t message_count_;
};

/// Total map from input index to a label in a finite, non-empty set.
class LabelMap {
 public:
  explicit LabelMap(std::vector<Index> labels, std::vector<std::string> names = {});
  static LabelMap from_strings(const std::vector<std::string>& values);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t label_count() const noexcept { return names_.size(); }
  Index operator[](Index input) const { return labels_.at(input); }
  std::span<const Index> labels() const noexcept { return labels_; }
  const std::string& name(Index label) const { return names_.at(label); }

 private:
  std::vector<Index> labels_;
  std::vector<std::string> names_;
};

enum class GameKind { Reconstruction, Discrimination, Global, Supervised, Classification };

std::string_view to_string(GameKind kind);
GameKind parse_game_kind(std::string_view text);

struct GameSpec {
  GameKind kind = GameKind::Reconstruction;
  unsigned candidates = 2;
  std::optional<LabelMap> labels;
  std::uint64_t seed = 0;
  std::size_t samples = 200000;

  /// Throws PreconditionError when the parameters are inconsistent with the
  /// game kind (d < 2, missing labels, d > |Y| for supervised play).
  void validate(std::size_t input_count) const;
};

// Elementary statistics -----------------------------------------------------

/// Inputs of each message, in increasing input order; unused messages map to
/// an empty class.
std::vector<std::vector<Index>> equivalence_classes(const Protocol& protocol);

/// p_m = P(S(X) = m) for every message.
std::vector<double> message_probabilities(const Protocol& protocol, const InputSpace& space);

Point input_mean(const InputSpace& space);

/// Total variance E||X - EX||^2.
double input_variance(const InputSpace& space);

struct ConditionalStats {
  double probability = 0.0;
  Point mean;
  double variance = 0.0;
};

/// Mean and total variance of X given S(X) = m. Throws PreconditionError
/// "empty equivalence class" for zero-probability messages.
ConditionalStats conditional_stats(const Protocol& protocol, const InputSpace& space, Index message);

/// E||x1 - x2||^2 for independent draws, by direct weighted double sum.
double expected_pairwise_sqdist(const InputSpace& space);

/// Minimal distance between two distinct messages.
double epsilon_m(const MessageSpace& messages);

/// Throws PreconditionError unless `protocol` covers exactly `space`.
void check_compatible(const Protocol& protocol, const InputSpace& space);

}  // namespace semcomm
