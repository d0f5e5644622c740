// SPDX-License-Identifier: Apache-2.0
#include "semcomm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace semcomm {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

// InputSpace ------------------------------------------------------------------

InputSpace::InputSpace(std::vector<Point> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw PreconditionError("input space needs at least one point");
  if (weights_.size() != points_.size())
    throw PreconditionError("input space: " + std::to_string(points_.size()) + " points but " +
                            std::to_string(weights_.size()) + " weights");
  const std::size_t dim = points_.front().size();
  if (dim == 0) throw PreconditionError("input space points must have dimension >= 1");
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != dim)
      throw PreconditionError("input " + std::to_string(i) + " has dimension " +
                              std::to_string(points_[i].size()) + ", expected " +
                              std::to_string(dim));
    for (double v : points_[i])
      if (!std::isfinite(v)) throw PreconditionError("input " + std::to_string(i) + " is not finite");
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw PreconditionError("weight of input " + std::to_string(i) + " must be strictly positive");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw PreconditionError("weights sum to " + std::to_string(total) + ", expected 1");
}

InputSpace InputSpace::uniform(std::vector<Point> points) {
  const std::size_t n = points.size();
  if (n == 0) throw PreconditionError("input space needs at least one point");
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  return InputSpace(std::move(points), std::move(weights));
}

bool InputSpace::is_uniform(double tolerance) const {
  const double expected = 1.0 / static_cast<double>(size());
  return std::all_of(weights_.begin(), weights_.end(),
                     [&](double w) { return std::abs(w - expected) <= tolerance; });
}

// Symbols ---------------------------------------------------------------------

std::vector<int> parse_symbols(std::string_view text) {
  std::vector<int> out;
  const bool separated = text.find_first_of(" -:") != std::string_view::npos;
  auto digit = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
    throw PreconditionError(std::string("invalid symbol character '") + c + "'");
  };
  if (!separated) {
    for (char c : text) out.push_back(digit(c));
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = std::min(text.find_first_of(" -:", start), text.size());
      const std::string_view token = text.substr(start, end - start);
      if (!token.empty()) {
        int value = 0;
        for (char c : token) {
          if (c < '0' || c > '9') throw PreconditionError("invalid symbol token '" + std::string(token) + "'");
          value = value * 10 + (c - '0');
        }
        out.push_back(value);
      }
      start = end + 1;
    }
  }
  if (out.empty()) throw PreconditionError("empty message");
  return out;
}

std::string format_symbols(std::span<const int> symbols) {
  const bool compact = std::all_of(symbols.begin(), symbols.end(), [](int s) { return s >= 0 && s < 36; });
  std::string out;
  if (compact) {
    for (int s : symbols) out.push_back(s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + s - 10));
    return out;
  }
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(symbols[i]);
  }
  return out;
}

// MessageSpace ----------------------------------------------------------------

MessageSpace MessageSpace::symbol_product(unsigned vocab, unsigned length) {
  if (vocab < 1 || length < 1) throw PreconditionError("symbol space needs vocab >= 1 and length >= 1");
  double count = std::pow(static_cast<double>(vocab), static_cast<double>(length));
  if (count > 1e8) throw PreconditionError("symbol product space larger than 1e8 messages");
  MessageSpace space;
  space.metric_ = MessageMetric::Hamming;
  space.product_ = true;
  space.vocab_ = vocab;
  space.length_ = length;
  space.size_ = static_cast<std::size_t>(count);
  return space;
}

MessageSpace MessageSpace::symbol_list(unsigned vocab, std::vector<std::vector<int>> sequences) {
  if (sequences.empty()) throw PreconditionError("message space needs at least one message");
  const std::size_t length = sequences.front().size();
  for (const auto& seq : sequences) {
    if (seq.size() != length || length == 0)
      throw PreconditionError("symbol messages must share one non-zero length");
    for (int s : seq)
      if (s < 0 || static_cast<unsigned>(s) >= vocab)
        throw PreconditionError("symbol " + std::to_string(s) + " outside vocabulary of size " +
                                std::to_string(vocab));
  }
  auto sorted = sequences;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw PreconditionError("messages must be pairwise distinct");
  MessageSpace space;
  space.metric_ = MessageMetric::Hamming;
  space.vocab_ = vocab;
  space.length_ = static_cast<unsigned>(length);
  space.size_ = sequences.size();
  space.sequences_ = std::move(sequences);
  return space;
}

MessageSpace MessageSpace::euclidean(std::vector<Point> vectors) {
  if (vectors.empty()) throw PreconditionError("message space needs at least one message");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim || dim == 0) throw PreconditionError("message vectors must share one non-zero dimension");
    for (double x : v)
      if (!std::isfinite(x)) throw PreconditionError("message vectors must be finite");
  }
  for (std::size_t a = 0; a < vectors.size(); ++a)
    for (std::size_t b = a + 1; b < vectors.size(); ++b)
      if (squared_distance(vectors[a], vectors[b]) == 0.0)
        throw PreconditionError("messages must be pairwise distinct");
  MessageSpace space;
  space.metric_ = MessageMetric::Euclidean;
  space.size_ = vectors.size();
  space.vectors_ = std::move(vectors);
  return space;
}

MessageSpace MessageSpace::table(std::vector<std::vector<double>> distances) {
  const std::size_t k = distances.size();
  if (k == 0) throw PreconditionError("message space needs at least one message");
  for (std::size_t a = 0; a < k; ++a) {
    if (distances[a].size() != k) throw PreconditionError("distance table must be square");
    for (std::size_t b = 0; b < k; ++b) {
      const double d = distances[a][b];
      if (!std::isfinite(d)) throw PreconditionError("distance table entries must be finite");
      if (a == b && d != 0.0) throw PreconditionError("distance table diagonal must be zero");
      if (a != b && !(d > 0.0)) throw PreconditionError("distinct messages need strictly positive distance");
      if (d != distances[b][a]) throw PreconditionError("distance table must be symmetric");
    }
  }
  MessageSpace space;
  space.metric_ = MessageMetric::Table;
  space.size_ = k;
  space.table_ = std::move(distances);
  return space;
}

std::vector<int> MessageSpace::symbols(Index m) const {
  if (!has_symbols()) throw PreconditionError("message space has no symbol form");
  if (m >= size_) throw PreconditionError("message index out of range");
  if (!product_) return sequences_[m];
  std::vector<int> out(length_);
  for (unsigned pos = length_; pos-- > 0;) {
    out[pos] = static_cast<int>(m % vocab_);
    m /= vocab_;
  }
  return out;
}

const Point& MessageSpace::vector(Index m) const {
  if (metric_ != MessageMetric::Euclidean) throw PreconditionError("message space has no vector form");
  return vectors_.at(m);
}

double MessageSpace::distance(Index a, Index b) const {
  if (a >= size_ || b >= size_) throw PreconditionError("message index out of range");
  switch (metric_) {
    case MessageMetric::Hamming: {
      if (!product_) {
        const auto& x = sequences_[a];
        const auto& y = sequences_[b];
        double d = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] != y[i]) ? 1.0 : 0.0;
        return d;
      }
      double d = 0.0;
      for (unsigned pos = 0; pos < length_; ++pos) {
        d += (a % vocab_ != b % vocab_) ? 1.0 : 0.0;
        a /= vocab_;
        b /= vocab_;
      }
      return d;
    }
    case MessageMetric::Euclidean:
      return euclidean_distance(vectors_[a], vectors_[b]);
    case MessageMetric::Table:
      return table_[a][b];
  }
  return 0.0;
}

std::string MessageSpace::label(Index m) const {
  switch (metric_) {
    case MessageMetric::Hamming: {
      const auto seq = symbols(m);
      return format_symbols(seq);
    }
    case MessageMetric::Euclidean: {
      std::ostringstream os;
      os.precision(17);
      const auto& v = vectors_.at(m);
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ';';
        os << v[i];
      }
      return os.str();
    }
    case MessageMetric::Table:
      return "m" + std::to_string(m);
  }
  return {};
}

std::optional<Index> MessageSpace::find(std::string_view text) const {
  if (metric_ == MessageMetric::Hamming) {
    std::vector<int> seq;
    try {
      seq = parse_symbols(text);
    } catch (const PreconditionError&) {
      return std::nullopt;
    }
    if (seq.size() != length_) return std::nullopt;
    if (product_) {
      Index index = 0;
      for (int s : seq) {
        if (s < 0 || static_cast<unsigned>(s) >= vocab_) return std::nullopt;
        index = index * vocab_ + static_cast<Index>(s);
      }
      return index;
    }
    auto it = std::find(sequences_.begin(), sequences_.end(), seq);
    if (it == sequences_.end()) return std::nullopt;
    return static_cast<Index>(it - sequences_.begin());
  }
  for (Index m = 0; m < size_; ++m)
    if (label(m) == text) return m;
  return std::nullopt;
}

// Protocol / labels -------------------------------------------------------------

Protocol::Protocol(std::vector<Index> assignment, std::size_t message_count)
    : assignment_(std::move(assignment)), message_count_(message_count) {
  if (message_count_ == 0) throw PreconditionError("protocol needs at least one message");
  for (std::size_t i = 0; i < assignment_.size(); ++i)
    if (assignment_[i] >= message_count_)
      throw PreconditionError("input " + std::to_string(i) + " mapped to message " +
                              std::to_string(assignment_[i]) + " >= K = " + std::to_string(message_count_));
}

Protocol Protocol::identity(std::size_t inputs) {
  std::vector<Index> a(inputs);
  std::iota(a.begin(), a.end(), Index{0});
  return Protocol(std::move(a), std::max<std::size_t>(inputs, 1));
}

Protocol Protocol::constant(std::size_t inputs, std::size_t message_count) {
  return Protocol(std::vector<Index>(inputs, 0), message_count);
}

LabelMap::LabelMap(std::vector<Index> labels, std::vector<std::string> names)
    : labels_(std::move(labels)), names_(std::move(names)) {
  if (labels_.empty()) throw PreconditionError("label map must be non-empty");
  const Index max_label = *std::max_element(labels_.begin(), labels_.end());
  if (names_.empty())
    for (Index y = 0; y <= max_label; ++y) names_.push_back(std::to_string(y));
  if (max_label >= names_.size()) throw PreconditionError("label index outside the label set");
}

LabelMap LabelMap::from_strings(const std::vector<std::string>& values) {
  std::vector<std::string> names;
  std::map<std::string, Index> lookup;
  std::vector<Index> labels;
  labels.reserve(values.size());
  for (const auto& v : values) {
    auto [it, inserted] = lookup.emplace(v, names.size());
    if (inserted) names.push_back(v);
    labels.push_back(it->second);
  }
  return LabelMap(std::move(labels), std::move(names));
}

std::string_view to_string(GameKind kind) {
  switch (kind) {
    case GameKind::Reconstruction: return "reconstruction";
    case GameKind::Discrimination: return "discrimination";
    case GameKind::Global: return "global";
    case GameKind::Supervised: return "supervised";
    case GameKind::Classification: return "classification";
  }
  return "unknown";
}

GameKind parse_game_kind(std::string_view text) {
  for (GameKind k : {GameKind::Reconstruction, GameKind::Discrimination, GameKind::Global,
                     GameKind::Supervised, GameKind::Classification})
    if (to_string(k) == text) return k;
  throw PreconditionError("unknown game kind '" + std::string(text) + "'");
}

void GameSpec::validate(std::size_t input_count) const {
  const bool uses_candidates = kind == GameKind::Discrimination || kind == GameKind::Supervised;
  if (uses_candidates && candidates < 2) throw PreconditionError("candidate count d must be >= 2");
  if (kind == GameKind::Supervised || kind == GameKind::Classification) {
    if (!labels) throw PreconditionError(std::string(to_string(kind)) + " game needs a label map");
    if (labels->size() != input_count) throw PreconditionError("label map does not cover the input space");
  }
  if (kind == GameKind::Supervised) {
    if (labels->label_count() < 2) throw PreconditionError("supervised game needs >=2 labels");
    if (candidates > labels->label_count())
      throw PreconditionError("supervised game needs d <= |Y|");
  }
}

// Statistics ------------------------------------------------------------------

void check_compatible(const Protocol& protocol, const InputSpace& space) {
  if (protocol.input_count() != space.size())
    throw PreconditionError("protocol covers " + std::to_string(protocol.input_count()) +
                            " inputs but the input space has " + std::to_string(space.size()));
}

std::vector<std::vector<Index>> equivalence_classes(const Protocol& protocol) {
  std::vector<std::vector<Index>> classes(protocol.message_count());
  for (Index i = 0; i < protocol.input_count(); ++i) classes[protocol[i]].push_back(i);
  return classes;
}

std::vector<double> message_probabilities(const Protocol& protocol, const InputSpace& space) {
  check_compatible(protocol, space);
  std::vector<double> p(protocol.message_count(), 0.0);
  for (Index i = 0; i < space.size(); ++i) p[protocol[i]] += space.weight(i);
  return p;
}

Point input_mean(const InputSpace& space) {
  Point mean(space.dimension(), 0.0);
  for (Index i = 0; i < space.size(); ++i)
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += space.weight(i) * space.point(i)[k];
  return mean;
}

double input_variance(const InputSpace& space) {
  const Point mean = input_mean(space);
  double var = 0.0;
  for (Index i = 0; i < space.size(); ++i) var += space.weight(i) * squared_distance(space.point(i), mean);
  return var;
}

ConditionalStats conditional_stats(const Protocol& protocol, const InputSpace& space, Index message) {
  check_compatible(protocol, space);
  if (message >= protocol.message_count()) throw PreconditionError("message index out of range");
  ConditionalStats stats;
  stats.mean.assign(space.dimension(), 0.0);
  for (Index i = 0; i < space.size(); ++i) {
    if (protocol[i] != message) continue;
    stats.probability += space.weight(i);
    for (std::size_t k = 0; k < stats.mean.size(); ++k) stats.mean[k] += space.weight(i) * space.point(i)[k];
  }
  if (stats.probability <= 0.0) throw PreconditionError("empty equivalence class");
  for (double& v : stats.mean) v /= stats.probability;
  for (Index i = 0; i < space.size(); ++i)
    if (protocol[i] == message) stats.variance += space.weight(i) * squared_distance(space.point(i), stats.mean);
  stats.variance /= stats.probability;
  return stats;
}

double expected_pairwise_sqdist(const InputSpace& space) {
  double sum = 0.0;
  for (Index a = 0; a < space.size(); ++a)
    for (Index b = 0; b < space.size(); ++b)
      sum += space.weight(a) * space.weight(b) * squared_distance(space.point(a), space.point(b));
  return sum;
}

double epsilon_m(const MessageSpace& messages) {
  if (messages.size() < 2) throw PreconditionError("epsilon_M undefined for fewer than two messages");
  if (messages.is_product()) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < messages.size(); ++a)
    for (Index b = a + 1; b < messages.size(); ++b) best = std::min(best, messages.distance(a, b));
  return best;
}

}  // namespace semcomm
