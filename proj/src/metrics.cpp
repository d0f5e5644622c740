// SPDX-License-Identifier: Apache-2.0
#include "semcomm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semcomm/info.hpp"
#include "semcomm/random.hpp"

namespace semcomm {

double message_variance(const Protocol& protocol, const InputSpace& space) {
  const auto classes = equivalence_classes(protocol);
  const auto p = message_probabilities(protocol, space);
  double total = 0.0;
  for (Index m = 0; m < classes.size(); ++m) {
    if (classes[m].size() < 2) continue;
    double local = 0.0;
    for (Index a : classes[m])
      for (Index b : classes[m])
        local += space.weight(a) * space.weight(b) * squared_distance(space.point(a), space.point(b));
    total += local / (2.0 * p[m]);
  }
  return total;
}

namespace {

BaselineReport summarize(const std::vector<double>& values) {
  BaselineReport r;
  r.shuffles = values.size();
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  for (double v : values) r.std += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(r.std / static_cast<double>(values.size()));
  return r;
}

void warn_weights(const InputSpace& space, BaselineReport& r) {
  if (!space.is_uniform())
    r.warnings.push_back("non-uniform weights: shuffles preserve class sizes, not class masses");
}

}  // namespace

BaselineReport random_baseline(const Protocol& protocol, const InputSpace& space, const ProtocolMetric& metric,
                               std::size_t repeats, std::uint64_t seed) {
  check_compatible(protocol, space);
  if (repeats == 0) throw PreconditionError("random baseline needs repeats >= 1");
  std::vector<double> values;
  for (std::size_t r = 0; r < repeats; ++r) {
    Rng rng = substream(seed, "baseline", r);
    std::vector<Index> a(protocol.assignment().begin(), protocol.assignment().end());
    std::shuffle(a.begin(), a.end(), rng);
    values.push_back(metric(Protocol(std::move(a), protocol.message_count())));
  }
  BaselineReport report = summarize(values);
  warn_weights(space, report);
  return report;
}

BaselineReport random_baseline_exhaustive(const Protocol& protocol, const InputSpace& space,
                                          const ProtocolMetric& metric, double budget) {
  check_compatible(protocol, space);
  std::vector<std::size_t> sizes(protocol.message_count(), 0);
  for (Index m : protocol.assignment()) ++sizes[m];
  double log_count = std::lgamma(static_cast<double>(protocol.input_count()) + 1.0);
  for (auto s : sizes) log_count -= std::lgamma(static_cast<double>(s) + 1.0);
  const double count = std::exp(log_count);
  if (count > budget) throw BudgetError("too many distinct shuffles", count, budget);

  std::vector<Index> a(protocol.assignment().begin(), protocol.assignment().end());
  std::sort(a.begin(), a.end());
  std::vector<double> values;
  do {
    values.push_back(metric(Protocol(a, protocol.message_count())));
  } while (std::next_permutation(a.begin(), a.end()));
  BaselineReport report = summarize(values);
  warn_weights(space, report);
  return report;
}

namespace {

/// Per-message majority mass for one attribute.
std::vector<double> majority_mass(const Protocol& protocol, const InputSpace& space, const LabelMap& labels) {
  if (labels.size() != space.size()) throw PreconditionError("label map does not cover the input space");
  const auto joint =
      joint_table(protocol.assignment(), protocol.message_count(), labels.labels(), labels.label_count(), space.weights());
  std::vector<double> out;
  for (const auto& row : joint.cells) out.push_back(*std::max_element(row.begin(), row.end()));
  return out;
}

}  // namespace

double purity(const Protocol& protocol, const InputSpace& space, const LabelMap& labels) {
  check_compatible(protocol, space);
  const auto majority = majority_mass(protocol, space, labels);
  return std::accumulate(majority.begin(), majority.end(), 0.0);
}

double max_purity(const Protocol& protocol, const InputSpace& space, const std::vector<LabelMap>& attributes) {
  check_compatible(protocol, space);
  if (attributes.empty()) throw PreconditionError("max-purity needs at least one attribute");
  std::vector<double> best(protocol.message_count(), 0.0);
  for (const auto& attr : attributes) {
    const auto majority = majority_mass(protocol, space, attr);
    for (Index m = 0; m < best.size(); ++m) best[m] = std::max(best[m], majority[m]);
  }
  return std::accumulate(best.begin(), best.end(), 0.0);
}

std::size_t levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

bool constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw PreconditionError("spearman needs two samples of equal length >= 2");
  if (constant(a) || constant(b)) throw PreconditionError("spearman undefined (zero variance)");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double topsim(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages) {
  check_compatible(protocol, space);
  if (space.size() < 2) throw PreconditionError("topsim needs at least two inputs");
  if (protocol.message_count() > messages.size())
    throw PreconditionError("protocol uses more messages than the message space holds");
  std::vector<std::vector<int>> symbols;
  if (messages.has_symbols())
    for (Index m = 0; m < protocol.message_count(); ++m) symbols.push_back(messages.symbols(m));
  std::vector<double> input_d, message_d;
  for (Index i = 0; i < space.size(); ++i)
    for (Index j = i + 1; j < space.size(); ++j) {
      input_d.push_back(euclidean_distance(space.point(i), space.point(j)));
      const Index a = protocol[i], b = protocol[j];
      double md = 0.0;
      if (a != b)
        md = messages.has_symbols() ? static_cast<double>(levenshtein(symbols[a], symbols[b])) : messages.distance(a, b);
      message_d.push_back(md);
    }
  if (constant(input_d) || constant(message_d)) throw PreconditionError("topsim undefined (zero variance)");
  return spearman(input_d, message_d);
}

std::string_view to_string(DisentanglementKind kind) {
  switch (kind) {
    case DisentanglementKind::PosDis: return "posdis";
    case DisentanglementKind::BosDis: return "bosdis";
    case DisentanglementKind::SPosDis: return "sposdis";
  }
  return "unknown";
}

namespace {

double mi(std::span<const Index> a, std::size_t a_count, std::span<const Index> b, std::size_t b_count,
          std::span<const double> w) {
  return mutual_information(joint_table(a, a_count, b, b_count, w));
}

double variable_entropy(std::span<const Index> a, std::size_t count, std::span<const double> w) {
  std::vector<double> p(count, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) p[a[i]] += w[i];
  return entropy(p);
}

/// Gap between the two largest values; a missing second value counts as 0.
double top_gap(std::vector<double> values) {
  std::sort(values.begin(), values.end(), std::greater<>());
  const double first = values.empty() ? 0.0 : values[0];
  const double second = values.size() < 2 ? 0.0 : values[1];
  return first - second;
}

}  // namespace

DisentanglementReport disentanglement(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages,
                                      const std::vector<LabelMap>& attributes, DisentanglementKind kind) {
  check_compatible(protocol, space);
  if (!messages.has_symbols()) throw PreconditionError("disentanglement needs symbol-sequence messages");
  if (attributes.size() < 2) throw PreconditionError(std::string(to_string(kind)) + " needs at least two attributes");
  for (const auto& a : attributes)
    if (a.size() != space.size()) throw PreconditionError("attribute does not cover the input space");
  const auto w = space.weights();
  const std::size_t n = space.size();
  const unsigned vocab = messages.vocab();

  std::vector<std::vector<int>> seq(n);
  std::size_t length = 0;
  for (Index x = 0; x < n; ++x) {
    seq[x] = messages.symbols(protocol[x]);
    length = std::max(length, seq[x].size());
  }
  // Positions past a message's end read as an extra "absent" symbol.
  auto position = [&](std::size_t j) {
    std::vector<Index> v(n);
    for (Index x = 0; x < n; ++x) v[x] = j < seq[x].size() ? static_cast<Index>(seq[x][j]) : vocab;
    return v;
  };

  DisentanglementReport report;
  report.normalization = "mean over units with non-zero entropy";
  double total = 0.0;
  auto score_unit = [&](std::span<const Index> unit, std::size_t unit_count) {
    const double h = variable_entropy(unit, unit_count, w);
    if (h <= 0.0) return;
    std::vector<double> gains;
    for (const auto& attr : attributes) gains.push_back(mi(unit, unit_count, attr.labels(), attr.label_count(), w));
    total += top_gap(gains) / h;
    ++report.units;
  };

  switch (kind) {
    case DisentanglementKind::PosDis:
      for (std::size_t j = 0; j < length; ++j) score_unit(position(j), vocab + 1);
      break;
    case DisentanglementKind::BosDis:
      for (unsigned s = 0; s < vocab; ++s) {
        std::vector<Index> counts(n, 0);
        for (Index x = 0; x < n; ++x) counts[x] = static_cast<Index>(std::count(seq[x].begin(), seq[x].end(), int(s)));
        score_unit(counts, length + 1);
      }
      break;
    case DisentanglementKind::SPosDis:
      for (const auto& attr : attributes) {
        const double h = variable_entropy(attr.labels(), attr.label_count(), w);
        if (h <= 0.0) continue;
        std::vector<double> gains;
        for (std::size_t j = 0; j < length; ++j)
          gains.push_back(mi(position(j), vocab + 1, attr.labels(), attr.label_count(), w));
        total += top_gap(gains) / h;
        ++report.units;
      }
      break;
  }
  report.value = report.units == 0 ? 0.0 : total / static_cast<double>(report.units);
  return report;
}

std::vector<std::vector<int>> consecutive_symbol_groups(unsigned vocab, unsigned group_size) {
  if (group_size == 0) throw PreconditionError("symbol group size must be positive");
  std::vector<std::vector<int>> groups;
  for (unsigned s = 0; s < vocab; ++s) {
    if (s % group_size == 0) groups.emplace_back();
    groups.back().push_back(static_cast<int>(s));
  }
  return groups;
}

double cluster_variance(const Protocol& protocol, const InputSpace& space, const MessageSpace& messages,
                        const std::vector<std::vector<int>>& groups) {
  check_compatible(protocol, space);
  if (!messages.has_symbols()) throw PreconditionError("cluster variance needs symbol-sequence messages");
  std::vector<std::optional<Index>> group_of(messages.vocab());
  for (Index g = 0; g < groups.size(); ++g)
    for (int s : groups[g]) {
      if (s < 0 || static_cast<unsigned>(s) >= messages.vocab())
        throw PreconditionError("symbol group holds symbol " + std::to_string(s) + " outside the vocabulary");
      if (group_of[s]) throw PreconditionError("symbol " + std::to_string(s) + " appears in two groups");
      group_of[s] = g;
    }
  for (unsigned s = 0; s < messages.vocab(); ++s)
    if (!group_of[s]) throw PreconditionError("symbol " + std::to_string(s) + " belongs to no group");

  std::vector<Index> merged(space.size());
  for (Index x = 0; x < space.size(); ++x) {
    const auto symbols = messages.symbols(protocol[x]);
    if (symbols.empty()) throw PreconditionError("cluster variance needs non-empty messages");
    const Index g = *group_of[symbols.front()];
    for (int s : symbols)
      if (*group_of[s] != g)
        throw PreconditionError("message " + messages.label(protocol[x]) + " mixes symbol groups");
    merged[x] = g;
  }
  return message_variance(Protocol(std::move(merged), std::max<std::size_t>(groups.size(), 1)), space);
}

AccuracyReceiver parse_accuracy_receiver(std::string_view text) {
  if (text == "synchronized") return AccuracyReceiver::Synchronized;
  if (text == "reconstruction-nearest") return AccuracyReceiver::ReconstructionNearest;
  throw PreconditionError("unknown accuracy receiver '" + std::string(text) + "'");
}

namespace {

/// Positions the receiver would pick, all equally likely.
class Picker {
 public:
  Picker(const Protocol& protocol, const InputSpace& space, AccuracyReceiver kind)
      : protocol_(protocol), space_(space), kind_(kind) {
    if (kind == AccuracyReceiver::ReconstructionNearest) {
      const auto p = message_probabilities(protocol, space);
      means_.resize(protocol.message_count());
      for (Index m = 0; m < p.size(); ++m)
        if (p[m] > 0.0) means_[m] = conditional_stats(protocol, space, m).mean;
    }
  }

  void choices(Index message, std::span<const Index> cands, std::vector<std::size_t>& out) const {
    out.clear();
    if (kind_ == AccuracyReceiver::Synchronized) {
      for (std::size_t j = 0; j < cands.size(); ++j)
        if (protocol_[cands[j]] == message) out.push_back(j);
      if (out.empty())
        for (std::size_t j = 0; j < cands.size(); ++j) out.push_back(j);
      return;
    }
    double best = HUGE_VAL;
    std::vector<double> dist(cands.size());
    for (std::size_t j = 0; j < cands.size(); ++j) {
      dist[j] = squared_distance(space_.point(cands[j]), means_[message]);
      best = std::min(best, dist[j]);
    }
    for (std::size_t j = 0; j < cands.size(); ++j)
      if (dist[j] <= best + 1e-12) out.push_back(j);
  }

 private:
  const Protocol& protocol_;
  const InputSpace& space_;
  AccuracyReceiver kind_;
  std::vector<Point> means_;
};

}  // namespace

AccuracyReport discrimination_accuracy(const Protocol& protocol, const InputSpace& space, AccuracyReceiver receiver,
                                       unsigned d, std::uint64_t seed, std::size_t trials) {
  check_compatible(protocol, space);
  if (d < 2) throw PreconditionError("candidate count d must be >= 2");
  if (trials == 0) throw PreconditionError("accuracy needs trials >= 1");
  const Picker picker(protocol, space, receiver);
  std::discrete_distribution<std::size_t> draw(space.weights().begin(), space.weights().end());
  std::uniform_int_distribution<unsigned> position(0, d - 1);
  std::vector<Index> cands(d);
  std::vector<std::size_t> picks;
  AccuracyReport report;
  double se2 = 0.0;
  for (Index x = 0; x < space.size(); ++x) {
    Rng rng = substream(seed, "accuracy", x);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const unsigned target = position(rng);
      for (unsigned j = 0; j < d; ++j) cands[j] = j == target ? x : draw(rng);
      picker.choices(protocol[x], cands, picks);
      std::uniform_int_distribution<std::size_t> tie(0, picks.size() - 1);
      hits += picks[tie(rng)] == target;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(trials);
    report.accuracy += space.weight(x) * rate;
    se2 += space.weight(x) * space.weight(x) * rate * (1.0 - rate) / static_cast<double>(trials);
    report.episodes += trials;
  }
  report.standard_error = std::sqrt(se2);
  return report;
}

AccuracyReport discrimination_accuracy_exact(const Protocol& protocol, const InputSpace& space,
                                             AccuracyReceiver receiver, unsigned d, double budget) {
  check_compatible(protocol, space);
  if (d < 2) throw PreconditionError("candidate count d must be >= 2");
  const std::size_t n = space.size();
  const double cost = static_cast<double>(n) * d * std::pow(static_cast<double>(n), d - 1.0);
  if (cost > budget) throw BudgetError("exact accuracy enumeration exceeds the budget", cost, budget);
  const Picker picker(protocol, space, receiver);
  std::vector<Index> cands(d);
  std::vector<Index> counter(d - 1);
  std::vector<std::size_t> picks;
  AccuracyReport report;
  report.exact = true;
  for (Index x = 0; x < n; ++x) {
    double credit = 0.0;
    for (unsigned t = 0; t < d; ++t) {
      std::fill(counter.begin(), counter.end(), 0);
      while (true) {
        double prob = 1.0 / d;
        for (unsigned j = 0, k = 0; j < d; ++j) {
          if (j == t) {
            cands[j] = x;
          } else {
            cands[j] = counter[k++];
            prob *= space.weight(cands[j]);
          }
        }
        picker.choices(protocol[x], cands, picks);
        if (std::find(picks.begin(), picks.end(), t) != picks.end())
          credit += prob / static_cast<double>(picks.size());
        ++report.episodes;
        std::size_t pos = 0;
        while (pos < counter.size() && ++counter[pos] == n) counter[pos++] = 0;
        if (pos == counter.size()) break;
      }
    }
    report.accuracy += space.weight(x) * credit;
  }
  return report;
}

}  // namespace semcomm
