// SPDX-License-Identifier: Apache-2.0
#include "semcomm/games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semcomm/info.hpp"
#include "semcomm/random.hpp"

namespace semcomm {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kRowTolerance = 1e-9;

void check_distribution(std::span<const double> row, const char* what) {
  double sum = 0.0;
  for (double p : row) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw PreconditionError(std::string(what) + ": negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRowTolerance)
    throw PreconditionError(std::string(what) + ": probabilities sum to " + std::to_string(sum));
}

double ipow(double base, unsigned exponent) {
  double out = 1.0;
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

using Support = std::vector<std::pair<Index, double>>;

/// Candidate law of one episode family for a fixed target.
///
/// With `target_included`, the target sits at a uniform position among d and
/// every other slot draws from `slots[0]`. Otherwise slot j draws from
/// `slots[j]` and the answer is `answer`.
struct EpisodeLaw {
  bool target_included = true;
  unsigned candidates = 2;
  std::vector<Support> slots;
  Index answer = 0;

  double exact_cost() const {
    double cost = target_included ? candidates : 1.0;
    if (target_included)
      cost *= ipow(static_cast<double>(slots.front().size()), candidates - 1);
    else
      for (const auto& s : slots) cost *= static_cast<double>(s.size());
    return cost;
  }
};

Support full_support(const InputSpace& space) {
  Support s;
  for (Index i = 0; i < space.size(); ++i) s.emplace_back(i, space.weight(i));
  return s;
}

Support label_support(const InputSpace& space, const LabelMap& labels, Index label, bool equal) {
  Support s;
  double mass = 0.0;
  for (Index i = 0; i < space.size(); ++i)
    if ((labels[i] == label) == equal) {
      s.emplace_back(i, space.weight(i));
      mass += space.weight(i);
    }
  if (mass <= 0.0)
    throw PreconditionError("label " + labels.name(label) + (equal ? " has zero mass" : " has zero complementary mass"));
  for (auto& e : s) e.second /= mass;
  return s;
}

/// Builds the candidate law for each target of a candidate game.
struct GameLaws {
  std::vector<EpisodeLaw> per_target;

  double exact_cost() const {
    double c = 0.0;
    for (const auto& l : per_target) c += l.exact_cost();
    return c;
  }
};

GameLaws discrimination_laws(const InputSpace& space, unsigned d) {
  if (d < 2) throw PreconditionError("candidate count d must be >= 2");
  GameLaws laws;
  const Support all = full_support(space);
  for (Index x = 0; x < space.size(); ++x) laws.per_target.push_back({true, d, {all}, 0});
  return laws;
}

void check_balanced(const InputSpace& space, const LabelMap& labels) {
  if (labels.size() != space.size()) throw PreconditionError("label map does not cover the input space");
  std::vector<double> mass(labels.label_count(), 0.0);
  for (Index i = 0; i < space.size(); ++i) mass[labels[i]] += space.weight(i);
  const double target = 1.0 / static_cast<double>(labels.label_count());
  for (Index y = 0; y < mass.size(); ++y)
    if (std::abs(mass[y] - target) > 1e-9)
      throw PreconditionError("supervised game needs balanced labels; label " + labels.name(y) + " has mass " +
                              std::to_string(mass[y]));
}

GameLaws supervised_laws(const InputSpace& space, const LabelMap& labels, unsigned d) {
  if (labels.label_count() < 2) throw PreconditionError("supervised game needs >=2 labels");
  if (d < 2) throw PreconditionError("candidate count d must be >= 2");
  if (d > labels.label_count()) throw PreconditionError("supervised game needs d <= |Y|");
  check_balanced(space, labels);
  std::vector<Support> complement;
  for (Index y = 0; y < labels.label_count(); ++y) complement.push_back(label_support(space, labels, y, false));
  GameLaws laws;
  for (Index x = 0; x < space.size(); ++x) laws.per_target.push_back({true, d, {complement[labels[x]]}, 0});
  return laws;
}

GameLaws classification_laws(const InputSpace& space, const LabelMap& labels) {
  if (labels.size() != space.size()) throw PreconditionError("label map does not cover the input space");
  std::vector<Support> per_label;
  for (Index y = 0; y < labels.label_count(); ++y) per_label.push_back(label_support(space, labels, y, true));
  const auto n = static_cast<unsigned>(labels.label_count());
  GameLaws laws;
  for (Index x = 0; x < space.size(); ++x) laws.per_target.push_back({false, n, per_label, labels[x]});
  return laws;
}

/// Loss statistics of one target under one message.
struct TargetLoss {
  Loss loss;
  double sample_variance = 0.0;
  std::size_t samples = 0;
};

TargetLoss exact_target_loss(const DiscriminationReceiver& receiver, Index message, Index target,
                             const EpisodeLaw& law) {
  const unsigned d = law.candidates;
  std::vector<Index> cands(d);
  std::vector<double> out(d);
  double total = 0.0;
  bool infinite = false;

  if (law.target_included) {
    const Support& s = law.slots.front();
    std::vector<std::size_t> counter(d - 1, 0);
    for (unsigned t = 0; t < d && !infinite; ++t) {
      std::fill(counter.begin(), counter.end(), 0);
      while (true) {
        double prob = 1.0 / d;
        for (unsigned j = 0, k = 0; j < d; ++j) {
          if (j == t) {
            cands[j] = target;
          } else {
            cands[j] = s[counter[k]].first;
            prob *= s[counter[k]].second;
            ++k;
          }
        }
        receiver.evaluate(message, cands, out);
        if (prob > 0.0) {
          if (out[t] <= 0.0) {
            infinite = true;
            break;
          }
          total -= prob * std::log(out[t]);
        }
        std::size_t pos = 0;
        while (pos < counter.size() && ++counter[pos] == s.size()) counter[pos++] = 0;
        if (pos == counter.size()) break;
      }
    }
  } else {
    std::vector<std::size_t> counter(d, 0);
    while (true) {
      double prob = 1.0;
      for (unsigned j = 0; j < d; ++j) {
        cands[j] = law.slots[j][counter[j]].first;
        prob *= law.slots[j][counter[j]].second;
      }
      receiver.evaluate(message, cands, out);
      if (prob > 0.0) {
        if (out[law.answer] <= 0.0) {
          infinite = true;
          break;
        }
        total -= prob * std::log(out[law.answer]);
      }
      std::size_t pos = 0;
      while (pos < counter.size() && ++counter[pos] == law.slots[pos].size()) counter[pos++] = 0;
      if (pos == counter.size()) break;
    }
  }
  TargetLoss r;
  r.loss = infinite ? Loss::inf() : Loss{total, false};
  return r;
}

TargetLoss sampled_target_loss(const DiscriminationReceiver& receiver, Index message, Index target,
                               const EpisodeLaw& law, std::size_t n, std::uint64_t seed) {
  Rng rng = substream(seed, "monte-carlo", target);
  const unsigned d = law.candidates;
  std::vector<std::discrete_distribution<std::size_t>> draws;
  for (const auto& s : law.slots) {
    std::vector<double> w;
    for (const auto& e : s) w.push_back(e.second);
    draws.emplace_back(w.begin(), w.end());
  }
  std::uniform_int_distribution<unsigned> position(0, d - 1);
  std::vector<Index> cands(d);
  std::vector<double> out(d);
  double mean = 0.0, m2 = 0.0;
  TargetLoss r;
  r.samples = n;
  for (std::size_t i = 0; i < n; ++i) {
    Index answer = law.answer;
    if (law.target_included) {
      answer = position(rng);
      for (unsigned j = 0; j < d; ++j)
        cands[j] = j == answer ? target : law.slots.front()[draws.front()(rng)].first;
    } else {
      for (unsigned j = 0; j < d; ++j) cands[j] = law.slots[j][draws[j](rng)].first;
    }
    receiver.evaluate(message, cands, out);
    if (out[answer] <= 0.0) {
      r.loss = Loss::inf();
      return r;
    }
    const double v = -std::log(out[answer]);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  r.loss = Loss{mean, false};
  r.sample_variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return r;
}

bool use_exact(double cost, const EvalOptions& options) {
  if (options.mode == EvalMode::Exact) {
    if (cost > options.exact_budget)
      throw BudgetError("exact enumeration exceeds the budget", cost, options.exact_budget);
    return true;
  }
  if (options.mode == EvalMode::MonteCarlo) return false;
  return cost <= options.exact_budget;
}

std::size_t stratum_size(const InputSpace& space, Index x, std::size_t samples) {
  const double n = std::round(static_cast<double>(samples) * space.weight(x));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

Loss weighted_mean(const std::vector<Loss>& per_input, const InputSpace& space) {
  double total = 0.0;
  for (Index x = 0; x < per_input.size(); ++x) {
    if (per_input[x].infinite) return Loss::inf();
    total += space.weight(x) * per_input[x].nats;
  }
  return Loss{total, false};
}

LossReport eval_candidate_game(const Protocol& protocol, const DiscriminationReceiver& receiver,
                               const InputSpace& space, const GameLaws& laws, unsigned candidates,
                               const EvalOptions& options) {
  check_compatible(protocol, space);
  if (receiver.candidates() != candidates)
    throw PreconditionError("receiver expects " + std::to_string(receiver.candidates()) + " candidates, game has " +
                            std::to_string(candidates));
  if (receiver.message_count() < protocol.message_count())
    throw PreconditionError("receiver covers fewer messages than the protocol");

  LossReport report;
  report.seed = options.seed;
  const bool exact = use_exact(laws.exact_cost(), options);
  report.mode = exact ? EvalMode::Exact : EvalMode::MonteCarlo;
  double se2 = 0.0;
  for (Index x = 0; x < space.size(); ++x) {
    TargetLoss t;
    if (exact) {
      t = exact_target_loss(receiver, protocol[x], x, laws.per_target[x]);
    } else {
      const std::size_t n = stratum_size(space, x, options.samples);
      t = sampled_target_loss(receiver, protocol[x], x, laws.per_target[x], n, options.seed);
      report.samples += n;
      se2 += space.weight(x) * space.weight(x) * t.sample_variance / static_cast<double>(n);
    }
    report.per_input.push_back(t.loss);
  }
  report.expected = weighted_mean(report.per_input, space);
  report.standard_error = exact || report.expected.infinite ? 0.0 : std::sqrt(se2);
  return report;
}

/// Per-message losses of one target for a candidate game, with common random
/// numbers across messages in sampled mode.
std::vector<Loss> candidate_message_losses(const DiscriminationReceiver& receiver, Index target,
                                           const EpisodeLaw& law, bool exact, std::size_t n, std::uint64_t seed) {
  std::vector<Loss> out;
  for (Index m = 0; m < receiver.message_count(); ++m)
    out.push_back(exact ? exact_target_loss(receiver, m, target, law).loss
                        : sampled_target_loss(receiver, m, target, law, n, seed).loss);
  return out;
}

}  // namespace

bool operator<(const Loss& a, const Loss& b) {
  if (a.infinite) return false;
  if (b.infinite) return true;
  return a.nats < b.nats;
}

// Receivers -------------------------------------------------------------------

ReconstructionReceiver::ReconstructionReceiver(std::vector<std::optional<Point>> outputs)
    : outputs_(std::move(outputs)) {
  std::optional<std::size_t> dim;
  for (const auto& o : outputs_) {
    if (!o) continue;
    if (dim && *dim != o->size()) throw PreconditionError("reconstruction receiver outputs differ in dimension");
    dim = o->size();
  }
}

const Point& ReconstructionReceiver::at(Index message) const {
  const auto& o = outputs_.at(message);
  if (!o) throw PreconditionError("receiver undefined on message " + std::to_string(message));
  return *o;
}

DiscriminationReceiver::DiscriminationReceiver(std::size_t message_count, unsigned candidates, Function fn)
    : message_count_(message_count), candidates_(candidates), fn_(std::move(fn)) {
  if (candidates_ < 1) throw PreconditionError("discrimination receiver needs at least one candidate");
  if (!fn_) throw PreconditionError("discrimination receiver needs a function");
}

DiscriminationReceiver DiscriminationReceiver::constant(std::size_t message_count, std::vector<double> distribution) {
  check_distribution(distribution, "constant receiver");
  const auto d = static_cast<unsigned>(distribution.size());
  return DiscriminationReceiver(message_count, d,
                                [dist = std::move(distribution)](Index, std::span<const Index>, std::span<double> out) {
                                  std::copy(dist.begin(), dist.end(), out.begin());
                                });
}

DiscriminationReceiver DiscriminationReceiver::from_table(std::size_t message_count, std::size_t input_count,
                                                          unsigned candidates, std::vector<double> table) {
  const double rows = discrimination_table_rows(message_count, input_count, candidates);
  if (static_cast<double>(table.size()) != rows * candidates)
    throw PreconditionError("receiver table has " + std::to_string(table.size()) + " entries, expected " +
                            std::to_string(rows * candidates));
  for (std::size_t r = 0; r < table.size(); r += candidates)
    check_distribution(std::span<const double>(table).subspan(r, candidates), "receiver table row");
  return DiscriminationReceiver(
      message_count, candidates,
      [table = std::move(table), input_count, candidates](Index m, std::span<const Index> c, std::span<double> out) {
        std::size_t row = m;
        for (Index x : c) row = row * input_count + x;
        std::copy_n(table.begin() + static_cast<std::ptrdiff_t>(row * candidates), candidates, out.begin());
      });
}

void DiscriminationReceiver::evaluate(Index message, std::span<const Index> candidates, std::span<double> out) const {
  if (message >= message_count_) throw PreconditionError("message " + std::to_string(message) + " outside the receiver");
  if (candidates.size() != candidates_ || out.size() != candidates_)
    throw PreconditionError("receiver queried with the wrong candidate count");
  fn_(message, candidates, out);
  check_distribution(out, "receiver output");
}

std::vector<double> DiscriminationReceiver::operator()(Index message, std::span<const Index> candidates) const {
  std::vector<double> out(candidates_);
  evaluate(message, candidates, out);
  return out;
}

GlobalReceiver::GlobalReceiver(std::vector<std::optional<std::vector<double>>> rows) : rows_(std::move(rows)) {
  for (const auto& r : rows_)
    if (r) check_distribution(*r, "global receiver row");
}

const std::vector<double>& GlobalReceiver::at(Index message) const {
  const auto& r = rows_.at(message);
  if (!r) throw PreconditionError("receiver undefined on message " + std::to_string(message));
  return *r;
}

double discrimination_table_rows(std::size_t message_count, std::size_t input_count, unsigned candidates) {
  return static_cast<double>(message_count) * ipow(static_cast<double>(input_count), candidates);
}

std::vector<double> tabulate(const DiscriminationReceiver& receiver, std::size_t input_count, double max_rows) {
  const unsigned d = receiver.candidates();
  const double rows = discrimination_table_rows(receiver.message_count(), input_count, d);
  if (rows > max_rows) throw BudgetError("dense receiver table too large", rows, max_rows);
  std::vector<double> table;
  table.reserve(static_cast<std::size_t>(rows) * d);
  std::vector<Index> cands(d, 0);
  std::vector<double> out(d);
  for (Index m = 0; m < receiver.message_count(); ++m) {
    std::fill(cands.begin(), cands.end(), 0);
    while (true) {
      receiver.evaluate(m, cands, out);
      table.insert(table.end(), out.begin(), out.end());
      std::size_t pos = d;
      while (pos > 0 && ++cands[pos - 1] == input_count) cands[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return table;
}

// Evaluators --------------------------------------------------------------------

LossReport eval_reconstruction(const Protocol& protocol, const ReconstructionReceiver& receiver,
                               const InputSpace& space) {
  check_compatible(protocol, space);
  LossReport report;
  for (Index x = 0; x < space.size(); ++x) {
    const Index m = protocol[x];
    if (m >= receiver.message_count()) throw PreconditionError("receiver covers fewer messages than the protocol");
    const Point& out = receiver.at(m);
    if (out.size() != space.dimension()) throw PreconditionError("receiver output dimension differs from the inputs");
    report.per_input.push_back(Loss{squared_distance(out, space.point(x)), false});
  }
  report.expected = weighted_mean(report.per_input, space);
  return report;
}

LossReport eval_discrimination(const Protocol& protocol, const DiscriminationReceiver& receiver,
                               const InputSpace& space, unsigned candidates, const EvalOptions& options) {
  return eval_candidate_game(protocol, receiver, space, discrimination_laws(space, candidates), candidates, options);
}

LossReport eval_global(const Protocol& protocol, const GlobalReceiver& receiver, const InputSpace& space) {
  check_compatible(protocol, space);
  LossReport report;
  for (Index x = 0; x < space.size(); ++x) {
    const Index m = protocol[x];
    if (m >= receiver.message_count()) throw PreconditionError("receiver covers fewer messages than the protocol");
    const auto& row = receiver.at(m);
    if (row.size() != space.size()) throw PreconditionError("global receiver row length differs from the input count");
    report.per_input.push_back(row[x] > 0.0 ? Loss{-std::log(row[x]), false} : Loss::inf());
  }
  report.expected = weighted_mean(report.per_input, space);
  return report;
}

LossReport eval_supervised(const Protocol& protocol, const DiscriminationReceiver& receiver, const InputSpace& space,
                           const LabelMap& labels, unsigned candidates, const EvalOptions& options) {
  return eval_candidate_game(protocol, receiver, space, supervised_laws(space, labels, candidates), candidates,
                             options);
}

LossReport eval_classification(const Protocol& protocol, const DiscriminationReceiver& receiver,
                               const InputSpace& space, const LabelMap& labels, const EvalOptions& options) {
  return eval_candidate_game(protocol, receiver, space, classification_laws(space, labels),
                             static_cast<unsigned>(labels.label_count()), options);
}

LossReport evaluate_game(const Protocol& protocol, const Receiver& receiver, const InputSpace& space,
                         const GameSpec& spec, const EvalOptions& options) {
  spec.validate(space.size());
  switch (spec.kind) {
    case GameKind::Reconstruction:
      if (auto* r = std::get_if<ReconstructionReceiver>(&receiver)) return eval_reconstruction(protocol, *r, space);
      break;
    case GameKind::Global:
      if (auto* r = std::get_if<GlobalReceiver>(&receiver)) return eval_global(protocol, *r, space);
      break;
    case GameKind::Discrimination:
      if (auto* r = std::get_if<DiscriminationReceiver>(&receiver))
        return eval_discrimination(protocol, *r, space, spec.candidates, options);
      break;
    case GameKind::Supervised:
      if (auto* r = std::get_if<DiscriminationReceiver>(&receiver))
        return eval_supervised(protocol, *r, space, *spec.labels, spec.candidates, options);
      break;
    case GameKind::Classification:
      if (auto* r = std::get_if<DiscriminationReceiver>(&receiver))
        return eval_classification(protocol, *r, space, *spec.labels, options);
      break;
  }
  throw PreconditionError("receiver type does not match the " + std::string(to_string(spec.kind)) + " game");
}

// Synchronized agents ---------------------------------------------------------------

ReconstructionReceiver synchronized_reconstruction_receiver(const Protocol& protocol, const InputSpace& space) {
  check_compatible(protocol, space);
  const auto p = message_probabilities(protocol, space);
  std::vector<std::optional<Point>> outputs(protocol.message_count());
  for (Index m = 0; m < outputs.size(); ++m)
    if (p[m] > 0.0) outputs[m] = conditional_stats(protocol, space, m).mean;
  return ReconstructionReceiver(std::move(outputs));
}

DiscriminationReceiver synchronized_discrimination_receiver(const Protocol& protocol, unsigned candidates) {
  std::vector<Index> assignment(protocol.assignment().begin(), protocol.assignment().end());
  return DiscriminationReceiver(
      protocol.message_count(), candidates,
      [assignment = std::move(assignment)](Index m, std::span<const Index> c, std::span<double> out) {
        std::size_t sharing = 0;
        for (Index x : c) sharing += assignment.at(x) == m;
        for (std::size_t j = 0; j < c.size(); ++j)
          out[j] = sharing == 0 ? 1.0 / static_cast<double>(c.size())
                                : (assignment[c[j]] == m ? 1.0 / static_cast<double>(sharing) : 0.0);
      });
}

GlobalReceiver synchronized_global_receiver(const Protocol& protocol, const InputSpace& space) {
  check_compatible(protocol, space);
  const auto p = message_probabilities(protocol, space);
  std::vector<std::optional<std::vector<double>>> rows(protocol.message_count());
  for (Index m = 0; m < rows.size(); ++m) {
    if (p[m] <= 0.0) continue;
    std::vector<double> row(space.size(), 0.0);
    for (Index x = 0; x < space.size(); ++x)
      if (protocol[x] == m) row[x] = space.weight(x) / p[m];
    rows[m] = std::move(row);
  }
  return GlobalReceiver(std::move(rows));
}

DiscriminationReceiver synchronized_supervised_receiver(const Protocol& protocol, const LabelMap& labels,
                                                        unsigned candidates) {
  if (labels.size() != protocol.input_count()) throw PreconditionError("label map does not cover the input space");
  std::vector<Index> assignment(protocol.assignment().begin(), protocol.assignment().end());
  std::vector<Index> lbl(labels.labels().begin(), labels.labels().end());
  return DiscriminationReceiver(
      protocol.message_count(), candidates,
      [assignment = std::move(assignment), lbl = std::move(lbl)](Index m, std::span<const Index> c,
                                                                 std::span<double> out) {
        std::size_t admissible = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
          bool ok = assignment.at(c[j]) == m;
          for (std::size_t k = 0; ok && k < c.size(); ++k) ok = k == j || lbl[c[k]] != lbl[c[j]];
          out[j] = ok ? 1.0 : 0.0;
          admissible += ok;
        }
        for (double& v : out)
          v = admissible == 0 ? 1.0 / static_cast<double>(c.size()) : v / static_cast<double>(admissible);
      });
}

DiscriminationReceiver synchronized_classification_receiver(const Protocol& protocol, const InputSpace& space,
                                                            const LabelMap& labels) {
  check_compatible(protocol, space);
  if (labels.size() != space.size()) throw PreconditionError("label map does not cover the input space");
  const std::size_t n = labels.label_count();
  const auto joint = joint_table(protocol.assignment(), protocol.message_count(), labels.labels(), n, space.weights());
  std::vector<std::vector<double>> posterior(protocol.message_count(), std::vector<double>(n, 1.0 / n));
  for (Index m = 0; m < posterior.size(); ++m) {
    double mass = 0.0;
    for (double v : joint.cells[m]) mass += v;
    if (mass > 0.0)
      for (Index y = 0; y < n; ++y) posterior[m][y] = joint.cells[m][y] / mass;
  }
  return DiscriminationReceiver(protocol.message_count(), static_cast<unsigned>(n),
                                [posterior = std::move(posterior)](Index m, std::span<const Index>,
                                                                   std::span<double> out) {
                                  std::copy(posterior.at(m).begin(), posterior.at(m).end(), out.begin());
                                });
}

Receiver synchronized_receiver(const Protocol& protocol, const InputSpace& space, const GameSpec& spec) {
  spec.validate(space.size());
  switch (spec.kind) {
    case GameKind::Reconstruction: return synchronized_reconstruction_receiver(protocol, space);
    case GameKind::Discrimination: return synchronized_discrimination_receiver(protocol, spec.candidates);
    case GameKind::Global: return synchronized_global_receiver(protocol, space);
    case GameKind::Supervised: return synchronized_supervised_receiver(protocol, *spec.labels, spec.candidates);
    case GameKind::Classification: return synchronized_classification_receiver(protocol, space, *spec.labels);
  }
  throw PreconditionError("unknown game kind");
}

SenderResult synchronized_sender(const Receiver& receiver, const InputSpace& space, const GameSpec& spec,
                                 TieBreak tie_break, const EvalOptions& options) {
  spec.validate(space.size());
  std::size_t message_count = 0;
  std::vector<std::vector<Loss>> table(space.size());

  if (auto* r = std::get_if<ReconstructionReceiver>(&receiver)) {
    if (spec.kind != GameKind::Reconstruction) throw PreconditionError("receiver type does not match the game");
    message_count = r->message_count();
    for (Index x = 0; x < space.size(); ++x)
      for (Index m = 0; m < message_count; ++m)
        table[x].push_back(r->defined(m) ? Loss{squared_distance(r->at(m), space.point(x)), false} : Loss::inf());
  } else if (auto* g = std::get_if<GlobalReceiver>(&receiver)) {
    if (spec.kind != GameKind::Global) throw PreconditionError("receiver type does not match the game");
    message_count = g->message_count();
    for (Index x = 0; x < space.size(); ++x)
      for (Index m = 0; m < message_count; ++m) {
        const double q = g->defined(m) ? g->at(m).at(x) : 0.0;
        table[x].push_back(q > 0.0 ? Loss{-std::log(q), false} : Loss::inf());
      }
  } else {
    const auto& d = std::get<DiscriminationReceiver>(receiver);
    GameLaws laws;
    switch (spec.kind) {
      case GameKind::Discrimination: laws = discrimination_laws(space, spec.candidates); break;
      case GameKind::Supervised: laws = supervised_laws(space, *spec.labels, spec.candidates); break;
      case GameKind::Classification: laws = classification_laws(space, *spec.labels); break;
      default: throw PreconditionError("receiver type does not match the game");
    }
    message_count = d.message_count();
    const bool exact = use_exact(laws.exact_cost() * static_cast<double>(message_count), options);
    for (Index x = 0; x < space.size(); ++x)
      table[x] = candidate_message_losses(d, x, laws.per_target[x], exact, stratum_size(space, x, options.samples),
                                          options.seed);
  }
  if (message_count == 0) throw PreconditionError("receiver has no messages");

  std::vector<Index> assignment(space.size());
  std::vector<Loss> achieved(space.size());
  for (Index x = 0; x < space.size(); ++x) {
    Loss best = table[x][0];
    for (const Loss& l : table[x])
      if (l < best) best = l;
    const auto is_tie = [&](const Loss& l) {
      if (best.infinite) return l.infinite;
      return !l.infinite && l.nats <= best.nats + kTieTolerance;
    };
    Index chosen = 0;
    for (Index m = 0; m < message_count; ++m) {
      if (!is_tie(table[x][m])) continue;
      chosen = m;
      if (tie_break == TieBreak::Lowest) break;
    }
    assignment[x] = chosen;
    achieved[x] = best;
  }
  return SenderResult{Protocol(std::move(assignment), message_count), std::move(achieved)};
}

CandidateUnawareReport candidate_unaware_equivalence(const Protocol& protocol, const InputSpace& space,
                                                     unsigned candidates) {
  check_compatible(protocol, space);
  const GameLaws laws = discrimination_laws(space, candidates);
  const double cost = laws.exact_cost();
  if (cost > 1e8) throw BudgetError("candidate-unaware comparison needs exact enumeration", cost, 1e8);

  const auto assignment = protocol.assignment();
  const DiscriminationReceiver scores(
      protocol.message_count(), candidates, [assignment](Index m, std::span<const Index> c, std::span<double> out) {
        double total = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) total += out[j] = assignment[c[j]] == m ? 1.0 : 0.0;
        for (double& v : out) v /= total;
      });
  const DiscriminationReceiver synced = synchronized_discrimination_receiver(protocol, candidates);

  CandidateUnawareReport report;
  const std::size_t n = space.size();
  std::vector<Index> cands(candidates, 0);
  for (Index x = 0; x < n; ++x) {
    const Index m = protocol[x];
    std::fill(cands.begin(), cands.end(), 0);
    while (true) {
      if (std::find(cands.begin(), cands.end(), x) != cands.end()) {
        const auto a = scores(m, cands);
        const auto b = synced(m, cands);
        for (unsigned j = 0; j < candidates; ++j)
          report.max_probability_gap = std::max(report.max_probability_gap, std::abs(a[j] - b[j]));
        ++report.queries;
      }
      std::size_t pos = candidates;
      while (pos > 0 && ++cands[pos - 1] == n) cands[--pos] = 0;
      if (pos == 0) break;
    }
  }
  EvalOptions exact;
  exact.mode = EvalMode::Exact;
  const Loss la = eval_discrimination(protocol, scores, space, candidates, exact).expected;
  const Loss lb = eval_discrimination(protocol, synced, space, candidates, exact).expected;
  report.loss_gap = la.infinite || lb.infinite ? (la.infinite == lb.infinite ? 0.0 : HUGE_VAL)
                                               : std::abs(la.nats - lb.nats);
  report.equivalent = report.max_probability_gap <= 1e-12 && report.loss_gap <= 1e-12;
  return report;
}

}  // namespace semcomm
