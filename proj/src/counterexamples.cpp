// SPDX-License-Identifier: Apache-2.0
#include "semcomm/counterexamples.hpp"

#include <cmath>
#include <numbers>

#include "semcomm/objectives.hpp"
#include "semcomm/optimize.hpp"

namespace semcomm {

namespace {

constexpr std::size_t kSets = 6;
constexpr std::size_t kInputs = 12;

Index set_of(Index input) { return input % kSets; }

std::vector<double> spatial_table() {
  std::vector<double> table;
  table.reserve(kSets * kInputs * kInputs * 2);
  for (Index m = 0; m < kSets; ++m)
    for (Index a = 0; a < kInputs; ++a)
      for (Index b = 0; b < kInputs; ++b) {
        const bool in_a = set_of(a) == m;
        const bool in_b = set_of(b) == m;
        if (set_of(a) == set_of(b) || in_a == in_b) {
          table.insert(table.end(), {0.5, 0.5});
        } else if (in_a) {
          table.insert(table.end(), {1.0, 0.0});
        } else {
          table.insert(table.end(), {0.0, 1.0});
        }
      }
  return table;
}

VerificationStep make_step(std::string id, std::string claim) {
  VerificationStep s;
  s.id = std::move(id);
  s.claim = std::move(claim);
  return s;
}

}  // namespace

bool VerificationReport::passed() const {
  for (const auto& s : steps)
    if (!s.passed) return false;
  return true;
}

const VerificationStep& VerificationReport::step(const std::string& id) const {
  for (const auto& s : steps)
    if (s.id == id) return s;
  throw PreconditionError("no verification step '" + id + "'");
}

InputSpace four_point_line() { return InputSpace::uniform({{0.0}, {1.0}, {2.0}, {3.0}}); }

SpatialCounterexample build_spatial_counterexample() {
  std::vector<Point> points;
  for (int k = 1; k <= 6; ++k) points.push_back({double(k)});
  for (int k = 1; k <= 6; ++k) points.push_back({-double(k)});
  std::vector<Point> message_vectors;
  for (int k = 1; k <= 6; ++k) message_vectors.push_back({double(k)});
  std::vector<Index> sender(kInputs);
  for (Index i = 0; i < kInputs; ++i) sender[i] = set_of(i);
  std::vector<double> table = spatial_table();
  DiscriminationReceiver receiver = DiscriminationReceiver::from_table(kSets, kInputs, 2, table);
  return SpatialCounterexample{InputSpace::uniform(std::move(points)), MessageSpace::euclidean(std::move(message_vectors)),
                               std::move(table), std::move(receiver), Protocol(std::move(sender), kSets), 1.0};
}

VerificationReport verify_spatial_counterexample() {
  const SpatialCounterexample inst = build_spatial_counterexample();
  const double log2 = std::numbers::ln2;
  GameSpec spec;
  spec.kind = GameKind::Discrimination;
  spec.candidates = 2;
  EvalOptions exact;
  exact.mode = EvalMode::Exact;
  VerificationReport report;
  report.which = "spatial";

  {
    auto s = make_step("a", "receiver is simple at epsilon0 = 1");
    const auto table = receiver_table(inst.receiver, inst.space.size());
    const auto simple = receiver_simplicity(table, inst.messages, inst.space, inst.epsilon0);
    s.passed = simple.simple;
    s.values = {{"variance", input_variance(inst.space)},
                {"k", simple.k},
                {"worst_ratio", simple.worst_ratio},
                {"claimed_output_spread", 1.0 / std::numbers::sqrt2}};
    if (!simple.simple) {
      const auto describe = [&](Index row) {
        const auto& c = table.candidates[row];
        return "(m=" + inst.messages.label(table.messages[row]) + ", " + std::to_string(inst.space.point(c[0])[0]) +
               ", " + std::to_string(inst.space.point(c[1])[0]) + ")";
      };
      s.detail = "rows " + describe(simple.witness_a) + " and " + describe(simple.witness_b) + " reach ratio " +
                 std::to_string(simple.worst_ratio) + " > k";
    }
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("b", "synchronized sender maps +-k to message k");
    const auto sender = synchronized_sender(inst.receiver, inst.space, spec, TieBreak::Lowest, exact);
    const auto highest = synchronized_sender(inst.receiver, inst.space, spec, TieBreak::Highest, exact);
    s.passed = sender.protocol == inst.sender && highest.protocol == inst.sender;
    if (!s.passed) s.detail = "synchronized sender differs from the set-index sender";
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("c", "expected loss of the set-index sender is log(2)/6");
    const auto loss = eval_discrimination(inst.sender, inst.receiver, inst.space, 2, exact);
    s.values = {{"loss", loss.expected.nats}, {"expected", log2 / 6.0}};
    s.passed = !loss.expected.infinite && std::abs(loss.expected.nats - log2 / 6.0) < 1e-12;
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("d", "best constant loss is log 2 and the receiver is non-degenerate");
    const auto constant = optimal_constant_receiver(inst.space, spec, kSets);
    const auto constant_loss = eval_discrimination(inst.sender, std::get<DiscriminationReceiver>(constant.receiver),
                                                   inst.space, 2, exact);
    const auto nd = non_degeneracy(inst.receiver, inst.space, spec, exact);
    s.values = {{"constant_loss", constant_loss.expected.nats},
                {"sup_loss", nd.sup_loss.nats},
                {"quarter_constant", 0.25 * nd.constant_loss}};
    s.passed = std::abs(constant_loss.expected.nats - log2) < 1e-12 && nd.non_degenerate &&
               std::abs(nd.sup_loss.nats - log2 / 6.0) < 1e-12;
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("e", "set-index sender has uniform message masses, hence minimal objective");
    const auto p = message_probabilities(inst.sender, inst.space);
    double spread = 0.0;
    for (double pm : p) spread = std::max(spread, std::abs(pm - 1.0 / kSets));
    const auto obj = disc_objective(inst.sender, inst.space, 2);
    const double uniform_value = kSets * binomial_log_moment(1.0 / kSets, 2);
    const bool convex = convexity_check(2).convex;
    s.values = {{"objective", obj.value}, {"uniform_objective", uniform_value}, {"max_mass_deviation", spread}};
    s.passed = spread < 1e-12 && std::abs(obj.value - uniform_value) < 1e-12 && convex;
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("f", "set-index sender is not semantically consistent");
    const auto sc = semantic_consistency(inst.sender, inst.space);
    double max_mean = 0.0;
    for (Index m = 0; m < kSets; ++m)
      max_mean = std::max(max_mean, std::abs(conditional_stats(inst.sender, inst.space, m).mean[0]));
    s.values = {{"explained", sc.explained}, {"unexplained", sc.unexplained}, {"max_abs_conditional_mean", max_mean}};
    s.passed = !sc.consistent && std::abs(sc.explained) < 1e-12 && max_mean < 1e-12;
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("g", "set-index sender is not spatially meaningful for any epsilon0");
    bool all_fail = true;
    for (double eps0 : {0.9, 1.0, 2.0, 3.0, 4.0, 5.0}) {
      const auto sm = spatial_meaningfulness(inst.sender, inst.space, inst.messages, eps0);
      all_fail = all_fail && !sm.meaningful;
    }
    const auto below = spatial_meaningfulness(inst.sender, inst.space, inst.messages, 0.9);
    const auto& same = below.thresholds.front();
    s.values = {{"conditional_below_1", same.conditional},
                {"unconditional", same.unconditional},
                {"gap_below_1", same.unconditional - same.conditional}};
    s.passed = all_fail && same.boundary;
    report.steps.push_back(std::move(s));
  }
  return report;
}

Protocol build_anticonsistent_optimal(const InputSpace& space, std::size_t k) {
  return balanced_partition(space, k, PartitionFlavor::AdversarialAntipodal);
}

VerificationReport verify_anticonsistent_optimal(const InputSpace& space, std::size_t k) {
  VerificationReport report;
  report.which = "anticonsistent";
  const Protocol adversarial = build_anticonsistent_optimal(space, k);
  GameSpec disc;
  disc.kind = GameKind::Discrimination;
  disc.candidates = 2;
  GameSpec reco;
  reco.kind = GameKind::Reconstruction;

  {
    auto s = make_step("optimal", "antipodal protocol attains the d = 2 discrimination optimum");
    const auto search = exhaustive_search(space, k, disc);
    const auto obj = disc_objective(adversarial, space, 2);
    s.values = {{"simplified", *obj.simplified},
                {"objective", obj.value},
                {"optimum", search.value},
                {"optimal_protocols", double(search.optimal.size())}};
    s.passed = obj.value <= search.value + 1e-12;
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("inconsistent", "antipodal protocol is not semantically consistent");
    const auto sc = semantic_consistency(adversarial, space);
    s.values = {{"explained", sc.explained}, {"unexplained", sc.unexplained}, {"variance", sc.total}};
    s.passed = !sc.consistent;
    report.steps.push_back(std::move(s));
  }
  {
    auto s = make_step("reconstruction", "every reconstruction optimum is semantically consistent");
    const auto search = exhaustive_search(space, k, reco);
    bool all = true;
    for (const auto& p : search.optimal) all = all && semantic_consistency(p, space).consistent;
    s.values = {{"optimum", search.value}, {"optimal_protocols", double(search.optimal.size())}};
    // One message leaves no room for a consistent protocol.
    s.passed = all || k == 1;
    if (k == 1) s.detail = "K = 1: the constant protocol is the only candidate";
    report.steps.push_back(std::move(s));
  }
  return report;
}

}  // namespace semcomm
