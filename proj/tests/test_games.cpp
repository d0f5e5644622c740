// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "semcomm/generators.hpp"
#include "semcomm/games.hpp"
#include "semcomm/objectives.hpp"

using namespace semcomm;

namespace {

const double kLog2 = std::numbers::ln2;

InputSpace line(std::initializer_list<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  return InputSpace::uniform(pts);
}

const InputSpace B = line({0, 1, 2, 3});
const Protocol kSplit({0, 0, 1, 1}, 2);
const Protocol kAnti({0, 1, 1, 0}, 2);
const LabelMap kAABB = LabelMap::from_strings({"A", "A", "B", "B"});

EvalOptions exact() {
  EvalOptions o;
  o.mode = EvalMode::Exact;
  return o;
}

std::vector<std::size_t> assignment_of(const Protocol& p) { return {p.assignment().begin(), p.assignment().end()}; }
oracle::Vec weights_of(const InputSpace& s) { return {s.weights().begin(), s.weights().end()}; }

}  // namespace

TEST_CASE("reconstruction loss examples") {
  CHECK(eval_reconstruction(Protocol::identity(4), ReconstructionReceiver({Point{0}, Point{1}, Point{2}, Point{3}}), B)
            .expected.nats == 0.0);
  const auto split = eval_reconstruction(kSplit, ReconstructionReceiver({Point{0.5}, Point{2.5}}), B);
  CHECK(std::abs(split.expected.nats - 0.25) < 1e-12);
  const auto constant = eval_reconstruction(Protocol::constant(4, 1), ReconstructionReceiver({Point{1.5}}), B);
  CHECK(std::abs(constant.expected.nats - 1.25) < 1e-12);
  CHECK_THROWS_AS(eval_reconstruction(kSplit, ReconstructionReceiver({Point{0.5}, std::nullopt}), B),
                  PreconditionError);
}

TEST_CASE("loss report averages per-input losses") {
  const InputSpace w({{0.0}, {1.0}, {2.0}, {3.0}}, {0.1, 0.2, 0.3, 0.4});
  const auto r = eval_discrimination(kSplit, synchronized_discrimination_receiver(kSplit, 2), w, 2, exact());
  double avg = 0.0;
  for (Index i = 0; i < 4; ++i) avg += w.weight(i) * r.per_input[i].nats;
  CHECK(std::abs(avg - r.expected.nats) < 1e-10);
}

TEST_CASE("discrimination loss examples") {
  const auto sync = eval_discrimination(kSplit, synchronized_discrimination_receiver(kSplit, 2), B, 2, exact());
  CHECK(std::abs(sync.expected.nats - 0.5 * kLog2) < 1e-12);
  CHECK(sync.mode == EvalMode::Exact);
  const auto constant = eval_discrimination(kSplit, DiscriminationReceiver::constant(2, {0.5, 0.5}), B, 2, exact());
  CHECK(std::abs(constant.expected.nats - kLog2) < 1e-12);
  const auto lossless = eval_discrimination(Protocol::identity(4), synchronized_discrimination_receiver(Protocol::identity(4), 2),
                                            B, 2, exact());
  for (const auto& l : lossless.per_input) CHECK(std::abs(l.nats - 0.25 * kLog2) < 1e-12);
}

TEST_CASE("zero likelihood is an infinite loss, not a number") {
  const auto r = eval_discrimination(kSplit, DiscriminationReceiver::constant(2, {1.0, 0.0}), B, 2, exact());
  CHECK(r.expected.infinite);
  CHECK(Loss{1e300, false} < Loss::inf());
}

TEST_CASE("exact enumeration respects its budget") {
  EvalOptions o = exact();
  o.exact_budget = 10;
  CHECK_THROWS_AS(eval_discrimination(kSplit, synchronized_discrimination_receiver(kSplit, 3), B, 3, o), BudgetError);
  o.mode = EvalMode::Auto;
  o.samples = 20000;
  const auto r = eval_discrimination(kSplit, synchronized_discrimination_receiver(kSplit, 3), B, 3, o);
  CHECK(r.mode == EvalMode::MonteCarlo);
  CHECK(r.standard_error > 0.0);
}

TEST_CASE("Monte-Carlo evaluation is reproducible per seed") {
  EvalOptions o;
  o.mode = EvalMode::MonteCarlo;
  o.samples = 5000;
  o.seed = 3;
  const auto recv = synchronized_discrimination_receiver(kSplit, 3);
  const auto a = eval_discrimination(kSplit, recv, B, 3, o);
  const auto b = eval_discrimination(kSplit, recv, B, 3, o);
  CHECK(a.expected.nats == b.expected.nats);
  o.seed = 4;
  CHECK(eval_discrimination(kSplit, recv, B, 3, o).expected.nats != a.expected.nats);
}

TEST_CASE("global loss examples") {
  std::vector<std::optional<std::vector<double>>> point_mass;
  for (Index i = 0; i < 4; ++i) {
    std::vector<double> row(4, 0.0);
    row[i] = 1.0;
    point_mass.push_back(row);
  }
  CHECK(eval_global(Protocol::identity(4), GlobalReceiver(point_mass), B).expected.nats == 0.0);
  const auto prior = eval_global(Protocol::constant(4, 1), GlobalReceiver({std::vector<double>(4, 0.25)}), B);
  CHECK(std::abs(prior.expected.nats - std::log(4.0)) < 1e-12);
  const auto split = eval_global(kSplit, synchronized_global_receiver(kSplit, B), B);
  CHECK(std::abs(split.expected.nats - kLog2) < 1e-12);
}

TEST_CASE("supervised loss examples") {
  const auto pure = eval_supervised(kSplit, synchronized_supervised_receiver(kSplit, kAABB, 2), B, kAABB, 2, exact());
  CHECK(std::abs(pure.expected.nats) < 1e-12);
  const auto anti = eval_supervised(kAnti, synchronized_supervised_receiver(kAnti, kAABB, 2), B, kAABB, 2, exact());
  CHECK(std::abs(anti.expected.nats - 0.5 * kLog2) < 1e-12);
  const auto single = LabelMap::from_strings({"A", "A", "A", "A"});
  CHECK_THROWS_WITH_AS(eval_supervised(kSplit, synchronized_discrimination_receiver(kSplit, 2), B, single, 2, exact()),
                       doctest::Contains(">=2 labels"), PreconditionError);
  const auto unbalanced = LabelMap::from_strings({"A", "A", "A", "B"});
  CHECK_THROWS_AS(eval_supervised(kSplit, synchronized_discrimination_receiver(kSplit, 2), B, unbalanced, 2, exact()),
                  PreconditionError);
}

TEST_CASE("classification loss examples") {
  auto loss = [](const Protocol& p) {
    return eval_classification(p, synchronized_classification_receiver(p, B, kAABB), B, kAABB, exact()).expected.nats;
  };
  CHECK(std::abs(loss(kSplit)) < 1e-12);
  CHECK(std::abs(loss(kAnti) - kLog2) < 1e-12);
  CHECK(std::abs(loss(Protocol::constant(4, 1)) - kLog2) < 1e-12);
}

TEST_CASE("synchronized receivers") {
  const auto reco = synchronized_reconstruction_receiver(kSplit, B);
  CHECK(reco.at(0)[0] == doctest::Approx(0.5));
  CHECK(reco.at(1)[0] == doctest::Approx(2.5));
  CHECK_FALSE(synchronized_reconstruction_receiver(Protocol::constant(4, 2), B).defined(1));

  const auto disc = synchronized_discrimination_receiver(kSplit, 2);
  const std::vector<Index> cross{0, 3};
  CHECK(disc(0, cross) == std::vector<double>{1.0, 0.0});
  const std::vector<Index> same{0, 1};
  CHECK(disc(0, same) == std::vector<double>{0.5, 0.5});

  const auto cls = synchronized_classification_receiver(kAnti, B, kAABB);
  const std::vector<Index> one_per_label{0, 2};
  const auto row = cls(0, one_per_label);
  CHECK(std::abs(row[0] - 0.5) < 1e-12);
  CHECK(std::abs(row[1] - 0.5) < 1e-12);
}

TEST_CASE("receiver rows must be distributions") {
  CHECK_THROWS_AS(eval_discrimination(kSplit, DiscriminationReceiver::constant(2, {0.7, 0.7}), B, 2, exact()),
                  PreconditionError);
}

TEST_CASE("synchronized senders") {
  GameSpec reco;
  const auto s = synchronized_sender(ReconstructionReceiver({Point{0.5}, Point{2.5}}), B, reco);
  CHECK(s.protocol == kSplit);

  GameSpec disc;
  disc.kind = GameKind::Discrimination;
  const auto c = synchronized_sender(DiscriminationReceiver::constant(3, {0.5, 0.5}), B, disc);
  CHECK(c.protocol == Protocol::constant(4, 3));
}

TEST_CASE("property: achieved sender loss does not depend on tie-breaking") {
  GameSpec disc;
  disc.kind = GameKind::Discrimination;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const auto inst = random_instance(21, i);
    const Receiver r = synchronized_discrimination_receiver(inst.protocol, 2);
    const auto lo = synchronized_sender(r, inst.space, disc, TieBreak::Lowest);
    const auto hi = synchronized_sender(r, inst.space, disc, TieBreak::Highest);
    for (Index x = 0; x < inst.space.size(); ++x) {
      REQUIRE(lo.achieved[x].infinite == hi.achieved[x].infinite);
      CHECK(std::abs(lo.achieved[x].nats - hi.achieved[x].nats) < 1e-12);
    }
  }
}

TEST_CASE("candidate-unaware receiver is equivalent") {
  for (const auto& p : {kSplit, Protocol::identity(4), kAnti}) {
    const auto r = candidate_unaware_equivalence(p, B, 2);
    CHECK(r.equivalent);
    CHECK(r.queries > 0);
    CHECK(r.loss_gap < 1e-12);
  }
}

TEST_CASE("property: exact losses agree with brute-force enumeration") {
  for (std::uint64_t i = 0; i < 60; ++i) {
    const auto inst = random_instance(31, i);
    const auto w = weights_of(inst.space);
    const auto s = assignment_of(inst.protocol);
    for (unsigned d : {2u, 3u}) {
      const auto r = eval_discrimination(inst.protocol, synchronized_discrimination_receiver(inst.protocol, d),
                                         inst.space, d, exact());
      CHECK(std::abs(r.expected.nats - oracle::discrimination_loss(w, s, d)) < 1e-10);
    }
  }
}

TEST_CASE("property: closed forms match synchronized losses") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto inst = random_instance(41, i);
    const auto& p = inst.protocol;
    const auto& sp = inst.space;
    CHECK(std::abs(eval_reconstruction(p, synchronized_reconstruction_receiver(p, sp), sp).expected.nats -
                   reco_objective(p, sp)) < 1e-10);
    const auto d2 = eval_discrimination(p, synchronized_discrimination_receiver(p, 2), sp, 2, exact());
    const auto probs = message_probabilities(p, sp);
    double sq = 0.0;
    for (double v : probs) sq += v * v;
    CHECK(std::abs(d2.expected.nats - kLog2 * sq) < 1e-10);
    // H(X | S) = H(X) - H(S) for a deterministic sender.
    const double h_x_given_s = oracle::shannon(weights_of(sp)) - oracle::shannon(probs);
    CHECK(std::abs(eval_global(p, synchronized_global_receiver(p, sp), sp).expected.nats - h_x_given_s) < 1e-10);
  }
}

TEST_CASE("property: d = 3 Monte-Carlo loss within four standard errors") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto inst = random_instance(51, i);
    EvalOptions o;
    o.mode = EvalMode::MonteCarlo;
    o.samples = 200000;
    o.seed = i;
    const auto r = eval_discrimination(inst.protocol, synchronized_discrimination_receiver(inst.protocol, 3),
                                       inst.space, 3, o);
    const double closed = disc_objective(inst.protocol, inst.space, 3).value;
    if (r.standard_error == 0.0)
      CHECK(std::abs(r.expected.nats - closed) < 1e-10);
    else
      CHECK(std::abs(r.expected.nats - closed) <= 4.0 * r.standard_error);
  }
}

TEST_CASE("property: synchronized reconstruction sender never increases the loss") {
  GameSpec reco;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto inst = random_instance(61, i);
    const auto receiver = synchronized_reconstruction_receiver(inst.protocol, inst.space);
    const double before = eval_reconstruction(inst.protocol, receiver, inst.space).expected.nats;
    // Unused messages have no output; the sender only chooses among defined ones.
    std::vector<std::optional<Point>> defined;
    std::vector<Index> remap;
    for (Index m = 0; m < receiver.message_count(); ++m)
      if (receiver.defined(m)) {
        remap.push_back(m);
        defined.push_back(receiver.at(m));
      }
    const ReconstructionReceiver compact(defined);
    const auto s = synchronized_sender(compact, inst.space, reco);
    const double after = eval_reconstruction(s.protocol, compact, inst.space).expected.nats;
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("property: perturbing a synchronized row never lowers the loss") {
  Rng rng = substream(71, "perturb");
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto inst = random_instance(71, i);
    const auto& p = inst.protocol;
    const auto sync = synchronized_discrimination_receiver(p, 2);
    const double base = eval_discrimination(p, sync, inst.space, 2, exact()).expected.nats;
    const Index n = inst.space.size();
    const Index m = std::uniform_int_distribution<Index>(0, p.message_count() - 1)(rng);
    const std::vector<Index> query{std::uniform_int_distribution<Index>(0, n - 1)(rng),
                                   std::uniform_int_distribution<Index>(0, n - 1)(rng)};
    const double delta = std::uniform_int_distribution<int>(0, 1)(rng) ? 0.1 : -0.1;
    auto row = sync(m, query);
    row[0] = std::clamp(row[0] + delta, 0.0, 1.0);
    row[1] = 1.0 - row[0];
    const DiscriminationReceiver perturbed(p.message_count(), 2,
                                           [&](Index mm, std::span<const Index> c, std::span<double> out) {
                                             if (mm == m && c[0] == query[0] && c[1] == query[1]) {
                                               out[0] = row[0];
                                               out[1] = row[1];
                                             } else {
                                               sync.evaluate(mm, c, out);
                                             }
                                           });
    const auto r = eval_discrimination(p, perturbed, inst.space, 2, exact());
    CHECK((r.expected.infinite || r.expected.nats >= base - 1e-12));
  }
}
