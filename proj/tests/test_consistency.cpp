// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracle.hpp"
#include "semcomm/consistency.hpp"
#include "semcomm/generators.hpp"

using namespace semcomm;

namespace {

InputSpace line(std::initializer_list<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  return InputSpace::uniform(pts);
}

const InputSpace B = line({0, 1, 2, 3});
const Protocol kSplit({0, 0, 1, 1}, 2);
const Protocol kAnti({0, 1, 1, 0}, 2);

/// E[||x1 - x2||^2 | d(S(x1), S(x2)) <= eps] by a direct double sum.
double conditional_pairwise(const InputSpace& s, const Protocol& p, const MessageSpace& m, double eps) {
  double num = 0.0, mass = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    for (Index j = 0; j < s.size(); ++j)
      if (m.distance(p[i], p[j]) <= eps) {
        const double w = s.weight(i) * s.weight(j);
        num += w * oracle::sqdist(s.point(i), s.point(j));
        mass += w;
      }
  return num / mass;
}

}  // namespace

TEST_CASE("semantic consistency examples") {
  const auto split = semantic_consistency(kSplit, B);
  CHECK(split.consistent);
  CHECK(std::abs(split.explained - 1.0) < 1e-12);
  CHECK(std::abs(split.unexplained - 0.25) < 1e-12);
  const auto anti = semantic_consistency(kAnti, B);
  CHECK_FALSE(anti.consistent);
  CHECK(anti.boundary);
  CHECK(std::abs(anti.explained) < 1e-12);
  CHECK(std::abs(anti.unexplained - 1.25) < 1e-12);
  const auto lossless = semantic_consistency(Protocol::identity(4), B);
  CHECK(lossless.consistent);
  CHECK(std::abs(lossless.explained - 1.25) < 1e-12);
}

TEST_CASE("spatial meaningfulness examples") {
  const auto near = spatial_meaningfulness(kSplit, B, MessageSpace::euclidean({{0}, {1}}), 1.0);
  CHECK_FALSE(near.meaningful);
  REQUIRE(near.thresholds.size() == 2);
  CHECK(near.thresholds[0].holds);
  CHECK_FALSE(near.thresholds[1].holds);
  CHECK(near.thresholds[1].boundary);

  const auto far = spatial_meaningfulness(kSplit, B, MessageSpace::euclidean({{0}, {4}}), 1.0);
  CHECK(far.meaningful);
  REQUIRE(far.thresholds.size() == 1);
  CHECK(std::abs(far.thresholds[0].conditional - 0.5) < 1e-12);
  CHECK(std::abs(far.thresholds[0].unconditional - 2.5) < 1e-12);
  CHECK_FALSE(far.warnings.empty());
}

TEST_CASE("property: threshold expectations match direct pair sums") {
  for (std::uint64_t i = 0; i < 60; ++i) {
    const auto inst = random_instance(111, i);
    Rng rng = substream(111, "messages", i);
    std::vector<Point> vecs;
    for (Index m = 0; m < inst.protocol.message_count(); ++m)
      vecs.push_back({std::uniform_real_distribution<double>(0.0, 3.0)(rng) + 4.0 * m});
    const auto messages = MessageSpace::euclidean(vecs);
    const auto r = spatial_meaningfulness(inst.protocol, inst.space, messages, 10.0);
    for (const auto& t : r.thresholds) {
      if (t.vacuous) continue;
      CHECK(std::abs(t.conditional - conditional_pairwise(inst.space, inst.protocol, messages, t.epsilon)) < 1e-10);
    }
  }
}

TEST_CASE("property: spatial meaningfulness implies semantic consistency") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto inst = random_instance(121, i);
    const auto messages = MessageSpace::symbol_product(std::max<unsigned>(2, inst.protocol.message_count()), 1);
    const Protocol p(std::vector<Index>(inst.protocol.assignment().begin(), inst.protocol.assignment().end()),
                     messages.size());
    if (spatial_meaningfulness(p, inst.space, messages, 1.0).meaningful)
      CHECK(semantic_consistency(p, inst.space).consistent);
  }
}

TEST_CASE("simplicity examples") {
  const auto space = line({1, 2, 3, 4, 5, 6, -1, -2, -3, -4, -5, -6});
  CHECK(std::abs(simplicity_constant(space, 1.0) - (std::sqrt(2.0) - 1.0) / 2.0 * std::sqrt(91.0 / 6.0)) < 1e-12);

  const auto messages = MessageSpace::euclidean({{0}, {1}});
  const auto constant = receiver_simplicity(receiver_table(ReconstructionReceiver({Point{0.3}, Point{0.3}})), messages,
                                            line({0, 1}), 1.0);
  CHECK(constant.simple);
  CHECK(constant.worst_ratio == 0.0);

  // Var[X] = 1, outputs (1, 0) and (0, 1) one unit apart: ratio sqrt 2.
  const auto unit = InputSpace::uniform({{-1.0}, {1.0}});
  const auto spread = receiver_simplicity(receiver_table(ReconstructionReceiver({Point{1, 0}, Point{0, 1}})), messages,
                                          unit, 1.0);
  CHECK_FALSE(spread.simple);
  CHECK(std::abs(spread.worst_ratio - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(spread.k - (std::sqrt(2.0) - 1.0) / 2.0) < 1e-12);
}

TEST_CASE("duplicate embeddings with different outputs fail simplicity") {
  ReceiverTable t;
  t.messages = {0, 0};
  t.candidates = {{}, {}};
  t.outputs = {{0.0}, {1.0}};
  const auto r = receiver_simplicity(t, MessageSpace::euclidean({{0}, {1}}), B, 1.0);
  CHECK_FALSE(r.simple);
  CHECK(r.unbounded);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("optimal constant receivers") {
  GameSpec reco;
  const auto r = optimal_constant_receiver(B, reco);
  CHECK(std::abs(std::get<ReconstructionReceiver>(r.receiver).at(0)[0] - 1.5) < 1e-12);
  CHECK(std::abs(r.loss - 1.25) < 1e-12);
  GameSpec disc;
  disc.kind = GameKind::Discrimination;
  CHECK(std::abs(optimal_constant_receiver(B, disc).loss - std::numbers::ln2) < 1e-12);
  disc.candidates = 4;
  CHECK(std::abs(optimal_constant_receiver(B, disc).loss - std::log(4.0)) < 1e-12);
  GameSpec global;
  global.kind = GameKind::Global;
  CHECK_THROWS_AS(optimal_constant_receiver(B, global), PreconditionError);
}

TEST_CASE("non-degeneracy examples") {
  GameSpec reco;
  const auto constant = non_degeneracy(ReconstructionReceiver({Point{1.5}}), B, reco);
  CHECK_FALSE(constant.non_degenerate);
  CHECK(std::abs(constant.sup_loss.nats - 2.25) < 1e-12);
  CHECK(std::abs(constant.constant_loss - 1.25) < 1e-12);
  const auto lossless = non_degeneracy(ReconstructionReceiver({Point{0}, Point{1}, Point{2}, Point{3}}), B, reco);
  CHECK(lossless.non_degenerate);
  CHECK(lossless.sup_loss.nats == 0.0);
}
