// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "oracle.hpp"
#include "semcomm/generators.hpp"
#include "semcomm/games.hpp"
#include "semcomm/objectives.hpp"
#include "semcomm/optimize.hpp"

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

}  // namespace

TEST_CASE("reconstruction objective examples") {
  CHECK(std::abs(reco_objective(kSplit, B) - 0.25) < 1e-12);
  CHECK(std::abs(reco_objective(kAnti, B) - 1.25) < 1e-12);
  CHECK(reco_objective(Protocol::identity(4), B) == 0.0);
}

TEST_CASE("binomial log moment examples") {
  CHECK(binomial_log_moment(0.0, 7) == 0.0);
  CHECK(std::abs(binomial_log_moment(1.0, 2) - kLog2) < 1e-15);
  CHECK(std::abs(binomial_log_moment(0.5, 3) - 0.5 * (0.5 * kLog2 + 0.25 * std::log(3.0))) < 1e-15);
  CHECK(std::abs(binomial_log_moment(0.5, 3) - 0.31061) < 1e-5);
}

TEST_CASE("property: binomial log moment matches direct summation") {
  for (unsigned d : {2u, 3u, 5u, 17u, 41u})
    for (double p = 0.0; p <= 1.0; p += 0.0625) CHECK(std::abs(binomial_log_moment(p, d) - oracle::binomial_f(p, d)) < 1e-12);
}

TEST_CASE("discrimination objective examples") {
  const auto uniform3 = disc_objective(Protocol({0, 1, 2, 0, 1, 2}, 3), line({0, 1, 2, 3, 4, 5}), 2);
  REQUIRE(uniform3.simplified);
  CHECK(std::abs(*uniform3.simplified - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(*disc_objective(Protocol::constant(4, 2), B, 2).simplified - 1.0) < 1e-12);
  const auto d3 = disc_objective(kSplit, B, 3);
  CHECK_FALSE(d3.simplified);
  CHECK(std::abs(d3.value - 0.62123) < 1e-5);
  CHECK(std::abs(d3.value - 2.0 * oracle::binomial_f(0.5, 3)) < 1e-12);
}

TEST_CASE("global objective examples") {
  CHECK(global_objective(Protocol::constant(4, 1), B) == 0.0);
  CHECK(std::abs(global_objective(kSplit, B) + kLog2) < 1e-12);
  CHECK(std::abs(global_objective(Protocol::identity(4), B) + std::log(4.0)) < 1e-12);
}

TEST_CASE("supervised objective examples") {
  const auto pure = supervised_objective(kSplit, B, kAABB);
  CHECK(std::abs(pure.diversity - 0.5) < 1e-12);
  CHECK(std::abs(pure.purity - 0.5) < 1e-12);
  CHECK(std::abs(pure.value) < 1e-12);
  CHECK(std::abs(supervised_objective(kAnti, B, kAABB).value - 0.25) < 1e-12);
  CHECK(std::abs(supervised_objective(Protocol::constant(4, 1), B, kAABB).value - 0.5) < 1e-12);
}

TEST_CASE("classification objective examples") {
  CHECK(std::abs(classification_objective(kSplit, B, kAABB) + kLog2) < 1e-12);
  CHECK(std::abs(classification_objective(kAnti, B, kAABB)) < 1e-12);
  CHECK(std::abs(classification_objective(Protocol::constant(4, 1), B, kAABB)) < 1e-12);
}

TEST_CASE("convexity grid") {
  for (unsigned d : {2u, 3u, 5u, 41u}) {
    const auto r = convexity_check(d, 1e-3);
    CHECK(r.convex);
    CHECK(r.min_second_difference >= -1e-9);
  }
  CHECK_THROWS_AS(convexity_check(2, 0.01), PreconditionError);
}

TEST_CASE("supervised closed form is d = 2 only") {
  GameSpec spec;
  spec.kind = GameKind::Supervised;
  spec.labels = LabelMap::from_strings({"A", "B", "C", "A"});
  spec.candidates = 3;
  CHECK_THROWS_AS(objective_value(kSplit, B, spec), PreconditionError);
}

TEST_CASE("property: variance decomposition") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto inst = random_instance(81, i);
    const double explained_plus = reco_objective(inst.protocol, inst.space);
    std::vector<oracle::Vec> pts(inst.space.points().begin(), inst.space.points().end());
    oracle::Vec w(inst.space.weights().begin(), inst.space.weights().end());
    CHECK(std::abs(explained_plus - oracle::unexplained(pts, w, {inst.protocol.assignment().begin(),
                                                                  inst.protocol.assignment().end()})) < 1e-10);
    CHECK(explained_plus <= oracle::variance(pts, w) + 1e-10);
  }
}

TEST_CASE("property: supervised objective is non-negative") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto inst = random_instance(91, i);
    Rng rng = substream(91, "labels", i);
    std::vector<Index> raw(inst.space.size());
    for (auto& y : raw) y = std::uniform_int_distribution<Index>(0, 2)(rng);
    std::vector<std::string> names;
    for (auto y : raw) names.push_back(std::to_string(y));
    CHECK(supervised_objective(inst.protocol, inst.space, LabelMap::from_strings(names)).value >= -1e-15);
  }
}

namespace {

/// Codes of every protocol attaining the minimum of `loss` over all K^N.
template <class F>
std::set<std::vector<Index>> argmin_codes(std::size_t n, std::size_t k, F loss) {
  std::set<std::vector<Index>> best;
  double best_value = HUGE_VAL;
  std::vector<Index> code(n, 0);
  while (true) {
    const double v = loss(Protocol(code, k));
    if (v < best_value - 1e-10) {
      best_value = v;
      best.clear();
    }
    if (std::abs(v - best_value) <= 1e-10) best.insert(code);
    std::size_t pos = n;
    while (pos > 0 && ++code[pos - 1] == k) code[--pos] = 0;
    if (pos == 0) break;
  }
  return best;
}

}  // namespace

TEST_CASE("property: closed-form and game-loss argmin sets agree for all five games") {
  EvalOptions exact;
  exact.mode = EvalMode::Exact;
  for (std::uint64_t i = 0; i < 6; ++i) {
    InstanceLimits limits;
    limits.max_inputs = 6;
    limits.max_dimension = 2;
    limits.uniform = true;
    Rng rng = substream(101, "argmin", i);
    InputSpace space = random_input_space(rng, limits);
    if (space.size() % 2 != 0) space = InputSpace::uniform({space.points().begin(), space.points().end() - 1});
    if (space.size() < 2) continue;
    const std::size_t n = space.size(), k = 2 + i % 2;
    const LabelMap labels = random_balanced_labels(rng, n, 2);
    for (GameKind kind : {GameKind::Reconstruction, GameKind::Discrimination, GameKind::Global, GameKind::Supervised,
                          GameKind::Classification}) {
      GameSpec spec;
      spec.kind = kind;
      if (kind == GameKind::Supervised || kind == GameKind::Classification) spec.labels = labels;
      const auto by_objective = argmin_codes(n, k, [&](const Protocol& p) { return objective_value(p, space, spec); });
      const auto by_loss = argmin_codes(n, k, [&](const Protocol& p) {
        return evaluate_game(p, synchronized_receiver(p, space, spec), space, spec, exact).expected.nats;
      });
      CHECK_MESSAGE(by_objective == by_loss, "game " << to_string(kind) << " instance " << i);
    }
  }
}

TEST_CASE("binomial moment tolerates rounding overshoot of a full mass") {
  CHECK(binomial_log_moment(1.0 + 2e-16, 2) == binomial_log_moment(1.0, 2));
  CHECK_THROWS_AS(binomial_log_moment(1.01, 2), PreconditionError);
  CHECK_THROWS_AS(binomial_log_moment(-0.01, 2), PreconditionError);
}
