// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "semcomm/counterexamples.hpp"
#include "semcomm/objectives.hpp"
#include "semcomm/optimize.hpp"

using namespace semcomm;

namespace {

const VerificationReport& spatial_report() {
  static const VerificationReport r = verify_spatial_counterexample();
  return r;
}

double value(const VerificationStep& s, const std::string& key) {
  REQUIRE(s.values.count(key) == 1);
  return s.values.at(key);
}

}  // namespace

TEST_CASE("spatial counterexample construction") {
  const auto ce = build_spatial_counterexample();
  CHECK(ce.space.size() == 12);
  CHECK(std::abs(input_variance(ce.space) - 91.0 / 6.0) < 1e-12);
  CHECK(epsilon_m(ce.messages) == 1.0);
  for (double p : message_probabilities(ce.sender, ce.space)) CHECK(std::abs(p - 1.0 / 6.0) < 1e-15);
  CHECK(ce.table.size() == 6 * 12 * 12 * 2);
  // Inputs k and -k share message k.
  for (Index k = 0; k < 6; ++k) CHECK(ce.sender[k] == ce.sender[k + 6]);

  const std::vector<Index> same_set{0, 6}, in_and_out{0, 1}, out_and_in{1, 0}, neither{1, 2};
  CHECK(ce.receiver(0, same_set) == std::vector<double>{0.5, 0.5});
  CHECK(ce.receiver(0, in_and_out) == std::vector<double>{1.0, 0.0});
  CHECK(ce.receiver(0, out_and_in) == std::vector<double>{0.0, 1.0});
  CHECK(ce.receiver(0, neither) == std::vector<double>{0.5, 0.5});
}

TEST_CASE("step a: simplicity constant reproduced, simplicity itself violated") {
  const auto& s = spatial_report().step("a");
  CHECK(std::abs(value(s, "variance") - 91.0 / 6.0) < 1e-12);
  CHECK(std::abs(value(s, "k") - (std::sqrt(2.0) - 1.0) / 2.0 * std::sqrt(91.0 / 6.0)) < 1e-12);
  CHECK(value(s, "k") > 1.0 / std::sqrt(2.0));
  // Two messages one apart answering the same candidate pair in opposite
  // directions put output distance sqrt 2 over domain distance 1.
  CHECK(std::abs(value(s, "worst_ratio") - std::sqrt(2.0)) < 1e-12);
  CHECK_FALSE(s.passed);
}

TEST_CASE("step b: synchronized sender maps +-k to k") {
  CHECK(spatial_report().step("b").passed);
}

TEST_CASE("step c: synchronized loss is log 2 / 6") {
  const auto& s = spatial_report().step("c");
  CHECK(s.passed);
  CHECK(std::abs(value(s, "loss") - std::numbers::ln2 / 6.0) < 1e-12);
  CHECK(std::abs(value(s, "loss") - 0.115525) < 1e-6);
}

TEST_CASE("step d: non-degeneracy") {
  const auto& s = spatial_report().step("d");
  CHECK(s.passed);
  CHECK(std::abs(value(s, "constant_loss") - std::numbers::ln2) < 1e-12);
  CHECK(value(s, "sup_loss") <= value(s, "quarter_constant"));
}

TEST_CASE("step e: uniform masses are optimal") {
  CHECK(spatial_report().step("e").passed);
}

TEST_CASE("step f: no explained variance") {
  const auto& s = spatial_report().step("f");
  CHECK(s.passed);
  CHECK(value(s, "max_abs_conditional_mean") == 0.0);
  CHECK(std::abs(value(s, "explained")) < 1e-12);
}

TEST_CASE("step g: not spatially meaningful, with equality below distance 1") {
  const auto& s = spatial_report().step("g");
  CHECK(s.passed);
  CHECK(std::abs(value(s, "gap_below_1")) < 1e-12);
}

TEST_CASE("spatial counterexample verdict reflects the simplicity failure") {
  CHECK_FALSE(spatial_report().passed());
  CHECK_THROWS(spatial_report().step("z"));
}

TEST_CASE("anticonsistent optimum on B") {
  const auto B = four_point_line();
  CHECK(build_anticonsistent_optimal(B, 2) == Protocol({0, 1, 1, 0}, 2));
  const auto r = verify_anticonsistent_optimal(B, 2);
  CHECK(r.passed());
  CHECK(std::abs(r.step("optimal").values.at("simplified") - 0.5) < 1e-12);
  CHECK(r.step("inconsistent").values.at("explained") == 0.0);
}

TEST_CASE("anticonsistent optimum on a symmetric space") {
  const auto space = InputSpace::uniform({{-2}, {-1}, {1}, {2}});
  const auto p = build_anticonsistent_optimal(space, 2);
  CHECK(p[0] == p[3]);
  CHECK(p[1] == p[2]);
  CHECK(verify_anticonsistent_optimal(space, 2).passed());
}

TEST_CASE("anticonsistent optimum with a single message") {
  const auto space = InputSpace::uniform({{0}, {1}});
  CHECK(build_anticonsistent_optimal(space, 1) == Protocol::constant(2, 1));
  const auto r = verify_anticonsistent_optimal(space, 1);
  CHECK(r.passed());
  CHECK_THROWS_AS(build_anticonsistent_optimal(InputSpace::uniform({{0}, {1}, {2}}), 1), PreconditionError);
}

TEST_CASE("property: antipodal protocol ties the exhaustive optimum") {
  GameSpec disc;
  disc.kind = GameKind::Discrimination;
  for (std::uint64_t i = 0; i < 10; ++i) {
    std::vector<Point> pts;
    for (std::size_t j = 0; j < 2 + 2 * (i % 3); ++j) pts.push_back({std::sin(1.0 + i + 3.0 * j), std::cos(2.0 * j + i)});
    const auto space = InputSpace::uniform(pts);
    const auto p = build_anticonsistent_optimal(space, pts.size() / 2);
    CHECK(std::abs(objective_value(p, space, disc) - exhaustive_search(space, pts.size() / 2, disc).value) < 1e-12);
  }
}
