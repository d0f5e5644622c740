// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "semcomm/report.hpp"

using namespace semcomm;
using nlohmann::json;

namespace {

Dataset line_split(const char* assignment = "id,message\na,0\nb,0\nc,1\nd,1\n") {
  Dataset d{parse_inputs_csv("id,x0,label_side\na,0,left\nb,1,left\nc,2,right\nd,3,right\n"), std::nullopt};
  d.protocol = parse_protocol_csv(assignment, d.inputs.ids);
  return d;
}

RunConfig config(std::initializer_list<std::pair<const char*, const char*>> options) {
  RunConfig c;
  for (const auto& [k, v] : options) c.set(k, v);
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = config({{"game", "supervised"}, {"candidates", "3"}});
  CHECK(c.game == GameKind::Supervised);
  CHECK(c.candidates == 3);
  c.set("init", "0.4;2.6");
  CHECK(c.init == std::vector<Point>{{0.4}, {2.6}});
  c.set("check", "semantic-consistency");
  c.set("check", "simplicity");
  CHECK(c.checks.size() == 2);
  c.set("expect", "fail");
  CHECK(c.expect == false);
  CHECK_THROWS_AS(c.set("no-such-key", "1"), PreconditionError);
  CHECK_THROWS_AS(c.set("k", "two"), PreconditionError);
  CHECK_THROWS_AS(c.set("game", "chess"), PreconditionError);
}

TEST_CASE("report dump rounds floats, sorts keys and stringifies non-finite numbers") {
  json j;
  j["zeta"] = 0.1 + 0.2;
  j["alpha"] = std::numeric_limits<double>::infinity();
  j["mid"] = {1.0 / 3.0, std::nan("")};
  const auto text = dump_report(j);
  CHECK(text == "{\n  \"alpha\": \"inf\",\n  \"mid\": [\n    0.333333333333,\n    \"nan\"\n  ],\n  \"zeta\": 0.3\n}\n");
}

TEST_CASE("analyze on the four-point split") {
  const auto data = line_split();
  const auto out = run_analyze(data, config({{"game", "discrimination"}, {"accuracy_candidates", "2"},
                                             {"accuracy_exact", "true"}}));
  const auto& r = out.report;
  CHECK(r["schema"] == 1);
  CHECK(r["seed"] == 0);
  CHECK(r["metrics"]["message_variance"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r["metrics"]["disc_accuracy"].get<double>() == 0.75);
  CHECK(r["metrics"]["purity"].get<double>() == 1.0);
  CHECK(r["game"]["objective"].get<double>() == doctest::Approx(std::numbers::ln2 / 2).epsilon(1e-12));
  CHECK(r["consistency"]["consistent"] == true);
  // A single attribute makes the disentanglement scores undefined, not fatal.
  CHECK(r["metrics"]["posdis"].contains("error"));
}

TEST_CASE("losses follow the log base") {
  const auto data = line_split();
  const auto nats = run_analyze(data, config({{"game", "discrimination"}, {"metrics", "unique_messages"}}));
  const auto bits = run_analyze(data, config({{"game", "discrimination"}, {"metrics", "unique_messages"},
                                              {"log_base", "bits"}}));
  CHECK(bits.report["game"]["objective"].get<double>() ==
        doctest::Approx(nats.report["game"]["objective"].get<double>() / std::numbers::ln2).epsilon(1e-12));
  CHECK(bits.report["game"]["objective"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("topsim of a constant protocol is reported as undefined") {
  const auto data = line_split("id,message\na,0\nb,0\nc,0\nd,0\n");
  const auto out = run_metrics(data, config({{"metrics", "topsim,unique_messages"}}));
  CHECK(out.report["topsim"] == "undefined");
  CHECK(out.report["unique_messages"] == 1);
  CHECK_FALSE(out.report.contains("purity"));
}

TEST_CASE("metrics csv keeps column order") {
  const auto data = line_split();
  const auto out = run_metrics(data, config({{"metrics", "purity,message_variance"}}));
  CHECK(out.files.at("metrics.csv") == "message_variance,purity\n0.25,1\n");
}

TEST_CASE("reports are reproducible for a fixed seed") {
  const auto data = line_split();
  const auto c = config({{"seed", "7"}, {"game", "discrimination"}, {"candidates", "3"}, {"eval", "monte-carlo"},
                         {"samples", "5000"}});
  const auto a = dump_report(run_analyze(data, c).report);
  CHECK(a == dump_report(run_analyze(data, c).report));
  auto other = c;
  other.seed = 8;
  CHECK(a != dump_report(run_analyze(data, other).report));
}

TEST_CASE("verify: oracle checks pass on the four-point split") {
  const auto data = line_split();
  auto c = config({{"check", "reconstruction-oracle"}, {"check", "discrimination-oracle"},
                   {"check", "global-oracle"}, {"check", "classification-oracle"},
                   {"check", "semantic-consistency"}, {"expect", "pass"}});
  const auto out = run_verify(&data, c);
  CHECK(out.expectations_met);
  CHECK(out.report["all_true"] == true);
  CHECK(out.report["verdicts"].size() == 5);
  for (const auto& v : out.report["verdicts"]) CHECK_MESSAGE(v["verdict"] == true, v.dump());
}

TEST_CASE("verify: an expectation mismatch is reported") {
  const auto data = line_split("id,message\na,0\nb,1\nc,1\nd,0\n");
  const auto out = run_verify(&data, config({{"check", "semantic-consistency"}, {"expect", "pass"}}));
  CHECK_FALSE(out.expectations_met);
  CHECK_THROWS_AS(run_verify(&data, config({{"check", "no-such-check"}})), PreconditionError);
}

TEST_CASE("optimize: k-means recovers the contiguous split and emits artifacts") {
  const auto data = line_split();
  const auto out = run_optimize(data, config({{"k", "2"}, {"init", "0.4;2.6"}}));
  CHECK(out.report["objective"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(out.files.at("protocol.csv") == "id,message\na,0\nb,0\nc,1\nd,1\n");
  CHECK(out.files.count("trace.csv") == 1);
  CHECK(out.files.count("metrics.csv") == 1);
}

TEST_CASE("counterexample reports carry every step") {
  const auto out = run_counterexample(nullptr, config({{"which", "anticonsistent"}, {"expect", "pass"}}));
  CHECK(out.expectations_met);
  CHECK(out.report["passed"] == true);
  CHECK(out.files.count("protocol.csv") == 1);
  const auto spatial = run_counterexample(nullptr, config({{"which", "spatial"}}));
  CHECK(spatial.report["passed"] == false);
  CHECK(spatial.report["steps"].size() == 7);
}

TEST_CASE("balanced optimality is only judged when equal masses are reachable") {
  const auto out = run_verify(nullptr, config({{"check", "balanced-optimality"}, {"n", "6"}, {"k", "3"}}));
  const auto& v = out.report["verdicts"][0];
  CHECK(v["verdict"] == true);
  CHECK(v["applicable"] == true);
  CHECK(v["optimum_uniform"] == true);
  CHECK(v["attaining"] == v["equal_mass_protocols"]);

  Dataset skewed{parse_inputs_csv("id,x0,weight\na,0,0.7\nb,1,0.2\nc,2,0.1\n"), std::nullopt};
  const auto none = run_verify(&skewed, config({{"check", "balanced-optimality"}, {"k", "2"}}));
  CHECK(none.report["verdicts"][0]["applicable"] == false);
  CHECK(none.report["verdicts"][0]["optimum_uniform"] == false);
  CHECK(none.report["verdicts"][0]["verdict"] == true);
}
