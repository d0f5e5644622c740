// SPDX-License-Identifier: Apache-2.0
//
// Acceptance runner: one [PASS]/[FAIL] line per criterion, exit status 1 when
// any criterion fails. Closed forms are recomputed here from message masses
// rather than taken from the objectives module.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "semcomm/consistency.hpp"
#include "semcomm/counterexamples.hpp"
#include "semcomm/generators.hpp"
#include "semcomm/info.hpp"
#include "semcomm/objectives.hpp"
#include "semcomm/optimize.hpp"
#include "semcomm/report.hpp"

using namespace semcomm;

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kPopulation = 200;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double sum_of_squares(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return s;
}

std::vector<RandomInstance> population(const InstanceLimits& limits = {}) {
  std::vector<RandomInstance> out;
  for (std::size_t i = 0; i < kPopulation; ++i) out.push_back(random_instance(kSeed, i, limits));
  return out;
}

EvalOptions exact() {
  EvalOptions o;
  o.mode = EvalMode::Exact;
  return o;
}

Outcome reconstruction_oracle() {
  double worst = 0.0;
  for (const auto& [space, p] : population())
    worst = std::max(worst, std::abs(eval_reconstruction(p, synchronized_reconstruction_receiver(p, space), space)
                                         .expected.nats -
                                     reco_objective(p, space)));
  return {worst < 1e-10, fmt("max gap %.3g over %zu protocols", worst, kPopulation)};
}

Outcome discrimination_oracle() {
  double worst = 0.0, worst_z = 0.0;
  std::size_t mc_fail = 0;
  const auto pop = population();
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& [space, p] = pop[i];
    const double closed = kLn2 * sum_of_squares(message_probabilities(p, space));
    worst = std::max(worst, std::abs(eval_discrimination(p, synchronized_discrimination_receiver(p, 2), space, 2,
                                                         exact())
                                         .expected.nats -
                                     closed));

    EvalOptions mc;
    mc.mode = EvalMode::MonteCarlo;
    mc.samples = 200000;
    mc.seed = kSeed + i;
    const auto est = eval_discrimination(p, synchronized_discrimination_receiver(p, 3), space, 3, mc);
    const double truth = disc_objective(p, space, 3).value;
    const double gap = std::abs(est.expected.nats - truth);
    const double z = est.standard_error > 0 ? gap / est.standard_error : (gap < 1e-12 ? 0.0 : HUGE_VAL);
    worst_z = std::max(worst_z, z);
    if (z > 4.0) ++mc_fail;
  }
  return {worst < 1e-10 && mc_fail == 0,
          fmt("d=2 max gap %.3g; d=3 max %.2f SE, %zu beyond 4 SE", worst, worst_z, mc_fail)};
}

LabelMap balanced(std::uint64_t index, std::size_t n) {
  std::size_t count = 2;
  while (n % count != 0) ++count;
  Rng rng = substream(kSeed, "labels", index);
  return random_balanced_labels(rng, n, count);
}

Outcome labelled_game_oracles() {
  double global_gap = 0.0, supervised_gap = 0.0, classification_gap = 0.0;
  const auto pop = population();
  for (const auto& [space, p] : pop) {
    // Loss of the synchronized global receiver is H(X | S) = H(X) - H(S) for
    // deterministic senders.
    const double h_x = entropy(space.weights());
    const double h_s = entropy(message_probabilities(p, space));
    global_gap = std::max(global_gap, std::abs(eval_global(p, synchronized_global_receiver(p, space), space)
                                                   .expected.nats -
                                               (h_x - h_s)));
    global_gap = std::max(global_gap, std::abs(global_objective(p, space) + h_s));
  }

  InstanceLimits uniform;
  uniform.uniform = true;
  const auto upop = population(uniform);
  for (std::size_t i = 0; i < upop.size(); ++i) {
    const auto& [space, p] = upop[i];
    const LabelMap labels = balanced(i, space.size());
    const double y = static_cast<double>(labels.label_count());
    const double closed = kLn2 * y / (y - 1.0) * supervised_objective(p, space, labels).value;
    supervised_gap = std::max(
        supervised_gap,
        std::abs(eval_supervised(p, synchronized_supervised_receiver(p, labels, 2), space, labels, 2, exact())
                     .expected.nats -
                 closed));

    // H(Y | S) from the joint table of labels and messages.
    JointTable joint{std::vector<std::vector<double>>(p.message_count(), std::vector<double>(y, 0.0))};
    for (Index x = 0; x < space.size(); ++x) joint.cells[p[x]][labels[x]] += space.weight(x);
    classification_gap = std::max(
        classification_gap,
        std::abs(eval_classification(p, synchronized_classification_receiver(p, space, labels), space, labels,
                                     exact())
                     .expected.nats -
                 conditional_entropy(joint)));
  }
  return {global_gap < 1e-10 && supervised_gap < 1e-10 && classification_gap < 1e-10,
          fmt("max gaps: global %.3g, supervised %.3g, classification %.3g", global_gap, supervised_gap,
              classification_gap)};
}

Outcome balanced_optimality() {
  std::vector<Point> pts;
  for (int i = 0; i < 6; ++i) pts.push_back({static_cast<double>(i)});
  const auto space = InputSpace::uniform(pts);
  bool ok = true;
  std::size_t partitions = 0;
  for (unsigned d : {2u, 3u}) {
    GameSpec spec;
    spec.kind = GameKind::Discrimination;
    spec.candidates = d;
    const auto best = exhaustive_search(space, 3, spec);
    std::vector<Index> a(6, 0);
    for (std::size_t code = 0; code < 729; ++code) {
      std::size_t c = code;
      std::vector<int> count(3, 0);
      for (auto& m : a) {
        m = c % 3;
        c /= 3;
        ++count[m];
      }
      if (count != std::vector<int>{2, 2, 2}) continue;
      ++partitions;
      if (std::abs(objective_value(Protocol(a, 3), space, spec) - best.value) > 1e-12) ok = false;
    }
  }
  std::string convex;
  for (unsigned d : {2u, 3u, 5u, 41u}) {
    const auto r = convexity_check(d, 1e-3);
    ok = ok && r.convex;
    convex += fmt(" d=%u:%s", d, r.convex ? "convex" : "NOT convex");
  }
  return {ok, fmt("%zu equal-mass partitions at the optimum;", partitions) + convex};
}

Outcome reconstruction_consistency() {
  std::size_t optima = 0, inconsistent = 0;
  GameSpec reco;
  InstanceLimits limits;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto inst = random_instance(kSeed + 1, i, limits);
    // One message admits only the constant protocol, which is never
    // consistent; the claim presumes a consistent protocol exists.
    const std::size_t k = std::max<std::size_t>(2, inst.protocol.message_count());
    const auto best = exhaustive_search(inst.space, k, reco);
    for (const auto& p : best.optimal) {
      ++optima;
      if (!semantic_consistency(p, inst.space).consistent) ++inconsistent;
    }
  }
  const auto B = four_point_line();
  const Protocol anti({0, 1, 1, 0}, 2);
  const double simplified = sum_of_squares(message_probabilities(anti, B));
  GameSpec disc;
  disc.kind = GameKind::Discrimination;
  const bool optimal = std::abs(objective_value(anti, B, disc) - exhaustive_search(B, 2, disc).value) < 1e-12;
  const auto sc = semantic_consistency(anti, B);
  const bool ok = inconsistent == 0 && optima > 0 && optimal && std::abs(simplified - 0.5) < 1e-12 &&
                  !sc.consistent && std::abs(sc.explained) < 1e-12;
  return {ok, fmt("%zu/%zu reconstruction optima consistent; anticonsistent split value %.6g, optimal %s, "
                  "explained %.3g",
                  optima - inconsistent, optima, simplified, optimal ? "yes" : "no", sc.explained)};
}

Outcome spatial_instance() {
  const auto r = verify_spatial_counterexample();
  const auto& a = r.step("a").values;
  const double var = a.at("variance"), k = a.at("k");
  const double loss = r.step("c").values.at("loss");
  const double constant = r.step("d").values.at("constant_loss");
  const bool non_degenerate = r.step("d").passed;
  const auto& g = r.step("g");
  const bool ok = std::abs(var - 91.0 / 6.0) < 1e-12 &&
                  std::abs(k - (std::sqrt(2.0) - 1.0) / 2.0 * std::sqrt(91.0 / 6.0)) < 1e-12 &&
                  k > 1.0 / std::sqrt(2.0) && std::abs(loss - kLn2 / 6.0) < 1e-12 &&
                  std::abs(constant - kLn2) < 1e-12 && non_degenerate && g.passed &&
                  std::abs(g.values.at("gap_below_1")) < 1e-12;
  return {ok, fmt("Var %.12g, k %.6f, loss %.6f, constant %.6f, non-degenerate %s, gap below 1 %.3g", var, k, loss,
                  constant, non_degenerate ? "yes" : "no", g.values.at("gap_below_1"))};
}

Outcome meaningful_senders() {
  std::size_t counterexamples = 0, attempts = 0;
  GameSpec reco;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto inst = random_clustered_receiver(kSeed, i);
    attempts += inst.attempts;
    const auto sender = synchronized_sender(inst.receiver, inst.space, reco);
    if (!spatial_meaningfulness(sender.protocol, inst.space, inst.messages, inst.epsilon0).meaningful)
      ++counterexamples;
  }
  return {counterexamples == 0,
          fmt("%zu counterexamples over 50 receivers (%zu generator draws)", counterexamples, attempts)};
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] + 1e-12) return false;
  return true;
}

Outcome kmeans() {
  const auto r = kmeans_alternation(four_point_line(), 2, std::vector<Point>{{0.4}, {2.6}});
  std::size_t bad = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto inst = random_instance(kSeed + 2, i);
    const std::size_t k = std::min(inst.protocol.message_count(), inst.space.size());
    if (!non_increasing(kmeans_alternation(inst.space, k, RandomInit{kSeed + i}).trace))
      ++bad;
  }
  const bool ok = r.rounds <= 2 && std::abs(r.trace.back() - 0.25) < 1e-12 && non_increasing(r.trace) && bad == 0;
  return {ok, fmt("B: %zu rounds, objective %.6g; %zu/100 random traces increase", r.rounds, r.trace.back(), bad)};
}

Outcome metric_identities() {
  bool ok = true;
  std::string detail;
  InstanceLimits uniform;
  uniform.uniform = true;
  double worst = 0.0;
  for (const auto& [space, p] : population(uniform))
    worst = std::max(worst, std::abs(message_variance(p, space) - reco_objective(p, space)));
  ok = ok && worst < 1e-10;
  detail += fmt("variance gap %.3g", worst);

  const auto symbols = MessageSpace::symbol_product(6, 1);
  std::size_t below = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto inst = random_instance(kSeed + 3, i);
    Rng rng = substream(kSeed + 3, "cluster", i);
    std::vector<Index> a(inst.space.size());
    for (auto& m : a) m = std::uniform_int_distribution<Index>(0, 5)(rng);
    const Protocol p(a, 6);
    if (cluster_variance(p, inst.space, symbols, consecutive_symbol_groups(6, 2)) <
        message_variance(p, inst.space) - 1e-12)
      ++below;
  }
  ok = ok && below == 0;
  detail += fmt("; cluster below message variance %zu/100", below);

  const double ts = topsim(Protocol({0, 1, 3}, 4), InputSpace::uniform({{0}, {1}, {2}}),
                           MessageSpace::symbol_product(2, 2));
  ok = ok && std::abs(ts - 1.0) < 1e-12;
  detail += fmt("; topsim %.12g", ts);

  const auto B = four_point_line();
  const Protocol split({0, 0, 1, 1}, 2), anti({0, 1, 1, 0}, 2);
  const auto aabb = LabelMap::from_strings({"A", "A", "B", "B"});
  const auto abab = LabelMap::from_strings({"A", "B", "A", "B"});
  const bool purity_ok = std::abs(purity(split, B, aabb) - 1.0) < 1e-12 &&
                         std::abs(purity(anti, B, aabb) - 0.5) < 1e-12 &&
                         std::abs(purity(Protocol({0, 0, 0, 1}, 2), B, aabb) - 0.75) < 1e-12 &&
                         std::abs(max_purity(anti, B, {aabb, abab}) - 0.5) < 1e-12 &&
                         std::abs(max_purity(split, B, {abab, aabb}) - 1.0) < 1e-12;
  ok = ok && purity_ok;
  detail += purity_ok ? "; purity examples match" : "; purity examples differ";

  const auto acc = discrimination_accuracy_exact(split, B, AccuracyReceiver::Synchronized, 2);
  ok = ok && acc.accuracy == 0.75;
  detail += fmt("; split accuracy %.17g over %zu episodes", acc.accuracy, acc.episodes);
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "semcomm_acceptance";
  fs::create_directories(dir);
  const auto inputs = dir / "inputs.csv", protocol = dir / "protocol.csv";
  {
    const auto inst = random_instance(kSeed, 0);
    InputTable table{{}, inst.space, {}, {}};
    for (Index i = 0; i < inst.space.size(); ++i) table.ids.push_back("x" + std::to_string(i));
    std::ofstream(inputs) << inputs_csv(table);
    std::ofstream(protocol) << protocol_csv(table.ids, inst.protocol,
                                            MessageSpace::symbol_product(
                                                static_cast<unsigned>(std::max<std::size_t>(
                                                    2, inst.protocol.message_count())),
                                                1));
  }
  const std::string args = " --seed 99 --samples 20000 analyze --inputs " + inputs.string() + " --protocol " +
                           protocol.string() + " --game discrimination --d 3 --eval monte-carlo";
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("run" + std::to_string(run) + ".json");
    const std::string cmd = std::string("\"") + SEMCOMM_CLI + "\"" + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "analyze exited with an error"};
    reports.push_back(slurp(out));
  }

  RunConfig config;
  for (const auto& [k, v] : std::vector<std::pair<const char*, const char*>>{
           {"seed", "99"}, {"samples", "20000"}, {"game", "discrimination"}, {"candidates", "3"},
           {"eval", "monte-carlo"}})
    config.set(k, v);
  const Dataset data = load_dataset(inputs.string(), protocol.string(), "", config);
  const std::string in_process = dump_report(run_analyze(data, config).report);

  const bool ok = !reports[0].empty() && reports[0] == reports[1] && reports[0] == in_process;
  return {ok, fmt("two command-line runs and one library run, %zu bytes, %s", reports[0].size(),
                  ok ? "identical" : "different")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double limit_seconds;  // 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "reconstruction loss equals its closed form", 5, reconstruction_oracle},
      {"AC2", "discrimination loss equals its closed form", 60, discrimination_oracle},
      {"AC3", "global, supervised and classification closed forms", 0, labelled_game_oracles},
      {"AC4", "equal-mass partitions are discrimination-optimal; f is convex", 30, balanced_optimality},
      {"AC5", "reconstruction optima are consistent; an optimal anticonsistent split exists", 0,
       reconstruction_consistency},
      {"AC6", "spatial counterexample values", 5, spatial_instance},
      {"AC7", "synchronized senders of simple non-degenerate receivers are meaningful", 0, meaningful_senders},
      {"AC8", "k-means alternation", 0, kmeans},
      {"AC9", "metric identities", 0, metric_identities},
      {"AC10", "analyze reports are byte-identical for a fixed seed", 0, determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && seconds > c.limit_seconds) {
      o.passed = false;
      o.detail += fmt("; over the %.0f s limit", c.limit_seconds);
    }
    if (!o.passed) ++failures;
    std::printf("[%s] %s %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
