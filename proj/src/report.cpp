// SPDX-License-Identifier: Apache-2.0
#include "semcomm/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <set>

#include "semcomm/consistency.hpp"
#include "semcomm/counterexamples.hpp"
#include "semcomm/generators.hpp"
#include "semcomm/info.hpp"
#include "semcomm/objectives.hpp"
#include "semcomm/optimize.hpp"

namespace semcomm {

using nlohmann::json;

namespace {

constexpr int kSchema = 1;

template <class T>
T parse_unsigned(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw PreconditionError("option " + std::string(key) + ": expected a non-negative integer, got '" +
                            std::string(text) + "'");
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  const std::string s(text);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(value))
    throw PreconditionError("option " + std::string(key) + ": expected a number, got '" + s + "'");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "pass") return true;
  if (text == "false" || text == "0" || text == "no" || text == "fail") return false;
  throw PreconditionError("option " + std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = std::min(text.find(sep, start), text.size());
    out.emplace_back(text.substr(start, end - start));
    if (end >= text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::Exact: return "exact";
    case EvalMode::MonteCarlo: return "monte-carlo";
    case EvalMode::Auto: return "auto";
  }
  return "auto";
}

std::string_view accuracy_receiver_name(AccuracyReceiver r) {
  return r == AccuracyReceiver::Synchronized ? "synchronized" : "reconstruction-nearest";
}

bool is_information_game(GameKind kind) { return kind != GameKind::Reconstruction; }

double in_base(double nats, LogBase base) { return base == LogBase::Bits ? nats / std::numbers::ln2 : nats; }

json loss_json(const Loss& loss, LogBase base) {
  if (loss.infinite) return "inf";
  return in_base(loss.nats, base);
}

json error_entry(const std::exception& e) { return json{{"error", e.what()}}; }

template <class F>
json guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_entry(e);
  }
}

json header(std::string_view command, const RunConfig& config) {
  return json{{"schema", kSchema},
              {"command", command},
              {"seed", config.seed},
              {"samples", config.samples},
              {"log_base", config.log_base == LogBase::Bits ? "bits" : "nats"}};
}

const LabelMap& select_label(const RunConfig& config, const InputTable& table) {
  if (table.attributes.empty()) throw PreconditionError("no labels: add label columns or a labels file");
  if (config.label.empty()) return table.attributes.front();
  for (std::size_t a = 0; a < table.attribute_names.size(); ++a)
    if (table.attribute_names[a] == config.label) return table.attributes[a];
  throw PreconditionError("unknown label attribute '" + config.label + "'");
}

GameSpec make_spec(const RunConfig& config, const InputTable& table) {
  GameSpec spec;
  spec.kind = config.game;
  spec.candidates = config.candidates;
  spec.seed = config.seed;
  spec.samples = config.samples;
  if (config.game == GameKind::Supervised || config.game == GameKind::Classification)
    spec.labels = select_label(config, table);
  spec.validate(table.space.size());
  return spec;
}

EvalOptions eval_options(const RunConfig& config, std::uint64_t seed) {
  EvalOptions options;
  options.mode = config.eval_mode;
  options.samples = config.samples;
  options.seed = seed;
  return options;
}

const ProtocolTable& require_protocol(const Dataset& data) {
  if (!data.protocol) throw PreconditionError("this command needs a protocol file");
  return *data.protocol;
}

std::size_t unique_messages(const Protocol& protocol) {
  std::set<Index> used(protocol.assignment().begin(), protocol.assignment().end());
  return used.size();
}

bool wants(const RunConfig& config, const std::string& name) {
  return config.metrics.empty() || std::find(config.metrics.begin(), config.metrics.end(), name) != config.metrics.end();
}

json metrics_json(const InputTable& inputs, const ProtocolTable& table, const RunConfig& config,
                  std::vector<std::string>& warnings) {
  const Protocol& p = table.protocol;
  const InputSpace& space = inputs.space;
  json out = json::object();
  if (wants(config, "unique_messages")) out["unique_messages"] = unique_messages(p);
  if (wants(config, "disc_accuracy"))
    out["disc_accuracy"] = guarded([&]() -> json {
      const auto report = config.accuracy_exact
                              ? discrimination_accuracy_exact(p, space, config.accuracy_receiver,
                                                              config.accuracy_candidates)
                              : discrimination_accuracy(p, space, config.accuracy_receiver, config.accuracy_candidates,
                                                        config.seed, config.accuracy_trials);
      return report.accuracy;
    });
  if (wants(config, "topsim")) {
    try {
      out["topsim"] = topsim(p, space, table.messages);
    } catch (const PreconditionError& e) {
      if (std::string(e.what()).find("zero variance") != std::string::npos)
        out["topsim"] = "undefined";
      else
        out["topsim"] = error_entry(e);
    } catch (const Error& e) {
      out["topsim"] = error_entry(e);
    }
  }
  if (wants(config, "message_variance")) out["message_variance"] = guarded([&]() -> json { return message_variance(p, space); });
  if (wants(config, "baseline_mean") || wants(config, "baseline_std")) {
    try {
      const auto baseline = random_baseline(
          p, space, [&](const Protocol& q) { return message_variance(q, space); }, config.baseline_repeats,
          config.seed);
      if (wants(config, "baseline_mean")) out["baseline_mean"] = baseline.mean;
      if (wants(config, "baseline_std")) out["baseline_std"] = baseline.std;
      warnings.insert(warnings.end(), baseline.warnings.begin(), baseline.warnings.end());
    } catch (const Error& e) {
      if (wants(config, "baseline_mean")) out["baseline_mean"] = error_entry(e);
      if (wants(config, "baseline_std")) out["baseline_std"] = error_entry(e);
    }
  }
  if (wants(config, "purity"))
    out["purity"] = guarded([&]() -> json { return purity(p, space, select_label(config, inputs)); });
  if (wants(config, "max_purity"))
    out["max_purity"] = guarded([&]() -> json {
      if (inputs.attributes.empty()) throw PreconditionError("no labels: add label columns or a labels file");
      return max_purity(p, space, inputs.attributes);
    });
  for (const auto kind : {DisentanglementKind::PosDis, DisentanglementKind::BosDis, DisentanglementKind::SPosDis}) {
    const std::string name(to_string(kind));
    if (wants(config, name))
      out[name] = guarded([&]() -> json {
        return disentanglement(p, space, table.messages, inputs.attributes, kind).value;
      });
  }
  if (wants(config, "cluster_variance"))
    out["cluster_variance"] = guarded([&]() -> json {
      if (!table.messages.has_symbols()) throw PreconditionError("cluster variance needs symbol messages");
      return cluster_variance(p, space, table.messages,
                              consecutive_symbol_groups(table.messages.vocab(), config.group_size));
    });
  return out;
}

json conventions(const RunConfig& config, const MessageSpace& messages) {
  return json{
      {"message_variance", "ordered pairs including self pairs"},
      {"baseline", {{"metric", "message_variance"}, {"repeats", config.baseline_repeats}, {"std", "population"}}},
      {"topsim", messages.has_symbols() ? "spearman; euclidean inputs, edit-distance messages"
                                        : "spearman; euclidean inputs, message-space distance"},
      {"disentanglement", "mean over units with non-zero entropy"},
      {"cluster_groups", {{"group_size", config.group_size}}},
      {"disc_accuracy",
       {{"candidates", config.accuracy_candidates},
        {"receiver", accuracy_receiver_name(config.accuracy_receiver)},
        {"trials", config.accuracy_trials},
        {"mode", config.accuracy_exact ? "exact" : "monte-carlo"}}},
  };
}

json game_json(const InputTable& inputs, const ProtocolTable& table, const RunConfig& config) {
  const GameSpec spec = make_spec(config, inputs);
  json out{{"kind", to_string(spec.kind)}};
  if (spec.kind != GameKind::Reconstruction && spec.kind != GameKind::Global) out["candidates"] = spec.candidates;
  const bool info = is_information_game(spec.kind);
  out["objective"] = guarded([&]() -> json {
    const double v = objective_value(table.protocol, inputs.space, spec);
    return info ? in_base(v, config.log_base) : v;
  });
  const Receiver receiver = synchronized_receiver(table.protocol, inputs.space, spec);
  const LossReport loss = evaluate_game(table.protocol, receiver, inputs.space, spec, eval_options(config, config.seed));
  out["synchronized_loss"] = info ? loss_json(loss.expected, config.log_base) : json(loss.expected.nats);
  out["evaluation"] = to_string(loss.mode);
  if (loss.mode == EvalMode::MonteCarlo) {
    out["samples"] = loss.samples;
    out["standard_error"] = info ? in_base(loss.standard_error, config.log_base) : loss.standard_error;
  }
  return out;
}

json spatial_json(const SpatialReport& r) {
  json thresholds = json::array();
  for (const auto& t : r.thresholds)
    thresholds.push_back({{"epsilon", t.epsilon},
                          {"holds", t.holds},
                          {"boundary", t.boundary},
                          {"vacuous", t.vacuous},
                          {"conditional", t.conditional},
                          {"unconditional", t.unconditional},
                          {"pair_mass", t.pair_mass}});
  return json{{"meaningful", r.meaningful},
              {"epsilon0", r.epsilon0},
              {"epsilon_m", r.epsilon_m},
              {"thresholds", thresholds},
              {"warnings", r.warnings}};
}

json consistency_json(const SemanticConsistencyReport& r) {
  return json{{"consistent", r.consistent},
              {"boundary", r.boundary},
              {"explained", r.explained},
              {"unexplained", r.unexplained},
              {"total", r.total}};
}

// Verification checks -------------------------------------------------------

struct Verdict {
  json body;
  bool verdict = false;
};

InstanceLimits oracle_limits(bool uniform) {
  InstanceLimits limits;
  limits.uniform = uniform;
  return limits;
}

/// Balanced labels for a uniform space: the smallest label count >= 2 that
/// divides N.
LabelMap balanced_labels_for(std::uint64_t seed, std::uint64_t index, std::size_t n) {
  std::size_t count = 2;
  while (n % count != 0) ++count;
  Rng rng = substream(seed, "labels", index);
  return random_balanced_labels(rng, n, count);
}

double label_entropy(const LabelMap& labels, const InputSpace& space) {
  std::vector<double> mass(labels.label_count(), 0.0);
  for (Index i = 0; i < space.size(); ++i) mass[labels[i]] += space.weight(i);
  return entropy(mass);
}

Verdict oracle_check(const std::string& name, const RunConfig& config) {
  const bool needs_labels = name == "supervised-oracle" || name == "classification-oracle";
  double max_gap = 0.0, max_z = 0.0;
  std::size_t infinite = 0, monte_carlo = 0, failures = 0;
  const unsigned d = name == "supervised-oracle" ? 2u : config.candidates;
  for (std::size_t i = 0; i < config.instances; ++i) {
    const RandomInstance inst = random_instance(config.seed, i, oracle_limits(needs_labels));
    const Protocol& p = inst.protocol;
    const InputSpace& space = inst.space;
    LossReport loss;
    double closed = 0.0;
    if (name == "reconstruction-oracle") {
      loss = eval_reconstruction(p, synchronized_reconstruction_receiver(p, space), space);
      closed = reco_objective(p, space);
    } else if (name == "discrimination-oracle") {
      loss = eval_discrimination(p, synchronized_discrimination_receiver(p, d), space, d,
                                 eval_options(config, config.seed + i));
      closed = disc_objective(p, space, d).value;
    } else if (name == "global-oracle") {
      loss = eval_global(p, synchronized_global_receiver(p, space), space);
      closed = entropy(space.weights()) + global_objective(p, space);
    } else if (name == "supervised-oracle") {
      const LabelMap labels = balanced_labels_for(config.seed, i, space.size());
      const double y = static_cast<double>(labels.label_count());
      loss = eval_supervised(p, synchronized_supervised_receiver(p, labels, 2), space, labels, 2,
                             eval_options(config, config.seed + i));
      closed = std::numbers::ln2 * y / (y - 1.0) * supervised_objective(p, space, labels).value;
    } else {
      const LabelMap labels = balanced_labels_for(config.seed, i, space.size());
      loss = eval_classification(p, synchronized_classification_receiver(p, space, labels), space, labels,
                                 eval_options(config, config.seed + i));
      closed = label_entropy(labels, space) + classification_objective(p, space, labels);
    }
    if (loss.expected.infinite) {
      ++infinite;
      ++failures;
      continue;
    }
    const double gap = std::abs(loss.expected.nats - closed);
    max_gap = std::max(max_gap, gap);
    if (loss.mode == EvalMode::MonteCarlo) {
      ++monte_carlo;
      const double z = loss.standard_error > 0.0 ? gap / loss.standard_error : (gap < 1e-10 ? 0.0 : HUGE_VAL);
      max_z = std::max(max_z, z);
      if (z > 4.0) ++failures;
    } else if (gap >= 1e-10) {
      ++failures;
    }
  }
  Verdict v;
  v.verdict = failures == 0;
  v.body = {{"instances", config.instances}, {"max_abs_gap", max_gap}, {"failures", failures},
            {"infinite_losses", infinite}, {"monte_carlo_instances", monte_carlo}};
  if (monte_carlo > 0) v.body["max_standard_errors"] = max_z;
  if (name == "discrimination-oracle" || name == "supervised-oracle") v.body["candidates"] = d;
  return v;
}

Receiver check_receiver(const Dataset& data, const RunConfig& config, const GameSpec& spec) {
  const ProtocolTable& table = require_protocol(data);
  if (config.receiver_path.empty()) return synchronized_receiver(table.protocol, data.inputs.space, spec);
  return receiver_from_json(json::parse(read_file(config.receiver_path)), table.messages, data.inputs.space.size());
}

Verdict balanced_optimality_check(const Dataset* data, const RunConfig& config) {
  std::vector<Point> line;
  for (std::size_t i = 0; i < config.n; ++i) line.push_back(Point{static_cast<double>(i)});
  const InputSpace space = data ? data->inputs.space : InputSpace::uniform(line);
  const std::size_t k = config.k;
  const unsigned d = config.candidates;
  GameSpec spec;
  spec.kind = GameKind::Discrimination;
  spec.candidates = d;
  ExhaustiveOptions opts;
  opts.budget = config.budget;
  opts.threads = config.threads;
  const auto search = exhaustive_search(space, k, spec, opts);

  // Every protocol whose messages all carry mass 1/K.
  const std::size_t n = space.size();
  std::vector<Index> code(n, 0);
  std::size_t equal_mass = 0, attaining = 0;
  double worst_gap = 0.0;
  while (true) {
    const Protocol p(code, k);
    const auto masses = message_probabilities(p, space);
    if (std::all_of(masses.begin(), masses.end(),
                    [&](double m) { return std::abs(m - 1.0 / static_cast<double>(k)) <= 1e-12; })) {
      ++equal_mass;
      const double gap = disc_objective(p, space, d).value - search.value;
      worst_gap = std::max(worst_gap, gap);
      if (gap <= 1e-12) ++attaining;
    }
    std::size_t pos = n;
    while (pos > 0 && ++code[pos - 1] == k) code[--pos] = 0;
    if (pos == 0) break;
  }
  const auto convex = convexity_check(d);
  bool optimum_uniform = false;
  for (const auto& p : search.optimal) {
    const auto masses = message_probabilities(p, space);
    optimum_uniform = optimum_uniform || std::all_of(masses.begin(), masses.end(), [&](double m) {
      return std::abs(m - 1.0 / static_cast<double>(k)) <= 1e-12;
    });
  }
  // Without an equal-mass protocol the claim has no content; only the true
  // optimum is reported.
  const bool applicable = equal_mass > 0;
  Verdict v;
  v.verdict = (!applicable || attaining == equal_mass) && convex.convex;
  v.body = {{"inputs", n},
            {"applicable", applicable},
            {"optimum_uniform", optimum_uniform},
            {"messages", k},
            {"candidates", d},
            {"optimum", search.value},
            {"equal_mass_protocols", equal_mass},
            {"attaining", attaining},
            {"worst_gap", worst_gap},
            {"convex", convex.convex},
            {"min_second_difference", convex.min_second_difference}};
  return v;
}

Verdict consistent_optima_check(const RunConfig& config) {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < config.instances; ++i) {
    InstanceLimits limits;
    limits.max_inputs = 7;
    limits.max_dimension = 2;
    limits.uniform = (i % 2) == 0;
    const RandomInstance inst = random_instance(config.seed, i, limits);
    const std::size_t k = 2 + i % 2;
    GameSpec spec;
    const auto search = exhaustive_search(inst.space, k, spec);
    for (const auto& p : search.optimal)
      if (!semantic_consistency(p, inst.space).consistent) {
        ++failures;
        break;
      }
  }
  Verdict v;
  v.verdict = failures == 0;
  v.body = {{"instances", config.instances}, {"inconsistent_instances", failures}};
  return v;
}

Verdict meaningful_senders_check(const RunConfig& config) {
  std::size_t failures = 0, attempts = 0;
  for (std::size_t i = 0; i < config.instances; ++i) {
    const auto inst = random_clustered_receiver(config.seed, i);
    attempts += inst.attempts;
    GameSpec spec;
    const auto sender = synchronized_sender(inst.receiver, inst.space, spec);
    if (!spatial_meaningfulness(sender.protocol, inst.space, inst.messages, inst.epsilon0).meaningful) ++failures;
  }
  Verdict v;
  v.verdict = failures == 0;
  v.body = {{"instances", config.instances}, {"counterexamples", failures}, {"generator_attempts", attempts}};
  return v;
}

Verdict run_check(const std::string& name, const Dataset* data, const RunConfig& config) {
  auto need = [&]() -> const Dataset& {
    if (!data) throw PreconditionError("check '" + name + "' needs an input space and protocol");
    return *data;
  };
  if (name.size() > 7 && name.compare(name.size() - 7, 7, "-oracle") == 0) return oracle_check(name, config);
  if (name == "semantic-consistency") {
    const Dataset& d = need();
    const auto r = semantic_consistency(require_protocol(d).protocol, d.inputs.space);
    return {consistency_json(r), r.consistent};
  }
  if (name == "spatial-meaningfulness") {
    const Dataset& d = need();
    const auto& t = require_protocol(d);
    const double eps0 = config.epsilon0.value_or(epsilon_m(t.messages));
    const auto r = spatial_meaningfulness(t.protocol, d.inputs.space, t.messages, eps0);
    return {spatial_json(r), r.meaningful};
  }
  if (name == "simplicity") {
    const Dataset& d = need();
    const auto& t = require_protocol(d);
    const GameSpec spec = make_spec(config, d.inputs);
    const Receiver receiver = check_receiver(d, config, spec);
    const double eps0 = config.epsilon0.value_or(epsilon_m(t.messages));
    ReceiverTable rows;
    if (const auto* r = std::get_if<ReconstructionReceiver>(&receiver))
      rows = receiver_table(*r);
    else if (const auto* r = std::get_if<DiscriminationReceiver>(&receiver))
      rows = receiver_table(*r, d.inputs.space.size());
    else
      throw PreconditionError("simplicity is defined for reconstruction and discrimination receivers");
    const auto r = receiver_simplicity(rows, t.messages, d.inputs.space, eps0);
    json body{{"k", r.k}, {"worst_ratio", r.worst_ratio}, {"unbounded", r.unbounded}, {"epsilon0", eps0},
              {"diagnostic", r.diagnostic}, {"embedding", r.embedding}};
    return {body, r.simple};
  }
  if (name == "non-degeneracy") {
    const Dataset& d = need();
    const GameSpec spec = make_spec(config, d.inputs);
    const Receiver receiver = check_receiver(d, config, spec);
    const auto r = non_degeneracy(receiver, d.inputs.space, spec, eval_options(config, config.seed));
    const bool info = is_information_game(spec.kind);
    json body{{"sup_loss", info ? loss_json(r.sup_loss, config.log_base) : json(r.sup_loss.nats)},
              {"constant_loss", info ? in_base(r.constant_loss, config.log_base) : r.constant_loss}};
    return {body, r.non_degenerate};
  }
  if (name == "balanced-optimality") return balanced_optimality_check(data, config);
  if (name == "consistent-reconstruction-optima") return consistent_optima_check(config);
  if (name == "anticonsistent-optimal") {
    const InputSpace space = data ? data->inputs.space : four_point_line();
    const auto r = verify_anticonsistent_optimal(space, config.k);
    json steps = json::array();
    for (const auto& s : r.steps) steps.push_back({{"id", s.id}, {"passed", s.passed}, {"values", s.values}});
    return {json{{"steps", steps}}, r.passed()};
  }
  if (name == "meaningful-synchronized-senders") return meaningful_senders_check(config);
  throw PreconditionError("unknown check '" + name + "'");
}

json steps_json(const VerificationReport& report) {
  json steps = json::array();
  for (const auto& s : report.steps)
    steps.push_back({{"id", s.id}, {"claim", s.claim}, {"passed", s.passed}, {"values", s.values}, {"detail", s.detail}});
  return steps;
}

InputTable table_of(const InputSpace& space) {
  std::vector<std::string> ids;
  for (Index i = 0; i < space.size(); ++i) ids.push_back(std::to_string(i));
  return InputTable{std::move(ids), space, {}, {}};
}

json round_floats(const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      json out = json::object();
      for (const auto& [k, v] : j.items()) out[k] = round_floats(v);
      return out;
    }
    case json::value_t::array: {
      json out = json::array();
      for (const auto& v : j) out.push_back(round_floats(v));
      return out;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isnan(v)) return "nan";
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      const double r = std::strtod(buf, nullptr);
      return r == 0.0 ? 0.0 : r;
    }
    default: return j;
  }
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
  }
  if (v.is_number()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  return "error";
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  if (key == "game") game = parse_game_kind(value);
  else if (key == "candidates") candidates = parse_unsigned<unsigned>(key, value);
  else if (key == "label") label = std::string(value);
  else if (key == "message_metric") {
    if (value == "hamming") message_metric = MessageMetric::Hamming;
    else if (value == "euclidean") message_metric = MessageMetric::Euclidean;
    else throw PreconditionError("message_metric must be hamming or euclidean");
  } else if (key == "vocab") vocab = parse_unsigned<unsigned>(key, value);
  else if (key == "seed") seed = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "samples") samples = parse_unsigned<std::size_t>(key, value);
  else if (key == "eval") {
    if (value == "exact") eval_mode = EvalMode::Exact;
    else if (value == "monte-carlo") eval_mode = EvalMode::MonteCarlo;
    else if (value == "auto") eval_mode = EvalMode::Auto;
    else throw PreconditionError("eval must be exact, monte-carlo or auto");
  } else if (key == "log_base") {
    if (value == "nats") log_base = LogBase::Nats;
    else if (value == "bits") log_base = LogBase::Bits;
    else throw PreconditionError("log_base must be nats or bits");
  } else if (key == "log_level") {
    if (value != "error" && value != "warn" && value != "info") throw PreconditionError("log_level must be error, warn or info");
    log_level = std::string(value);
  } else if (key == "metrics") {
    metrics.clear();
    for (auto& name : split(value, ',')) {
      if (std::find(metric_names().begin(), metric_names().end(), name) == metric_names().end())
        throw PreconditionError("unknown metric '" + name + "'");
      metrics.push_back(name);
    }
  } else if (key == "accuracy_candidates") accuracy_candidates = parse_unsigned<unsigned>(key, value);
  else if (key == "accuracy_trials") accuracy_trials = parse_unsigned<std::size_t>(key, value);
  else if (key == "accuracy_receiver") accuracy_receiver = parse_accuracy_receiver(value);
  else if (key == "accuracy_exact") accuracy_exact = parse_bool(key, value);
  else if (key == "baseline_repeats") baseline_repeats = parse_unsigned<std::size_t>(key, value);
  else if (key == "group_size") group_size = parse_unsigned<unsigned>(key, value);
  else if (key == "method") {
    if (value != "kmeans" && value != "exhaustive" && value != "balanced")
      throw PreconditionError("method must be kmeans, exhaustive or balanced");
    method = std::string(value);
  } else if (key == "k") k = parse_unsigned<std::size_t>(key, value);
  else if (key == "flavor") {
    parse_partition_flavor(value);
    flavor = std::string(value);
  } else if (key == "init") {
    init.clear();
    if (value == "random") return;
    for (const auto& centroid : split(value, ';')) {
      Point p;
      for (const auto& c : split(centroid, ',')) p.push_back(parse_double(key, c));
      init.push_back(std::move(p));
    }
  } else if (key == "max_iters") max_iters = parse_unsigned<std::size_t>(key, value);
  else if (key == "budget") budget = parse_double(key, value);
  else if (key == "threads") threads = parse_unsigned<unsigned>(key, value);
  else if (key == "check") {
    if (std::find(verify_check_names().begin(), verify_check_names().end(), value) == verify_check_names().end())
      throw PreconditionError("unknown check '" + std::string(value) + "'");
    checks.emplace_back(value);
  } else if (key == "expect") expect = parse_bool(key, value);
  else if (key == "epsilon0") epsilon0 = parse_double(key, value);
  else if (key == "instances") instances = parse_unsigned<std::size_t>(key, value);
  else if (key == "n") n = parse_unsigned<std::size_t>(key, value);
  else if (key == "receiver") receiver_path = std::string(value);
  else if (key == "which") {
    if (value != "spatial" && value != "anticonsistent") throw PreconditionError("which must be spatial or anticonsistent");
    which = std::string(value);
  } else throw PreconditionError("unknown option '" + std::string(key) + "'");
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"unique_messages", "disc_accuracy",  "topsim", "message_variance",
                                              "baseline_mean",   "baseline_std",   "purity", "max_purity",
                                              "posdis",          "bosdis",         "sposdis", "cluster_variance"};
  return names;
}

const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{
      "reconstruction-oracle", "discrimination-oracle", "global-oracle",         "supervised-oracle",
      "classification-oracle", "semantic-consistency",  "spatial-meaningfulness", "simplicity",
      "non-degeneracy",        "balanced-optimality",   "consistent-reconstruction-optima",
      "anticonsistent-optimal", "meaningful-synchronized-senders"};
  return names;
}

Dataset load_dataset(const std::string& inputs_path, const std::string& protocol_path, const std::string& labels_path,
                     const RunConfig& config) {
  Dataset data{load_inputs(inputs_path), std::nullopt};
  if (!labels_path.empty()) {
    auto [names, maps] = load_labels(labels_path, data.inputs.ids);
    for (std::size_t a = 0; a < names.size(); ++a) {
      if (std::find(data.inputs.attribute_names.begin(), data.inputs.attribute_names.end(), names[a]) !=
          data.inputs.attribute_names.end())
        throw ParseError("label '" + names[a] + "' is defined twice", 1, 1);
      data.inputs.attribute_names.push_back(names[a]);
      data.inputs.attributes.push_back(std::move(maps[a]));
    }
  }
  if (!protocol_path.empty()) {
    ProtocolOptions options;
    options.metric = config.message_metric;
    options.vocab = config.vocab;
    data.protocol = load_protocol(protocol_path, data.inputs.ids, options);
  }
  return data;
}

RunOutput run_metrics(const Dataset& data, const RunConfig& config) {
  const ProtocolTable& table = require_protocol(data);
  std::vector<std::string> warnings;
  RunOutput out;
  out.report = header("metrics", config);
  const json metrics = metrics_json(data.inputs, table, config, warnings);
  for (const auto& [k, v] : metrics.items()) out.report[k] = v;
  out.report["conventions"] = conventions(config, table.messages);
  out.report["warnings"] = warnings;
  out.files["metrics.csv"] = metrics_csv(metrics);
  return out;
}

RunOutput run_analyze(const Dataset& data, const RunConfig& config) {
  const ProtocolTable& table = require_protocol(data);
  std::vector<std::string> warnings;
  RunOutput out;
  out.report = header("analyze", config);
  const InputSpace& space = data.inputs.space;
  out.report["inputs"] = {{"count", space.size()},
                          {"dimension", space.dimension()},
                          {"uniform", space.is_uniform()},
                          {"variance", input_variance(space)},
                          {"attributes", data.inputs.attribute_names}};
  out.report["protocol"] = {{"message_space_size", table.messages.size()},
                            {"unique_messages", unique_messages(table.protocol)},
                            {"message_metric", table.messages.has_symbols() ? "hamming" : "euclidean"}};
  const json metrics = metrics_json(data.inputs, table, config, warnings);
  out.report["metrics"] = metrics;
  out.report["conventions"] = conventions(config, table.messages);
  out.report["game"] = guarded([&]() -> json { return game_json(data.inputs, table, config); });
  out.report["consistency"] = consistency_json(semantic_consistency(table.protocol, space));
  if (config.epsilon0) {
    out.report["spatial"] = guarded([&]() -> json {
      auto r = spatial_meaningfulness(table.protocol, space, table.messages, *config.epsilon0);
      warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
      return spatial_json(r);
    });
  }
  out.report["warnings"] = warnings;
  out.files["metrics.csv"] = metrics_csv(metrics);
  return out;
}

RunOutput run_verify(const Dataset* data, const RunConfig& config) {
  if (config.checks.empty()) throw PreconditionError("verify needs at least one check");
  RunOutput out;
  out.report = header("verify", config);
  json verdicts = json::array();
  bool all = true;
  for (const auto& name : config.checks) {
    Verdict v = run_check(name, data, config);
    v.body["check"] = name;
    v.body["verdict"] = v.verdict;
    if (config.expect) {
      v.body["expected"] = *config.expect;
      if (v.verdict != *config.expect) out.expectations_met = false;
    }
    all = all && v.verdict;
    verdicts.push_back(std::move(v.body));
  }
  out.report["verdicts"] = verdicts;
  out.report["all_true"] = all;
  if (config.expect) out.report["expectations_met"] = out.expectations_met;
  return out;
}

RunOutput run_optimize(const Dataset& data, const RunConfig& config) {
  const InputSpace& space = data.inputs.space;
  const std::size_t k = config.k;
  if (k < 1) throw PreconditionError("k must be positive");
  const GameSpec spec = make_spec(config, data.inputs);
  RunOutput out;
  out.report = header("optimize", config);
  out.report["method"] = config.method;
  out.report["game"] = to_string(spec.kind);
  out.report["k"] = k;

  std::optional<Protocol> best;
  std::vector<double> trace;
  if (config.method == "kmeans") {
    if (spec.kind != GameKind::Reconstruction) throw PreconditionError("k-means optimizes the reconstruction game");
    const KMeansInit init = config.init.empty() ? KMeansInit(RandomInit{config.seed}) : KMeansInit(config.init);
    const auto r = kmeans_alternation(space, k, init, config.max_iters);
    best = r.protocol;
    trace = r.trace;
    out.report["rounds"] = r.rounds;
    out.report["converged"] = r.converged;
    out.report["reseeds"] = r.reseeds;
  } else if (config.method == "exhaustive") {
    ExhaustiveOptions opts;
    opts.budget = config.budget;
    opts.threads = config.threads;
    const auto r = exhaustive_search(space, k, spec, opts);
    best = r.optimal.front();
    trace = {r.value};
    out.report["evaluated"] = r.evaluated;
    out.report["optimal_protocols"] = r.optimal.size();
    out.report["distinct_partitions"] = r.canonical.size();
  } else {
    best = balanced_partition(space, k, parse_partition_flavor(config.flavor));
    out.report["flavor"] = config.flavor;
  }

  const bool info = is_information_game(spec.kind);
  const double objective = objective_value(*best, space, spec);
  out.report["objective"] = info ? in_base(objective, config.log_base) : objective;
  if (trace.empty()) trace = {objective};
  json trace_json = json::array();
  std::string trace_csv = "step,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double v = info ? in_base(trace[i], config.log_base) : trace[i];
    trace_json.push_back(v);
    trace_csv += std::to_string(i) + "," + csv_cell(json(v)) + "\n";
  }
  out.report["trace"] = trace_json;

  const ProtocolTable table{*best, MessageSpace::symbol_product(static_cast<unsigned>(std::max<std::size_t>(k, 2)), 1)};
  std::vector<std::string> warnings;
  const json metrics = metrics_json(data.inputs, table, config, warnings);
  out.report["metrics"] = metrics;
  out.report["warnings"] = warnings;
  out.files["protocol.csv"] = protocol_csv(data.inputs.ids, table.protocol, table.messages);
  out.files["trace.csv"] = trace_csv;
  out.files["metrics.csv"] = metrics_csv(metrics);
  return out;
}

RunOutput run_counterexample(const Dataset* data, const RunConfig& config) {
  RunOutput out;
  out.report = header("counterexample", config);
  out.report["which"] = config.which;
  VerificationReport report;
  if (config.which == "spatial") {
    const auto ce = build_spatial_counterexample();
    report = verify_spatial_counterexample();
    const InputTable table = table_of(ce.space);
    out.files["inputs.csv"] = inputs_csv(table);
    out.files["protocol.csv"] = protocol_csv(table.ids, ce.sender, ce.messages);
    out.files["receiver.json"] = dump_report(receiver_json(ce.receiver, ce.messages, ce.space.size()));
    out.report["epsilon0"] = ce.epsilon0;
  } else {
    const InputSpace space = data ? data->inputs.space : four_point_line();
    const Protocol p = build_anticonsistent_optimal(space, config.k);
    report = verify_anticonsistent_optimal(space, config.k);
    const InputTable table = data ? data->inputs : table_of(space);
    const auto messages = MessageSpace::symbol_product(static_cast<unsigned>(std::max<std::size_t>(config.k, 2)), 1);
    out.files["inputs.csv"] = inputs_csv(table);
    out.files["protocol.csv"] = protocol_csv(table.ids, p, messages);
    out.report["k"] = config.k;
  }
  out.report["steps"] = steps_json(report);
  out.report["passed"] = report.passed();
  if (config.expect) {
    out.expectations_met = report.passed() == *config.expect;
    out.report["expected"] = *config.expect;
  }
  return out;
}

RunOutput run_command(std::string_view command, const Dataset* data, const RunConfig& config) {
  auto need = [&]() -> const Dataset& {
    if (!data) throw PreconditionError(std::string(command) + " needs an input space");
    return *data;
  };
  if (command == "analyze") return run_analyze(need(), config);
  if (command == "metrics") return run_metrics(need(), config);
  if (command == "verify") return run_verify(data, config);
  if (command == "optimize") return run_optimize(need(), config);
  if (command == "counterexample") return run_counterexample(data, config);
  throw PreconditionError("unknown command '" + std::string(command) + "'");
}

std::string dump_report(const json& report) { return round_floats(report).dump(2) + "\n"; }

std::string metrics_csv(const json& metrics) {
  std::string head, row;
  for (const auto& name : metric_names()) {
    if (!metrics.contains(name)) continue;
    if (!head.empty()) {
      head += ",";
      row += ",";
    }
    head += name;
    row += csv_cell(metrics[name]);
  }
  return head + "\n" + row + "\n";
}

}  // namespace semcomm
