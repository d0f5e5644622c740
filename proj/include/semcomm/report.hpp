// SPDX-License-Identifier: Apache-2.0
//
// Run configuration and the JSON/CSV reports behind every subcommand. The C
// API and the command-line tool are thin layers over these functions.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semcomm/io.hpp"
#include "semcomm/metrics.hpp"

namespace semcomm {

enum class LogBase { Nats, Bits };

struct RunConfig {
  // Game.
  GameKind game = GameKind::Reconstruction;
  unsigned candidates = 2;
  /// Attribute used as the label of supervised and classification play and
  /// of `purity`; empty selects the first attribute.
  std::string label;

  // Ingestion.
  MessageMetric message_metric = MessageMetric::Hamming;
  unsigned vocab = 0;

  // Randomness and evaluation.
  std::uint64_t seed = 0;
  std::size_t samples = 200000;
  EvalMode eval_mode = EvalMode::Auto;
  LogBase log_base = LogBase::Nats;
  std::string log_level = "warn";

  // Metrics.
  std::vector<std::string> metrics;
  unsigned accuracy_candidates = 41;
  std::size_t accuracy_trials = 1;
  AccuracyReceiver accuracy_receiver = AccuracyReceiver::Synchronized;
  bool accuracy_exact = false;
  std::size_t baseline_repeats = 100;
  unsigned group_size = 2;

  // Optimization.
  std::string method = "kmeans";
  std::size_t k = 2;
  std::string flavor = "greedy-uniform";
  /// Empty selects random initialization.
  std::vector<Point> init;
  std::size_t max_iters = 100;
  double budget = 1e7;
  unsigned threads = 0;

  // Verification.
  /// Check names such as "discrimination-oracle" or "semantic-consistency";
  /// see verify_check_names().
  std::vector<std::string> checks;
  std::optional<bool> expect;
  std::optional<double> epsilon0;
  std::size_t instances = 200;
  std::size_t n = 6;
  /// Receiver file for the simplicity and non-degeneracy checks; empty uses
  /// the synchronized receiver of the protocol.
  std::string receiver_path;

  // Counterexamples.
  std::string which = "spatial";

  /// Sets one option from its text form. Throws PreconditionError for unknown
  /// keys and malformed values.
  void set(std::string_view key, std::string_view value);
};

/// Names of the metrics in report column order.
const std::vector<std::string>& metric_names();

const std::vector<std::string>& verify_check_names();

struct Dataset {
  InputTable inputs;
  std::optional<ProtocolTable> protocol;
};

/// Loads the input space, then the optional protocol and label files.
Dataset load_dataset(const std::string& inputs_path, const std::string& protocol_path,
                     const std::string& labels_path, const RunConfig& config);

struct RunOutput {
  nlohmann::json report;
  /// Extra artifacts by file name, e.g. "protocol.csv".
  std::map<std::string, std::string> files;
  /// False when a verdict differs from `RunConfig::expect`.
  bool expectations_met = true;
};

RunOutput run_metrics(const Dataset& data, const RunConfig& config);
RunOutput run_analyze(const Dataset& data, const RunConfig& config);
RunOutput run_verify(const Dataset* data, const RunConfig& config);
RunOutput run_optimize(const Dataset& data, const RunConfig& config);
RunOutput run_counterexample(const Dataset* data, const RunConfig& config);

/// Dispatches on "analyze", "metrics", "verify", "optimize" or
/// "counterexample"; `data` may be null where inputs are optional.
RunOutput run_command(std::string_view command, const Dataset* data, const RunConfig& config);

/// Sorted keys, floats rounded to 12 significant digits, non-finite numbers
/// as strings, two-space indent and a trailing newline.
std::string dump_report(const nlohmann::json& report);

/// Header plus one row in metric column order; errors print as "error".
std::string metrics_csv(const nlohmann::json& metrics);

}  // namespace semcomm
