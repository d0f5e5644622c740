// SPDX-License-Identifier: Apache-2.0
//
// semcomm: command-line front end over the C API.
//
// Exit codes: 0 success, 1 usage or precondition error or unmet --expect,
// 2 parse error, 3 budget exceeded, 5 internal error.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "semcomm/semcomm.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 5;

int exit_code(sc_status s) {
  switch (s) {
    case SC_OK: return 0;
    case SC_ERR_PARSE: return kExitParse;
    case SC_ERR_BUDGET: return kExitBudget;
    case SC_ERR_INTERNAL: return kExitInternal;
    default: return kExitUsage;
  }
}

struct Failure {
  int code;
};

void check(sc_status s) {
  if (s == SC_OK) return;
  std::cerr << "semcomm: " << sc_last_error() << "\n";
  throw Failure{exit_code(s)};
}

/// Option values forwarded verbatim to sc_config_set when given.
struct Forward {
  std::string key;
  std::vector<std::string> values;
  CLI::Option* option = nullptr;
};

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::unique_ptr<Forward>> forwards;
  std::string inputs, protocol, labels;

  void forward(const std::string& flag, const std::string& key, const std::string& help) {
    auto f = std::make_unique<Forward>();
    f->key = key;
    f->option = app->add_option(flag, f->values, help);
    forwards.push_back(std::move(f));
  }
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "semcomm: cannot write " << path << "\n";
    throw Failure{kExitUsage};
  }
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analyze, verify and optimize communication protocols over finite input spaces."};
  app.require_subcommand(1);

  std::string seed = "0", samples = "200000", out_dir, format = "json", log_base = "nats", log_level = "warn";
  app.add_option("--seed", seed, "RNG seed recorded in every report")->capture_default_str();
  app.add_option("--samples", samples, "Monte-Carlo sample budget")->capture_default_str();
  app.add_option("--out", out_dir, "Directory for report.json and artifacts; stdout when omitted");
  app.add_option("--format", format, "Stdout format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--log-base", log_base, "Unit of reported losses")
      ->check(CLI::IsMember({"nats", "bits"}))
      ->capture_default_str();
  app.add_option("--log-level", log_level, "Warnings go to stderr at warn and info")
      ->check(CLI::IsMember({"error", "warn", "info"}))
      ->capture_default_str();

  std::vector<std::pair<std::string, Command>> commands;
  commands.reserve(5);  // options bind to members; no reallocation after this
  auto add = [&](const std::string& name, const std::string& help) -> Command& {
    commands.emplace_back(name, Command{});
    Command& c = commands.back().second;
    c.app = app.add_subcommand(name, help);
    return c;
  };
  auto add_data = [](Command& c, bool required_inputs, bool protocol) {
    auto* in = c.app->add_option("--inputs", c.inputs, "Input-space CSV or JSON");
    if (required_inputs) in->required();
    if (protocol) c.app->add_option("--protocol", c.protocol, "Protocol CSV or JSON")->required(required_inputs);
    c.app->add_option("--labels", c.labels, "Labels CSV: id,<attribute>...");
    c.forward("--message-metric", "message_metric", "hamming (symbol strings) or euclidean (';'-joined vectors)");
    c.forward("--vocab", "vocab", "Minimum vocabulary size");
  };
  auto add_game = [](Command& c) {
    c.forward("--game", "game", "reconstruction, discrimination, global, supervised or classification");
    c.forward("--d", "candidates", "Number of candidates");
    c.forward("--label", "label", "Attribute used as the label");
    c.forward("--eval", "eval", "exact, monte-carlo or auto");
  };
  auto add_metrics = [](Command& c) {
    c.forward("--metrics", "metrics", "Comma-separated metric names; all by default");
    c.forward("--accuracy-candidates", "accuracy_candidates", "Candidates per accuracy episode");
    c.forward("--accuracy-trials", "accuracy_trials", "Accuracy episodes per input");
    c.forward("--accuracy-receiver", "accuracy_receiver", "synchronized or reconstruction-nearest");
    c.forward("--accuracy-exact", "accuracy_exact", "Enumerate every accuracy episode");
    c.forward("--baseline-repeats", "baseline_repeats", "Shuffles for the random baseline");
    c.forward("--group-size", "group_size", "Symbols per cluster-variance group");
  };

  Command& analyze = add("analyze", "Metrics, game losses and consistency of a protocol");
  add_data(analyze, true, true);
  add_game(analyze);
  add_metrics(analyze);
  analyze.forward("--epsilon0", "epsilon0", "Also check spatial meaningfulness up to this threshold");

  Command& metrics = add("metrics", "Flat metric report of a protocol");
  add_data(metrics, true, true);
  add_metrics(metrics);
  metrics.forward("--label", "label", "Attribute used for purity");

  Command& verify = add("verify", "Run named verification checks");
  add_data(verify, false, true);
  add_game(verify);
  verify.forward("--check", "check", "Check name; repeatable");
  verify.forward("--expect", "expect", "Expected verdict of every check (pass or fail); mismatches exit 1");
  verify.forward("--epsilon0", "epsilon0", "Threshold bound; defaults to the minimal message distance");
  verify.forward("--instances", "instances", "Random instances for population checks");
  verify.forward("--n", "n", "Inputs of the default line space");
  verify.forward("--k", "k", "Messages");
  verify.forward("--receiver", "receiver", "Receiver JSON; the synchronized receiver when omitted");
  verify.forward("--budget", "budget", "Enumeration budget");
  verify.forward("--threads", "threads", "Enumeration threads; 0 for all cores");

  Command& optimize = add("optimize", "Search for an optimal protocol");
  add_data(optimize, true, false);
  add_game(optimize);
  add_metrics(optimize);
  optimize.forward("--method", "method", "kmeans, exhaustive or balanced");
  optimize.forward("--k", "k", "Messages");
  optimize.forward("--flavor", "flavor", "greedy-uniform or adversarial-antipodal");
  optimize.forward("--init", "init", "random, or centroids as 'x,y;x,y'");
  optimize.forward("--max-iters", "max_iters", "k-means round limit");
  optimize.forward("--budget", "budget", "Enumeration budget");
  optimize.forward("--threads", "threads", "Enumeration threads; 0 for all cores");

  Command& counterexample = add("counterexample", "Build and verify an explicit instance");
  add_data(counterexample, false, false);
  counterexample.forward("--which", "which", "spatial or anticonsistent");
  counterexample.forward("--k", "k", "Messages of the anticonsistent protocol");
  counterexample.forward("--expect", "expect", "Expected overall verdict; a mismatch exits 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Command* selected = nullptr;
    std::string name;
    for (auto& [n, c] : commands)
      if (c.app->parsed()) {
        selected = &c;
        name = n;
      }

    sc_config* raw_config = nullptr;
    check(sc_config_new(&raw_config));
    std::unique_ptr<sc_config, decltype(&sc_config_free)> config(raw_config, sc_config_free);
    check(sc_config_set(config.get(), "seed", seed.c_str()));
    check(sc_config_set(config.get(), "samples", samples.c_str()));
    check(sc_config_set(config.get(), "log_base", log_base.c_str()));
    check(sc_config_set(config.get(), "log_level", log_level.c_str()));
    for (const auto& f : selected->forwards)
      for (const auto& v : f->values) check(sc_config_set(config.get(), f->key.c_str(), v.c_str()));

    std::unique_ptr<sc_dataset, decltype(&sc_dataset_free)> dataset(nullptr, sc_dataset_free);
    if (!selected->inputs.empty()) {
      sc_dataset* raw = nullptr;
      check(sc_dataset_load(selected->inputs.c_str(), selected->protocol.c_str(), selected->labels.c_str(),
                            config.get(), &raw));
      dataset.reset(raw);
    }

    sc_output* raw_output = nullptr;
    check(sc_run(name.c_str(), dataset.get(), config.get(), &raw_output));
    std::unique_ptr<sc_output, decltype(&sc_output_free)> output(raw_output, sc_output_free);

    const char* report = nullptr;
    check(sc_output_report(output.get(), &report));
    std::size_t count = 0;
    check(sc_output_file_count(output.get(), &count));
    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t i = 0; i < count; ++i) {
      const char* file = nullptr;
      const char* content = nullptr;
      check(sc_output_file(output.get(), i, &file, &content));
      files.emplace_back(file, content);
    }

    if (log_level != "error") {
      const auto doc = nlohmann::json::parse(report);
      if (doc.contains("warnings"))
        for (const auto& w : doc["warnings"]) std::cerr << "semcomm: warning: " << w.get<std::string>() << "\n";
    }

    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_text(std::filesystem::path(out_dir) / "report.json", report);
      for (const auto& [file, content] : files) write_text(std::filesystem::path(out_dir) / file, content);
    } else if (format == "csv") {
      const std::string* csv = nullptr;
      for (const auto& [file, content] : files)
        if (file == "metrics.csv") csv = &content;
      if (!csv) {
        std::cerr << "semcomm: csv output is available for analyze, metrics and optimize\n";
        return kExitUsage;
      }
      std::cout << *csv;
    } else {
      std::cout << report;
    }

    int met = 1;
    check(sc_output_expectations_met(output.get(), &met));
    if (!met) {
      std::cerr << "semcomm: a verdict differs from --expect\n";
      return kExitUsage;
    }
    return 0;
  } catch (const Failure& f) {
    return f.code;
  }
}
