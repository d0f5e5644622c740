// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "semcomm/semcomm.h"

namespace {

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "semcomm_capi_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = scratch() / name;
  std::ofstream(path) << text;
  return path.string();
}

struct Handles {
  sc_config* config = nullptr;
  sc_dataset* dataset = nullptr;
  sc_output* output = nullptr;
  ~Handles() {
    sc_output_free(output);
    sc_dataset_free(dataset);
    sc_config_free(config);
  }
};

}  // namespace

TEST_CASE("version and null handling") {
  CHECK(std::string(sc_version()).size() > 0);
  CHECK(sc_config_new(nullptr) == SC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sc_last_error()).size() > 0);
  sc_config_free(nullptr);
  sc_dataset_free(nullptr);
  sc_output_free(nullptr);
}

TEST_CASE("config keys are validated") {
  Handles h;
  REQUIRE(sc_config_new(&h.config) == SC_OK);
  CHECK(sc_config_set(h.config, "game", "discrimination") == SC_OK);
  CHECK(sc_config_set(h.config, "game", "chess") == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_config_set(h.config, "no_such_key", "1") == SC_ERR_INVALID_ARGUMENT);
  CHECK(sc_config_set(h.config, nullptr, "1") == SC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("parse errors report line and column") {
  Handles h;
  REQUIRE(sc_config_new(&h.config) == SC_OK);
  const auto inputs = write("bad.csv", "id,x0\na,0\nb,oops\n");
  CHECK(sc_dataset_load(inputs.c_str(), "", "", h.config, &h.dataset) == SC_ERR_PARSE);
  CHECK(h.dataset == nullptr);
  CHECK(sc_last_error_line() == 3);
  CHECK(sc_last_error_column() == 3);
}

TEST_CASE("load, run and read artifacts") {
  Handles h;
  REQUIRE(sc_config_new(&h.config) == SC_OK);
  const auto inputs = write("line.csv", "id,x0\na,0\nb,1\nc,2\nd,3\n");
  const auto protocol = write("split.csv", "id,message\na,0\nb,0\nc,1\nd,1\n");
  REQUIRE(sc_dataset_load(inputs.c_str(), protocol.c_str(), nullptr, h.config, &h.dataset) == SC_OK);

  size_t n = 0;
  REQUIRE(sc_dataset_inputs(h.dataset, &n) == SC_OK);
  CHECK(n == 4);
  size_t assignment[4] = {};
  REQUIRE(sc_dataset_assignment(h.dataset, assignment, 4) == SC_OK);
  CHECK(assignment[0] == assignment[1]);
  CHECK(assignment[1] != assignment[2]);
  CHECK(sc_dataset_assignment(h.dataset, assignment, 3) == SC_ERR_INVALID_ARGUMENT);

  REQUIRE(sc_config_set(h.config, "metrics", "message_variance") == SC_OK);
  REQUIRE(sc_run("metrics", h.dataset, h.config, &h.output) == SC_OK);
  const char* report = nullptr;
  REQUIRE(sc_output_report(h.output, &report) == SC_OK);
  CHECK(std::string(report).find("\"message_variance\": 0.25") != std::string::npos);
  size_t files = 0;
  REQUIRE(sc_output_file_count(h.output, &files) == SC_OK);
  REQUIRE(files == 1);
  const char* name = nullptr;
  const char* content = nullptr;
  REQUIRE(sc_output_file(h.output, 0, &name, &content) == SC_OK);
  CHECK(std::string(name) == "metrics.csv");
  CHECK(std::string(content) == "message_variance\n0.25\n");
  CHECK(sc_output_file(h.output, 1, &name, &content) == SC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("commands without data and budget errors") {
  Handles h;
  REQUIRE(sc_config_new(&h.config) == SC_OK);
  REQUIRE(sc_config_set(h.config, "which", "anticonsistent") == SC_OK);
  REQUIRE(sc_config_set(h.config, "expect", "fail") == SC_OK);
  REQUIRE(sc_run("counterexample", nullptr, h.config, &h.output) == SC_OK);
  int met = 1;
  REQUIRE(sc_output_expectations_met(h.output, &met) == SC_OK);
  CHECK(met == 0);

  sc_output* other = nullptr;
  CHECK(sc_run("optimize", nullptr, h.config, &other) != SC_OK);
  CHECK(other == nullptr);
  CHECK(sc_run("dance", nullptr, h.config, &other) == SC_ERR_PRECONDITION);

  const auto inputs = write("twelve.csv", [] {
    std::string s = "id,x0\n";
    for (int i = 0; i < 12; ++i) s += "p" + std::to_string(i) + "," + std::to_string(i) + "\n";
    return s;
  }());
  REQUIRE(sc_dataset_load(inputs.c_str(), nullptr, nullptr, h.config, &h.dataset) == SC_OK);
  REQUIRE(sc_config_set(h.config, "method", "exhaustive") == SC_OK);
  REQUIRE(sc_config_set(h.config, "k", "5") == SC_OK);
  CHECK(sc_run("optimize", h.dataset, h.config, &other) == SC_ERR_BUDGET);
}
