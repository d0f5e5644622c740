// SPDX-License-Identifier: Apache-2.0
#include "semcomm/semcomm.h"

#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "semcomm/report.hpp"

struct sc_config {
  semcomm::RunConfig config;
};

struct sc_dataset {
  semcomm::Dataset data;
};

struct sc_output {
  std::string report;
  std::vector<std::pair<std::string, std::string>> files;
  bool expectations_met = true;
};

namespace {

thread_local std::string last_error;
thread_local std::size_t last_line = 0;
thread_local std::size_t last_column = 0;

void clear_error() {
  last_error.clear();
  last_line = 0;
  last_column = 0;
}

sc_status fail(sc_status status, const char* message) {
  last_error = message;
  return status;
}

template <class F>
sc_status guard(F&& f) {
  clear_error();
  try {
    f();
    return SC_OK;
  } catch (const semcomm::ParseError& e) {
    last_line = e.line();
    last_column = e.column();
    return fail(SC_ERR_PARSE, e.what());
  } catch (const semcomm::BudgetError& e) {
    return fail(SC_ERR_BUDGET, e.what());
  } catch (const semcomm::PreconditionError& e) {
    return fail(SC_ERR_PRECONDITION, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SC_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SC_ERR_INTERNAL, e.what());
  }
}

std::string path_or_empty(const char* p) { return p ? std::string(p) : std::string(); }

}  // namespace

extern "C" {

const char* sc_last_error(void) { return last_error.c_str(); }
size_t sc_last_error_line(void) { return last_line; }
size_t sc_last_error_column(void) { return last_column; }
const char* sc_version(void) { return "1.0.0"; }

sc_status sc_config_new(sc_config** out) {
  if (!out) return fail(SC_ERR_INVALID_ARGUMENT, "null output pointer");
  return guard([&] { *out = new sc_config(); });
}

void sc_config_free(sc_config* config) { delete config; }

sc_status sc_config_set(sc_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  const sc_status s = guard([&] { config->config.set(key, value); });
  return s == SC_ERR_PRECONDITION ? SC_ERR_INVALID_ARGUMENT : s;
}

sc_status sc_dataset_load(const char* inputs_path, const char* protocol_path, const char* labels_path,
                          const sc_config* config, sc_dataset** out) {
  if (!inputs_path || !out) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const semcomm::RunConfig defaults;
    const semcomm::RunConfig& cfg = config ? config->config : defaults;
    *out = new sc_dataset{semcomm::load_dataset(inputs_path, path_or_empty(protocol_path),
                                                path_or_empty(labels_path), cfg)};
  });
}

void sc_dataset_free(sc_dataset* dataset) { delete dataset; }

sc_status sc_dataset_inputs(const sc_dataset* dataset, size_t* count) {
  if (!dataset || !count) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] { *count = dataset->data.inputs.space.size(); });
}

sc_status sc_dataset_assignment(const sc_dataset* dataset, size_t* out, size_t capacity) {
  if (!dataset || !out) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  if (!dataset->data.protocol) return fail(SC_ERR_PRECONDITION, "dataset has no protocol");
  const auto assignment = dataset->data.protocol->protocol.assignment();
  if (capacity < assignment.size()) return fail(SC_ERR_INVALID_ARGUMENT, "output buffer too small");
  return guard([&] {
    for (std::size_t i = 0; i < assignment.size(); ++i) out[i] = assignment[i];
  });
}

sc_status sc_run(const char* command, const sc_dataset* dataset, const sc_config* config, sc_output** out) {
  if (!command || !config || !out) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    auto result = semcomm::run_command(command, dataset ? &dataset->data : nullptr, config->config);
    auto* output = new sc_output();
    output->report = semcomm::dump_report(result.report);
    for (auto& [name, content] : result.files) output->files.emplace_back(name, std::move(content));
    output->expectations_met = result.expectations_met;
    *out = output;
  });
}

void sc_output_free(sc_output* output) { delete output; }

sc_status sc_output_report(const sc_output* output, const char** json) {
  if (!output || !json) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  clear_error();
  *json = output->report.c_str();
  return SC_OK;
}

sc_status sc_output_expectations_met(const sc_output* output, int* met) {
  if (!output || !met) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  clear_error();
  *met = output->expectations_met ? 1 : 0;
  return SC_OK;
}

sc_status sc_output_file_count(const sc_output* output, size_t* count) {
  if (!output || !count) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  clear_error();
  *count = output->files.size();
  return SC_OK;
}

sc_status sc_output_file(const sc_output* output, size_t index, const char** name, const char** content) {
  if (!output || !name || !content) return fail(SC_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= output->files.size()) return fail(SC_ERR_INVALID_ARGUMENT, "file index out of range");
  clear_error();
  *name = output->files[index].first.c_str();
  *content = output->files[index].second.c_str();
  return SC_OK;
}

}  // extern "C"
