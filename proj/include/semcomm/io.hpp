// SPDX-License-Identifier: Apache-2.0
//
// Input-space, protocol, label and receiver files. CSV and JSON mirrors of
// the same schemas; malformed files raise ParseError with line and column.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semcomm/games.hpp"

namespace semcomm {

/// Parsed input-space file. CSV header: `id,x0,x1,...[,weight][,label...]`.
/// Columns named `label*` are attributes, the first one the primary label.
/// A missing weight column means a uniform prior; weights summing to 1
/// within 1e-6 are renormalized.
struct InputTable {
  std::vector<std::string> ids;
  InputSpace space;
  std::vector<std::string> attribute_names;
  std::vector<LabelMap> attributes;
};

InputTable parse_inputs_csv(std::string_view text);
/// `{"inputs": [{"id": .., "x": [..], "weight": .., "labels": {name: value}}]}`;
/// weight and labels are optional.
InputTable parse_inputs_json(std::string_view text);
InputTable load_inputs(const std::string& path);

struct ProtocolOptions {
  MessageMetric metric = MessageMetric::Hamming;
  /// Lower bound on the vocabulary; the file's largest symbol raises it.
  unsigned vocab = 0;
  /// Above this many messages the product space is replaced by the list of
  /// messages that occur.
  double product_limit = 1e5;
};

struct ProtocolTable {
  Protocol protocol;
  MessageSpace messages;
};

/// CSV `id,message` with one row per input id. Symbol messages are strings
/// such as `0371`; Euclidean messages are coordinates joined by ';'.
ProtocolTable parse_protocol_csv(std::string_view text, const std::vector<std::string>& ids,
                                 const ProtocolOptions& options = {});
/// `{"assignment": [{"id": .., "message": ..}]}`.
ProtocolTable parse_protocol_json(std::string_view text, const std::vector<std::string>& ids,
                                  const ProtocolOptions& options = {});
ProtocolTable load_protocol(const std::string& path, const std::vector<std::string>& ids,
                            const ProtocolOptions& options = {});

/// CSV `id,label[,label...]`; returns names and maps in column order.
std::pair<std::vector<std::string>, std::vector<LabelMap>> parse_labels_csv(std::string_view text,
                                                                            const std::vector<std::string>& ids);
std::pair<std::vector<std::string>, std::vector<LabelMap>> load_labels(const std::string& path,
                                                                       const std::vector<std::string>& ids);

std::string protocol_csv(const std::vector<std::string>& ids, const Protocol& protocol, const MessageSpace& messages);
std::string inputs_csv(const InputTable& table);

/// Discrimination receivers serialize as dense tables of at most `max_rows`.
nlohmann::json receiver_json(const Receiver& receiver, const MessageSpace& messages, std::size_t input_count,
                             double max_rows = 1e6);
Receiver receiver_from_json(const nlohmann::json& doc, const MessageSpace& messages, std::size_t input_count);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace semcomm
