// SPDX-License-Identifier: Apache-2.0
#include "semcomm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace semcomm {

using nlohmann::json;

namespace {

struct Field {
  std::string text;
  std::size_t column;
};

struct Row {
  std::vector<Field> fields;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
std::vector<Field> split_line(std::string_view line, std::size_t line_no) {
  std::vector<Field> out;
  std::size_t i = 0;
  while (true) {
    std::size_t start = i;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    Field f;
    f.column = start + 1;
    if (start < line.size() && line[start] == '"') {
      std::size_t j = start + 1;
      while (true) {
        if (j >= line.size()) throw ParseError("unterminated quoted field", line_no, f.column);
        if (line[j] == '"') {
          if (j + 1 < line.size() && line[j + 1] == '"') {
            f.text.push_back('"');
            j += 2;
            continue;
          }
          ++j;
          break;
        }
        f.text.push_back(line[j++]);
      }
      while (j < line.size() && (line[j] == ' ' || line[j] == '\t' || line[j] == '\r')) ++j;
      if (j < line.size() && line[j] != ',') throw ParseError("unexpected text after quoted field", line_no, j + 1);
      out.push_back(std::move(f));
      if (j >= line.size()) break;
      i = j + 1;
    } else {
      const std::size_t end = std::min(line.find(',', start), line.size());
      f.text = std::string(trim(line.substr(start, end - start)));
      out.push_back(std::move(f));
      if (end >= line.size()) break;
      i = end + 1;
    }
  }
  return out;
}

std::vector<Row> read_csv(std::string_view text) {
  std::vector<Row> rows;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty() && trim(line).front() != '#') rows.push_back({split_line(line, line_no), line_no});
    if (end >= text.size()) break;
    pos = end + 1;
  }
  if (rows.empty()) throw ParseError("empty file", 0, 0);
  return rows;
}

double parse_number(const Field& f, std::size_t line) {
  double value = 0.0;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  if (!f.text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (f.text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
    throw ParseError("expected a finite number, got '" + f.text + "'", line, f.column);
  return value;
}

void check_width(const Row& row, std::size_t width) {
  if (row.fields.size() != width)
    throw ParseError("expected " + std::to_string(width) + " fields, got " + std::to_string(row.fields.size()),
                     row.line, row.fields.empty() ? 1 : row.fields.back().column);
}

std::vector<double> normalize_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-6)
    throw ParseError("weights sum to " + std::to_string(total) + ", expected 1", 0, 0);
  for (double& w : weights) w /= total;
  return weights;
}

InputTable build_inputs(std::vector<std::string> ids, std::vector<Point> points, std::optional<std::vector<double>> weights,
                        std::vector<std::string> names, const std::vector<std::vector<std::string>>& label_columns) {
  if (ids.empty()) throw ParseError("no input rows", 0, 0);
  std::vector<std::string> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end())
    throw ParseError("duplicate input id '" + *dup + "'", 0, 0);
  InputSpace space = weights ? InputSpace(std::move(points), normalize_weights(std::move(*weights)))
                             : InputSpace::uniform(std::move(points));
  std::vector<LabelMap> attributes;
  for (const auto& column : label_columns) attributes.push_back(LabelMap::from_strings(column));
  return InputTable{std::move(ids), std::move(space), std::move(names), std::move(attributes)};
}

std::size_t line_of_offset(std::string_view text, std::size_t offset, std::size_t& column) {
  std::size_t line = 1, last_newline = 0;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i)
    if (text[i] == '\n') {
      ++line;
      last_newline = i + 1;
    }
  column = offset >= last_newline ? offset - last_newline + 1 : 1;
  return line;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t column = 0;
    const std::size_t line = line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0, column);
    throw ParseError(std::string("invalid JSON: ") + e.what(), line, column);
  }
}

template <class T>
T json_get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing key '" + key + "'", 0, 0);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + ": bad value for '" + key + "': " + e.what(), 0, 0);
  }
}

std::string json_scalar_string(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

InputTable parse_inputs_csv(std::string_view text) {
  const auto rows = read_csv(text);
  const Row& header = rows.front();
  if (header.fields.empty() || header.fields[0].text != "id")
    throw ParseError("header must start with 'id'", header.line, 1);
  std::vector<std::size_t> coord_cols, label_cols;
  std::optional<std::size_t> weight_col;
  std::vector<std::string> names;
  for (std::size_t c = 1; c < header.fields.size(); ++c) {
    const std::string& name = header.fields[c].text;
    if (name == "weight") {
      if (weight_col) throw ParseError("duplicate weight column", header.line, header.fields[c].column);
      weight_col = c;
    } else if (name.rfind("label", 0) == 0) {
      label_cols.push_back(c);
      names.push_back(name);
    } else if (name.size() > 1 && name[0] == 'x' &&
               std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      coord_cols.push_back(c);
    } else {
      throw ParseError("unknown column '" + name + "'", header.line, header.fields[c].column);
    }
  }
  if (coord_cols.empty()) throw ParseError("no coordinate columns (x0, x1, ...)", header.line, 1);

  std::vector<std::string> ids;
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<std::vector<std::string>> labels(label_cols.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    check_width(row, header.fields.size());
    if (row.fields[0].text.empty()) throw ParseError("empty id", row.line, row.fields[0].column);
    ids.push_back(row.fields[0].text);
    Point p;
    for (std::size_t c : coord_cols) p.push_back(parse_number(row.fields[c], row.line));
    points.push_back(std::move(p));
    if (weight_col) {
      const double w = parse_number(row.fields[*weight_col], row.line);
      if (!(w > 0.0)) throw ParseError("weights must be strictly positive", row.line, row.fields[*weight_col].column);
      weights.push_back(w);
    }
    for (std::size_t k = 0; k < label_cols.size(); ++k) labels[k].push_back(row.fields[label_cols[k]].text);
  }
  return build_inputs(std::move(ids), std::move(points),
                      weight_col ? std::optional<std::vector<double>>(std::move(weights)) : std::nullopt,
                      std::move(names), labels);
}

InputTable parse_inputs_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("inputs") || !doc["inputs"].is_array())
    throw ParseError("expected an object with an 'inputs' array", 1, 1);
  std::vector<std::string> ids;
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels;
  bool any_weight = false;
  const auto& inputs = doc["inputs"];
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const json& e = inputs[i];
    const std::string where = "inputs[" + std::to_string(i) + "]";
    ids.push_back(json_scalar_string(e.value("id", json(std::to_string(i)))));
    points.push_back(json_get<Point>(e, "x", where));
    if (e.contains("weight")) {
      any_weight = true;
      weights.push_back(json_get<double>(e, "weight", where));
      if (!(weights.back() > 0.0)) throw ParseError(where + ": weights must be strictly positive", 0, 0);
    }
    if (any_weight && weights.size() != ids.size()) throw ParseError(where + ": weight given for some inputs only", 0, 0);
    if (e.contains("labels")) {
      const json& l = e["labels"];
      if (!l.is_object()) throw ParseError(where + ": 'labels' must be an object", 0, 0);
      if (i == 0)
        for (auto it = l.begin(); it != l.end(); ++it) names.push_back(it.key());
      if (l.size() != names.size()) throw ParseError(where + ": label names differ from the first input", 0, 0);
      labels.resize(names.size());
      for (std::size_t k = 0; k < names.size(); ++k) {
        if (!l.contains(names[k])) throw ParseError(where + ": missing label '" + names[k] + "'", 0, 0);
        labels[k].push_back(json_scalar_string(l[names[k]]));
      }
    } else if (!names.empty()) {
      throw ParseError(where + ": missing labels", 0, 0);
    }
  }
  if (any_weight && weights.size() != ids.size()) throw ParseError("weight given for some inputs only", 0, 0);
  return build_inputs(std::move(ids), std::move(points),
                      any_weight ? std::optional<std::vector<double>>(std::move(weights)) : std::nullopt,
                      std::move(names), labels);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

namespace {

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

struct RawAssignment {
  std::string id;
  std::string message;
  std::size_t line = 0;
  std::size_t column = 0;
};

ProtocolTable build_protocol(const std::vector<RawAssignment>& rows, const std::vector<std::string>& ids,
                             const ProtocolOptions& options) {
  std::map<std::string, Index> index_of;
  for (Index i = 0; i < ids.size(); ++i) index_of[ids[i]] = i;
  std::vector<const RawAssignment*> by_input(ids.size(), nullptr);
  for (const auto& r : rows) {
    const auto it = index_of.find(r.id);
    if (it == index_of.end()) throw ParseError("unknown input id '" + r.id + "'", r.line, 1);
    if (by_input[it->second]) throw ParseError("input id '" + r.id + "' assigned twice", r.line, 1);
    by_input[it->second] = &r;
  }
  for (Index i = 0; i < ids.size(); ++i)
    if (!by_input[i]) throw ParseError("input id '" + ids[i] + "' has no message", 0, 0);

  std::vector<Index> assignment(ids.size());
  if (options.metric == MessageMetric::Euclidean) {
    std::vector<Point> vectors;
    std::map<Point, Index> lookup;
    for (Index i = 0; i < ids.size(); ++i) {
      const RawAssignment& r = *by_input[i];
      Point v;
      std::size_t start = 0;
      while (true) {
        const std::size_t end = std::min(r.message.find(';', start), r.message.size());
        v.push_back(parse_number(Field{std::string(trim(std::string_view(r.message).substr(start, end - start))),
                                       r.column + start},
                                 r.line));
        if (end >= r.message.size()) break;
        start = end + 1;
      }
      if (!vectors.empty() && v.size() != vectors.front().size())
        throw ParseError("message vectors differ in dimension", r.line, r.column);
      auto [it, inserted] = lookup.emplace(v, vectors.size());
      if (inserted) vectors.push_back(v);
      assignment[i] = it->second;
    }
    MessageSpace messages = MessageSpace::euclidean(std::move(vectors));
    return ProtocolTable{Protocol(std::move(assignment), messages.size()), std::move(messages)};
  }
  if (options.metric != MessageMetric::Hamming) throw PreconditionError("protocol files hold symbol or vector messages");

  std::vector<std::vector<int>> seqs(ids.size());
  unsigned vocab = std::max(options.vocab, 2u);
  std::size_t length = 0;
  for (Index i = 0; i < ids.size(); ++i) {
    const RawAssignment& r = *by_input[i];
    try {
      seqs[i] = parse_symbols(r.message);
    } catch (const PreconditionError& e) {
      throw ParseError(e.what(), r.line, r.column);
    }
    if (length == 0) length = seqs[i].size();
    if (seqs[i].size() != length)
      throw ParseError("message '" + r.message + "' has length " + std::to_string(seqs[i].size()) + ", expected " +
                           std::to_string(length),
                       r.line, r.column);
    for (int s : seqs[i]) vocab = std::max(vocab, static_cast<unsigned>(s) + 1);
  }
  const double product = std::pow(static_cast<double>(vocab), static_cast<double>(length));
  if (product <= options.product_limit) {
    MessageSpace messages = MessageSpace::symbol_product(vocab, static_cast<unsigned>(length));
    for (Index i = 0; i < ids.size(); ++i) assignment[i] = *messages.find(format_symbols(seqs[i]));
    return ProtocolTable{Protocol(std::move(assignment), messages.size()), std::move(messages)};
  }
  std::vector<std::vector<int>> distinct = seqs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  for (Index i = 0; i < ids.size(); ++i)
    assignment[i] = static_cast<Index>(std::lower_bound(distinct.begin(), distinct.end(), seqs[i]) - distinct.begin());
  MessageSpace messages = MessageSpace::symbol_list(vocab, std::move(distinct));
  return ProtocolTable{Protocol(std::move(assignment), messages.size()), std::move(messages)};
}

}  // namespace

InputTable load_inputs(const std::string& path) {
  const std::string text = read_file(path);
  return is_json_path(path) ? parse_inputs_json(text) : parse_inputs_csv(text);
}

ProtocolTable parse_protocol_csv(std::string_view text, const std::vector<std::string>& ids,
                                 const ProtocolOptions& options) {
  const auto rows = read_csv(text);
  const Row& header = rows.front();
  if (header.fields.size() != 2 || header.fields[0].text != "id" || header.fields[1].text != "message")
    throw ParseError("protocol header must be 'id,message'", header.line, 1);
  std::vector<RawAssignment> raw;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    check_width(rows[r], 2);
    raw.push_back({rows[r].fields[0].text, rows[r].fields[1].text, rows[r].line, rows[r].fields[1].column});
  }
  return build_protocol(raw, ids, options);
}

ProtocolTable parse_protocol_json(std::string_view text, const std::vector<std::string>& ids,
                                  const ProtocolOptions& options) {
  const json doc = parse_json(text);
  if (!doc.is_object() || !doc.contains("assignment") || !doc["assignment"].is_array())
    throw ParseError("expected an object with an 'assignment' array", 1, 1);
  std::vector<RawAssignment> raw;
  for (std::size_t i = 0; i < doc["assignment"].size(); ++i) {
    const json& e = doc["assignment"][i];
    const std::string where = "assignment[" + std::to_string(i) + "]";
    if (!e.contains("id") || !e.contains("message")) throw ParseError(where + ": needs 'id' and 'message'", 0, 0);
    raw.push_back({json_scalar_string(e["id"]), json_scalar_string(e["message"]), 0, 0});
  }
  return build_protocol(raw, ids, options);
}

ProtocolTable load_protocol(const std::string& path, const std::vector<std::string>& ids,
                            const ProtocolOptions& options) {
  const std::string text = read_file(path);
  return is_json_path(path) ? parse_protocol_json(text, ids, options) : parse_protocol_csv(text, ids, options);
}

std::pair<std::vector<std::string>, std::vector<LabelMap>> parse_labels_csv(std::string_view text,
                                                                            const std::vector<std::string>& ids) {
  const auto rows = read_csv(text);
  const Row& header = rows.front();
  if (header.fields.size() < 2 || header.fields[0].text != "id")
    throw ParseError("labels header must be 'id,<label>[,<label>...]'", header.line, 1);
  std::map<std::string, Index> index_of;
  for (Index i = 0; i < ids.size(); ++i) index_of[ids[i]] = i;
  const std::size_t columns = header.fields.size() - 1;
  std::vector<std::vector<std::optional<std::string>>> values(columns, std::vector<std::optional<std::string>>(ids.size()));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row& row = rows[r];
    check_width(row, header.fields.size());
    const auto it = index_of.find(row.fields[0].text);
    if (it == index_of.end()) throw ParseError("unknown input id '" + row.fields[0].text + "'", row.line, 1);
    for (std::size_t c = 0; c < columns; ++c) {
      if (values[c][it->second]) throw ParseError("input id labelled twice", row.line, 1);
      values[c][it->second] = row.fields[c + 1].text;
    }
  }
  std::vector<std::string> names;
  std::vector<LabelMap> maps;
  for (std::size_t c = 0; c < columns; ++c) {
    std::vector<std::string> column;
    for (Index i = 0; i < ids.size(); ++i) {
      if (!values[c][i]) throw ParseError("input id '" + ids[i] + "' has no label", 0, 0);
      column.push_back(*values[c][i]);
    }
    names.push_back(header.fields[c + 1].text);
    maps.push_back(LabelMap::from_strings(column));
  }
  return {std::move(names), std::move(maps)};
}

std::pair<std::vector<std::string>, std::vector<LabelMap>> load_labels(const std::string& path,
                                                                       const std::vector<std::string>& ids) {
  return parse_labels_csv(read_file(path), ids);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string protocol_csv(const std::vector<std::string>& ids, const Protocol& protocol, const MessageSpace& messages) {
  if (ids.size() != protocol.input_count()) throw PreconditionError("id list does not match the protocol");
  std::string out = "id,message\n";
  for (Index i = 0; i < ids.size(); ++i) out += csv_field(ids[i]) + "," + csv_field(messages.label(protocol[i])) + "\n";
  return out;
}

std::string inputs_csv(const InputTable& table) {
  std::string out = "id";
  for (std::size_t k = 0; k < table.space.dimension(); ++k) out += ",x" + std::to_string(k);
  out += ",weight";
  for (const auto& n : table.attribute_names) out += "," + csv_field(n);
  out += "\n";
  for (Index i = 0; i < table.space.size(); ++i) {
    out += csv_field(table.ids[i]);
    for (double v : table.space.point(i)) out += "," + number(v);
    out += "," + number(table.space.weight(i));
    for (const auto& a : table.attributes) out += "," + csv_field(a.name(a[i]));
    out += "\n";
  }
  return out;
}

json receiver_json(const Receiver& receiver, const MessageSpace& messages, std::size_t input_count, double max_rows) {
  json doc;
  if (const auto* r = std::get_if<ReconstructionReceiver>(&receiver)) {
    doc["kind"] = "reconstruction";
    json outputs = json::object();
    for (Index m = 0; m < r->message_count(); ++m)
      if (r->defined(m)) outputs[messages.label(m)] = r->at(m);
    doc["outputs"] = outputs;
  } else if (const auto* g = std::get_if<GlobalReceiver>(&receiver)) {
    doc["kind"] = "global";
    json rows = json::object();
    for (Index m = 0; m < g->message_count(); ++m)
      if (g->defined(m)) rows[messages.label(m)] = g->at(m);
    doc["rows"] = rows;
  } else {
    const auto& d = std::get<DiscriminationReceiver>(receiver);
    const auto flat = tabulate(d, input_count, max_rows);
    doc["kind"] = "discrimination";
    doc["candidates"] = d.candidates();
    doc["inputs"] = input_count;
    doc["messages"] = d.message_count();
    json table = json::array();
    for (std::size_t r = 0; r < flat.size(); r += d.candidates())
      table.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(r),
                                          flat.begin() + static_cast<std::ptrdiff_t>(r + d.candidates())));
    doc["table"] = table;
  }
  return doc;
}

Receiver receiver_from_json(const json& doc, const MessageSpace& messages, std::size_t input_count) {
  const std::string kind = json_get<std::string>(doc, "kind", "receiver");
  auto message_index = [&](const std::string& label) {
    const auto m = messages.find(label);
    if (!m) throw ParseError("receiver names unknown message '" + label + "'", 0, 0);
    return *m;
  };
  if (kind == "reconstruction") {
    std::vector<std::optional<Point>> outputs(messages.size());
    const json entries = json_get<json>(doc, "outputs", "receiver");
    for (const auto& [label, value] : entries.items())
      outputs[message_index(label)] = value.get<Point>();
    return ReconstructionReceiver(std::move(outputs));
  }
  if (kind == "global") {
    std::vector<std::optional<std::vector<double>>> rows(messages.size());
    const json entries = json_get<json>(doc, "rows", "receiver");
    for (const auto& [label, value] : entries.items())
      rows[message_index(label)] = value.get<std::vector<double>>();
    return GlobalReceiver(std::move(rows));
  }
  if (kind == "discrimination") {
    const auto d = json_get<unsigned>(doc, "candidates", "receiver");
    const auto n = json_get<std::size_t>(doc, "inputs", "receiver");
    const auto k = json_get<std::size_t>(doc, "messages", "receiver");
    if (n != input_count) throw ParseError("receiver table is for " + std::to_string(n) + " inputs", 0, 0);
    if (k != messages.size()) throw ParseError("receiver table is for " + std::to_string(k) + " messages", 0, 0);
    std::vector<double> flat;
    const json table = json_get<json>(doc, "table", "receiver");
    for (const auto& row : table) {
      const auto v = row.get<std::vector<double>>();
      if (v.size() != d) throw ParseError("receiver table row has the wrong width", 0, 0);
      flat.insert(flat.end(), v.begin(), v.end());
    }
    return DiscriminationReceiver::from_table(k, n, d, std::move(flat));
  }
  throw ParseError("unknown receiver kind '" + kind + "'", 0, 0);
}

}  // namespace semcomm
