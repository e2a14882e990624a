#include "dacc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace dacc {

using nlohmann::json;

json to_json(const Topology& t) {
  json nodes = json::array();
  for (Index i = 0; i < t.size(); ++i) nodes.push_back({t.nodes(0, i), t.nodes(1, i)});
  json doc = {
      {"region",
       {{"x_min", t.region.x_min}, {"y_min", t.region.y_min}, {"x_max", t.region.x_max},
        {"y_max", t.region.y_max}}},
      {"event", {t.event.x(), t.event.y()}},
      {"ch_index", t.ch},
      {"nodes", std::move(nodes)},
      {"label", t.label},
  };
  if (t.total_deployed) doc["total_deployed"] = *t.total_deployed;
  return doc;
}

namespace {

Position read_pair(const json& v, std::string_view what) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw FormatError("topology: '" + std::string(what) + "' must be an [x, y] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

Topology topology_from_json(const json& doc) {
  Topology t;
  try {
    const json& r = doc.at("region");
    t.region = {r.at("x_min").get<double>(), r.at("y_min").get<double>(),
                r.at("x_max").get<double>(), r.at("y_max").get<double>()};
    t.event = read_pair(doc.at("event"), "event");
    t.ch = doc.at("ch_index").get<Index>();
    const json& nodes = doc.at("nodes");
    if (!nodes.is_array()) throw FormatError("topology: 'nodes' must be an array");
    t.nodes.resize(2, static_cast<Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      t.nodes.col(static_cast<Index>(i)) = read_pair(nodes[i], "nodes[" + std::to_string(i) + "]");
    }
    t.label = doc.value("label", std::string{});
    if (doc.contains("total_deployed")) t.total_deployed = doc["total_deployed"].get<std::int64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("topology: ") + e.what());
  }
  validate(t);
  return t;
}

Topology read_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  return topology_from_json(doc);
}

void write_topology_file(const Topology& topology, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write topology file: " + path);
  out << to_json(topology).dump(2) << '\n';
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string topology_csv(const Topology& t) {
  std::string out = "index,x,y,is_ch\r\n";
  for (Index i = 0; i < t.size(); ++i) {
    out += std::to_string(i) + ',' + format_real(t.nodes(0, i)) + ',' + format_real(t.nodes(1, i)) +
           ',' + (i == t.ch ? "1" : "0") + "\r\n";
  }
  return out;
}

const Cell& ResultTable::at(std::size_t row, std::string_view column) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].name == column) return rows.at(row).at(c);
  }
  throw std::out_of_range("no column named " + std::string(column));
}

double ResultTable::number(std::size_t row, std::string_view column) const {
  const Cell& cell = at(row, column);
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  throw std::out_of_range("column " + std::string(column) + " is not numeric in this row");
}

namespace {

std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw FormatError("csv: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

Cell parse_cell(const std::string& text, const Column& column) {
  if (text.empty()) return std::monostate{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  switch (column.type) {
    case ColumnType::Integer: {
      std::int64_t v = 0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last) {
        throw FormatError("csv: column " + column.name + ": not an integer: " + text);
      }
      return v;
    }
    case ColumnType::Real: {
      double v = 0.0;
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc{} || res.ptr != last) {
        throw FormatError("csv: column " + column.name + ": not a number: " + text);
      }
      return v;
    }
    case ColumnType::Text:
      return text;
  }
  return std::monostate{};
}

}  // namespace

std::string write_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += quote(table.columns[c].name);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += quote(cell_text(row[c]));
    }
    out += "\r\n";
  }
  return out;
}

ResultTable read_csv(std::string_view text, const std::vector<Column>& columns) {
  auto records = split_records(text);
  if (records.empty()) throw FormatError("csv: missing header");
  const auto& header = records.front();
  if (header.size() != columns.size()) throw FormatError("csv: header does not match schema");
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (header[c] != columns[c].name) {
      throw FormatError("csv: expected column " + columns[c].name + ", found " + header[c]);
    }
  }
  ResultTable table;
  table.columns = columns;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != columns.size()) {
      throw FormatError("csv: record " + std::to_string(r) + " has " +
                        std::to_string(records[r].size()) + " fields, expected " +
                        std::to_string(columns.size()));
    }
    std::vector<Cell> row;
    row.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) row.push_back(parse_cell(records[r][c], columns[c]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::ordered_json to_json(const ResultTable& table) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
              obj[table.columns[c].name] = nullptr;
            } else {
              obj[table.columns[c].name] = v;
            }
          },
          row[c]);
    }
    out.push_back(std::move(obj));
  }
  return out;
}

ResultTable sweep_table(const SweepResult& sweep, const RunMetadata& meta,
                        const std::vector<std::pair<Column, Cell>>& fixed) {
  const bool x_is_m = sweep.independent == "m";
  const bool averaged = std::any_of(sweep.rows.begin(), sweep.rows.end(),
                                    [](const SweepRow& r) { return r.runs > 1; });
  ResultTable table;
  auto& cols = table.columns;
  cols.push_back({sweep.independent, x_is_m ? ColumnType::Integer : ColumnType::Real});
  if (!x_is_m) cols.push_back({"m", ColumnType::Integer});
  for (const auto& [column, value] : fixed) cols.push_back(column);
  for (const char* name : {"theta1", "theta2", "beta_i", "beta_ch"}) cols.push_back({name, ColumnType::Real});
  cols.push_back({"variant", ColumnType::Text});
  cols.push_back({"d_a", ColumnType::Real});
  if (averaged) {
    cols.push_back({"d_a_std", ColumnType::Real});
    cols.push_back({"runs", ColumnType::Integer});
  }
  cols.push_back({"mc_mean", ColumnType::Real});
  cols.push_back({"mc_se", ColumnType::Real});
  cols.push_back({"trials", ColumnType::Integer});
  cols.push_back({"seed", ColumnType::Integer});
  cols.push_back({"jitter", ColumnType::Real});
  cols.push_back({"version", ColumnType::Text});

  for (const SweepRow& r : sweep.rows) {
    std::vector<Cell> row;
    if (x_is_m) {
      row.emplace_back(static_cast<std::int64_t>(r.m));
    } else {
      row.emplace_back(r.x);
      row.emplace_back(static_cast<std::int64_t>(r.m));
    }
    for (const auto& [column, value] : fixed) row.push_back(value);
    row.emplace_back(r.model.theta1);
    row.emplace_back(r.model.theta2);
    row.emplace_back(r.betas.beta_i);
    row.emplace_back(r.betas.beta_ch);
    row.emplace_back(std::string(to_string(meta.variant)));
    row.emplace_back(r.accuracy(meta.variant));
    if (averaged) {
      row.emplace_back(r.d_a_std);
      row.emplace_back(static_cast<std::int64_t>(r.runs));
    }
    if (r.mc) {
      row.emplace_back(r.mc->mean_accuracy);
      row.emplace_back(r.mc->std_error);
      row.emplace_back(r.mc->trials);
      row.emplace_back(static_cast<std::int64_t>(r.mc->master_seed));
      row.emplace_back(r.mc->jitter);
    } else {
      row.insert(row.end(), 3, std::monostate{});
      row.emplace_back(static_cast<std::int64_t>(meta.seed));
      row.emplace_back(std::monostate{});
    }
    row.emplace_back(meta.version);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable minimal_cluster_table(const std::vector<MinimalClusterReport>& reports,
                                  const std::vector<CorrelationModel>& models,
                                  const BetaFactors& betas, const RunMetadata& meta) {
  ResultTable table;
  table.columns = {{"full_m", ColumnType::Integer},   {"full_accuracy", ColumnType::Real},
                   {"minimal_p", ColumnType::Integer}, {"minimal_accuracy", ColumnType::Real},
                   {"epsilon", ColumnType::Real},      {"ordering", ColumnType::Text},
                   {"theta1", ColumnType::Real},       {"theta2", ColumnType::Real},
                   {"beta_i", ColumnType::Real},       {"beta_ch", ColumnType::Real},
                   {"variant", ColumnType::Text},      {"seed", ColumnType::Integer},
                   {"version", ColumnType::Text}};
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    table.rows.push_back({static_cast<std::int64_t>(r.full_m), r.full_accuracy,
                          static_cast<std::int64_t>(r.minimal_p), r.minimal_accuracy, r.epsilon,
                          to_string(r.ordering), models.at(k).theta1, models.at(k).theta2,
                          betas.beta_i, betas.beta_ch, std::string(to_string(meta.variant)),
                          static_cast<std::int64_t>(meta.seed), meta.version});
  }
  return table;
}

}  // namespace dacc
