#pragma once

#include "dacc/experiments.hpp"
#include "dacc/topology.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace dacc {

inline constexpr std::string_view kVersion = "0.1.0";

// Topology files --------------------------------------------------------------

nlohmann::json to_json(const Topology& topology);
Topology topology_from_json(const nlohmann::json& doc);

Topology read_topology_file(const std::string& path);
void write_topology_file(const Topology& topology, const std::string& path);

/// index,x,y,is_ch
std::string topology_csv(const Topology& topology);

// Result tables ---------------------------------------------------------------

enum class ColumnType { Integer, Real, Text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

/// Empty cells (monostate) mark values that do not apply to a row.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ResultTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  /// Cell by column name; throws std::out_of_range when absent.
  const Cell& at(std::size_t row, std::string_view column) const;
  double number(std::size_t row, std::string_view column) const;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest representation that parses back to the same double.
std::string format_real(double value);

/// RFC 4180: header line, CRLF line endings, fields quoted when they hold a
/// comma, quote or line break.
std::string write_csv(const ResultTable& table);

/// Parses CSV written with the given schema; the header must match it.
ResultTable read_csv(std::string_view text, const std::vector<Column>& columns);

/// Array of row objects keyed by column name in column order; empty cells
/// become null.
nlohmann::ordered_json to_json(const ResultTable& table);

/// Per-run metadata stamped onto every row.
struct RunMetadata {
  Variant variant = Variant::NoiseConsistent;
  std::uint64_t seed = 0;
  std::string version{kVersion};
};

/// Leading `x` column, `m` (unless x is m), the given fixed columns, then
/// the model, beta, accuracy, Monte Carlo and metadata columns.
ResultTable sweep_table(const SweepResult& sweep, const RunMetadata& meta,
                        const std::vector<std::pair<Column, Cell>>& fixed = {});

ResultTable minimal_cluster_table(const std::vector<MinimalClusterReport>& reports,
                                  const std::vector<CorrelationModel>& models,
                                  const BetaFactors& betas, const RunMetadata& meta);

}  // namespace dacc
