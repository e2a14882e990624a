#pragma once

#include "dacc/estimator.hpp"
#include "dacc/experiments.hpp"
#include "dacc/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dacc {

enum class ExperimentKind { CircleRadius, NodeCount, GridDensity, RandomAverage, MinimalCluster, Single };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view text);

enum class OutputFormat { Csv, Json, Both };

struct CircleParams {
  Index m = 4;
  double radius = 5.0;
  std::vector<double> radii;  ///< circle-radius sweep
  std::vector<Index> ms;      ///< node-count sweep
};

struct GridParams {
  GridSetup setup;
  Index increment = 4;
  Ordering ordering = Ordering::FarthestFirst;
  std::optional<Index> prefix;  ///< single/minimal-cluster: keep the first N farthest-first nodes
};

struct RandomParams {
  RandomSetup setup;
  std::vector<Index> ms;  ///< random-average
  Index m = 100;          ///< single/minimal-cluster
  Index runs = 100;
};

enum class TopologySource { Grid, Circle, Random, File };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Single;
  std::vector<CorrelationModel> models;
  std::optional<BetaFactors> beta;
  std::optional<NoiseProfile> noise;
  Variant variant = Variant::NoiseConsistent;
  bool monte_carlo = false;
  std::int64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double epsilon = 0.02;
  ClusterOrdering ordering = ClusterOrdering::NearestFirst;
  CircleParams circle;
  GridParams grid;
  RandomParams random;
  TopologySource topology_source = TopologySource::Grid;
  std::string topology_file;
  std::string output_path;
  OutputFormat output_format = OutputFormat::Csv;

  /// Betas from whichever source was configured.
  BetaFactors effective_betas() const;
  /// Noise profile for the simulated chain; direct betas map through
  /// NoiseProfile::from_betas.
  NoiseProfile effective_profile() const;
};

/// Config document errors: syntax (with line numbers) and violated invariants.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a YAML experiment document. Each override is `dotted.key=value`
/// with a YAML value and takes precedence over the document.
ExperimentConfig parse_config(std::string_view text,
                              std::span<const std::string> overrides = {});

ExperimentConfig load_config(const std::string& path,
                             std::span<const std::string> overrides = {});

/// Topology described by the config's `topology` section (single and
/// minimal-cluster experiments).
Topology build_topology(const ExperimentConfig& config);

/// Runs the experiment, writes the configured result files and prints a
/// summary. Returns the result table for the caller.
ResultTable run(const ExperimentConfig& config, std::ostream& summary);

}  // namespace dacc
