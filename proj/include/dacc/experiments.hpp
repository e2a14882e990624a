#pragma once

#include "dacc/estimator.hpp"
#include "dacc/montecarlo.hpp"
#include "dacc/topology.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dacc {

/// Monte Carlo cross-check attached to every sweep row when requested. All
/// rows share the same master seed.
struct McSettings {
  NoiseProfile profile;
  McOptions options;
};

struct SweepRow {
  double x = 0.0;  ///< independent variable (radius, m or node density)
  Index m = 0;
  CorrelationModel model;
  BetaFactors betas;
  double d_a_as_printed = 0.0;
  double d_a_noise_consistent = 0.0;
  double d_a_std = 0.0;  ///< across-run standard deviation (random averages only)
  Index runs = 1;
  std::optional<McEstimate> mc;

  double accuracy(Variant variant) const {
    return variant == Variant::AsPrinted ? d_a_as_printed : d_a_noise_consistent;
  }
};

struct SweepResult {
  std::string independent;  ///< column name of x: "radius", "m" or "density"
  std::vector<SweepRow> rows;
};

/// One row per model for a fixed topology; x is m.
SweepResult evaluate_topology(const Topology& topology, std::span<const CorrelationModel> models,
                              const BetaFactors& betas,
                              const std::optional<McSettings>& mc = std::nullopt);

/// Fixed-m circle, event at the centre, one row per (radius, model).
SweepResult circle_radius_sweep(Index m, std::span<const double> radii,
                                std::span<const CorrelationModel> models, const BetaFactors& betas,
                                const std::optional<McSettings>& mc = std::nullopt);

/// Fixed-radius circle, one row per (m, model).
SweepResult node_count_sweep(std::span<const Index> ms, double radius,
                             std::span<const CorrelationModel> models, const BetaFactors& betas,
                             const std::optional<McSettings>& mc = std::nullopt);

struct GridSetup {
  double spacing = 5.0;
  Region region{0.0, 0.0, 30.0, 30.0};
  Position event{15.0, 15.0};
  Position ch_corner{0.0, 0.0};
};

/// Grows the grid cluster `increment` nodes at a time in the given order
/// (CH pinned), m = increment, 2 * increment, ..., full grid. x is m / area.
SweepResult grid_density_sweep(const GridSetup& setup, std::span<const CorrelationModel> models,
                               const BetaFactors& betas, Index increment = 4,
                               Ordering ordering = Ordering::FarthestFirst,
                               const std::optional<McSettings>& mc = std::nullopt);

struct RandomSetup {
  Region region{0.0, 0.0, 30.0, 30.0};
  Position event{15.0, 15.0};
  std::optional<Position> ch = Position(0.0, 0.0);  ///< nullopt: uniform draw
};

/// For each m, averages the closed form over `runs` random deployments; run r
/// draws from substream (master_seed, m, r). Every model sees the same
/// deployments. x is m; d_a_std is the across-run standard deviation.
SweepResult random_topology_average(std::span<const Index> m_values, const RandomSetup& setup,
                                    std::span<const CorrelationModel> models,
                                    const BetaFactors& betas, Index runs,
                                    std::uint64_t master_seed);

enum class ClusterOrdering { NearestFirst, FarthestFirst, Random };

std::string to_string(ClusterOrdering ordering);
ClusterOrdering parse_cluster_ordering(std::string_view text);

struct MinimalClusterReport {
  Index full_m = 0;
  double full_accuracy = 0.0;
  Index minimal_p = 0;
  double minimal_accuracy = 0.0;
  double epsilon = 0.0;
  ClusterOrdering ordering = ClusterOrdering::NearestFirst;
  std::vector<Index> members;  ///< node indices of the minimal prefix, CH first
};

/// Smallest prefix p (CH always included) of the ordered nodes whose
/// accuracy is within epsilon of the full cluster's.
MinimalClusterReport find_minimal_cluster(const Topology& topology, const CorrelationModel& model,
                                          const BetaFactors& betas, double epsilon,
                                          ClusterOrdering ordering = ClusterOrdering::NearestFirst,
                                          Variant variant = Variant::NoiseConsistent,
                                          std::uint64_t seed = 0);

class CalibrationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Common beta = beta_i = beta_ch at which the closed form equals `target`
/// (the smaller root of the accuracy quadratic). Throws CalibrationInfeasible
/// when no root lies in (0, 1].
double calibrate_beta(double target, const Topology& topology, const CorrelationModel& model,
                      Variant variant = Variant::NoiseConsistent);

/// The reference grid: 5 m spacing over 30 m x 30 m, event at the centre,
/// CH at the origin corner (48 nodes).
Topology reference_grid();

/// First m nodes of the reference grid in farthest-first order.
Topology reference_grid_prefix(Index m);

}  // namespace dacc
