#include "dacc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dacc {

namespace {

SweepRow evaluate_row(double x, const Topology& topology, const CorrelationModel& model,
                      const BetaFactors& betas, const std::optional<McSettings>& mc) {
  SweepRow row;
  row.x = x;
  row.m = topology.size();
  row.model = model;
  row.betas = betas;
  row.d_a_as_printed = accuracy_closed_form(topology, model, betas, Variant::AsPrinted).value;
  row.d_a_noise_consistent =
      accuracy_closed_form(topology, model, betas, Variant::NoiseConsistent).value;
  if (mc) row.mc = mc_accuracy(topology, model, mc->profile, mc->options);
  return row;
}

void require_models(std::span<const CorrelationModel> models) {
  if (models.empty()) throw std::invalid_argument("at least one correlation model is required");
  for (const auto& model : models) validate(model);
}

}  // namespace

SweepResult evaluate_topology(const Topology& topology, std::span<const CorrelationModel> models,
                              const BetaFactors& betas, const std::optional<McSettings>& mc) {
  require_models(models);
  validate(betas);
  validate(topology);
  SweepResult out{"m", {}};
  for (const auto& model : models) {
    out.rows.push_back(evaluate_row(static_cast<double>(topology.size()), topology, model, betas, mc));
  }
  return out;
}

SweepResult circle_radius_sweep(Index m, std::span<const double> radii,
                                std::span<const CorrelationModel> models, const BetaFactors& betas,
                                const std::optional<McSettings>& mc) {
  require_models(models);
  validate(betas);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw std::invalid_argument("radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw std::invalid_argument("radii must ascend");
  }
  SweepResult out{"radius", {}};
  for (double r : radii) {
    const Topology t = make_circle(m, r);
    for (const auto& model : models) out.rows.push_back(evaluate_row(r, t, model, betas, mc));
  }
  return out;
}

SweepResult node_count_sweep(std::span<const Index> ms, double radius,
                             std::span<const CorrelationModel> models, const BetaFactors& betas,
                             const std::optional<McSettings>& mc) {
  require_models(models);
  validate(betas);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    if (ms[k] < 2) throw std::invalid_argument("node counts must be >= 2");
    if (k > 0 && ms[k] <= ms[k - 1]) throw std::invalid_argument("node counts must ascend");
  }
  SweepResult out{"m", {}};
  for (Index m : ms) {
    const Topology t = make_circle(m, radius);
    for (const auto& model : models) {
      out.rows.push_back(evaluate_row(static_cast<double>(m), t, model, betas, mc));
    }
  }
  return out;
}

SweepResult grid_density_sweep(const GridSetup& setup, std::span<const CorrelationModel> models,
                               const BetaFactors& betas, Index increment, Ordering ordering,
                               const std::optional<McSettings>& mc) {
  require_models(models);
  validate(betas);
  if (increment < 1) throw std::invalid_argument("increment must be >= 1");
  const Topology grid = make_grid(setup.spacing, setup.region, setup.event, setup.ch_corner);
  const std::vector<Index> order = order_by_event_distance(grid, ordering);
  const Index full = grid.size();

  std::vector<Index> sizes;
  for (Index m = increment; m < full; m += increment) sizes.push_back(m);
  sizes.push_back(full);

  SweepResult out{"density", {}};
  for (Index m : sizes) {
    const Topology t = grid.subset(std::span(order).first(static_cast<std::size_t>(m)));
    const double density = static_cast<double>(m) / setup.region.area();
    for (const auto& model : models) out.rows.push_back(evaluate_row(density, t, model, betas, mc));
  }
  return out;
}

SweepResult random_topology_average(std::span<const Index> m_values, const RandomSetup& setup,
                                    std::span<const CorrelationModel> models,
                                    const BetaFactors& betas, Index runs,
                                    std::uint64_t master_seed) {
  require_models(models);
  validate(betas);
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  SweepResult out{"m", {}};
  for (Index m : m_values) {
    if (m < 1) throw std::invalid_argument("node counts must be >= 1");
    const auto nm = models.size();
    const auto nr = static_cast<std::size_t>(runs);
    std::vector<std::vector<double>> printed(nm, std::vector<double>(nr));
    std::vector<std::vector<double>> consistent(nm, std::vector<double>(nr));
    for (std::size_t r = 0; r < nr; ++r) {
      const std::uint64_t seed =
          substream_seed(master_seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r)});
      const Topology t = make_random(m, setup.region, setup.event, setup.ch, seed);
      for (std::size_t k = 0; k < nm; ++k) {
        printed[k][r] = accuracy_closed_form(t, models[k], betas, Variant::AsPrinted).value;
        consistent[k][r] = accuracy_closed_form(t, models[k], betas, Variant::NoiseConsistent).value;
      }
    }
    for (std::size_t k = 0; k < nm; ++k) {
      SweepRow row;
      row.x = static_cast<double>(m);
      row.m = m;
      row.model = models[k];
      row.betas = betas;
      row.runs = runs;
      const double n = static_cast<double>(runs);
      row.d_a_as_printed = compensated_sum(printed[k]) / n;
      row.d_a_noise_consistent = compensated_sum(consistent[k]) / n;
      if (runs > 1) {
        double ss = 0.0;
        for (double v : consistent[k]) ss += (v - row.d_a_noise_consistent) * (v - row.d_a_noise_consistent);
        row.d_a_std = std::sqrt(ss / (n - 1.0));
      }
      out.rows.push_back(row);
    }
  }
  return out;
}

std::string to_string(ClusterOrdering ordering) {
  switch (ordering) {
    case ClusterOrdering::NearestFirst: return "nearest-first";
    case ClusterOrdering::FarthestFirst: return "farthest-first";
    case ClusterOrdering::Random: return "random";
  }
  return "unknown";
}

ClusterOrdering parse_cluster_ordering(std::string_view text) {
  if (text == "nearest-first") return ClusterOrdering::NearestFirst;
  if (text == "farthest-first") return ClusterOrdering::FarthestFirst;
  if (text == "random") return ClusterOrdering::Random;
  throw std::invalid_argument("unknown ordering '" + std::string(text) +
                              "' (expected nearest-first, farthest-first or random)");
}

MinimalClusterReport find_minimal_cluster(const Topology& topology, const CorrelationModel& model,
                                          const BetaFactors& betas, double epsilon,
                                          ClusterOrdering ordering, Variant variant,
                                          std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  validate(topology);

  std::vector<Index> order;
  switch (ordering) {
    case ClusterOrdering::NearestFirst:
      order = order_by_event_distance(topology, Ordering::NearestFirst);
      break;
    case ClusterOrdering::FarthestFirst:
      order = order_by_event_distance(topology, Ordering::FarthestFirst);
      break;
    case ClusterOrdering::Random: {
      std::vector<Index> rest = topology.non_ch();
      Rng rng(seed);
      // Fisher-Yates with the project generator so the order is portable.
      for (std::size_t i = rest.size(); i > 1; --i) {
        std::swap(rest[i - 1], rest[rng() % i]);
      }
      order.push_back(topology.ch);
      order.insert(order.end(), rest.begin(), rest.end());
      break;
    }
  }

  MinimalClusterReport report;
  report.full_m = topology.size();
  report.full_accuracy = accuracy_closed_form(topology, model, betas, variant).value;
  report.epsilon = epsilon;
  report.ordering = ordering;
  for (Index p = 1; p <= report.full_m; ++p) {
    const auto prefix = std::span(order).first(static_cast<std::size_t>(p));
    const double value = accuracy_closed_form(topology.subset(prefix), model, betas, variant).value;
    if (value >= report.full_accuracy - epsilon) {
      report.minimal_p = p;
      report.minimal_accuracy = value;
      report.members.assign(prefix.begin(), prefix.end());
      break;
    }
  }
  return report;
}

double calibrate_beta(double target, const Topology& topology, const CorrelationModel& model,
                      Variant variant) {
  if (!std::isfinite(target) || !(target > 0.0)) {
    throw CalibrationInfeasible("calibration target must be > 0");
  }
  // With beta_i = beta_ch = b the closed form is A*b - B*b^2; its terms at
  // b = 1 are exactly the coefficients.
  const AccuracyTerms unit = accuracy_terms(topology, model, {1.0, 1.0}, variant);
  double linear = unit.gain_nodes + unit.gain_ch + unit.self_nodes;
  double quadratic = -(unit.cross_nodes + unit.cross_ch);
  if (variant == Variant::AsPrinted) {
    quadratic -= unit.self_ch;
  } else {
    linear += unit.self_ch;
  }
  auto accuracy_at = [&](double b) { return linear * b - quadratic * b * b; };

  if (!(linear > 0.0)) throw CalibrationInfeasible("accuracy is not increasing in beta");
  // Accuracy rises on [0, peak]; the smaller root lives there.
  const double peak = quadratic > 0.0 ? std::min(1.0, linear / (2.0 * quadratic)) : 1.0;
  if (target > accuracy_at(peak) * (1.0 + 1e-12) + 1e-15) {
    throw CalibrationInfeasible("target accuracy " + std::to_string(target) +
                                " is not attainable for beta in (0, 1]");
  }

  // Stable form of the smaller root of B*b^2 - A*b + target = 0; also covers B <= 0.
  const double disc = std::max(0.0, linear * linear - 4.0 * quadratic * target);
  double beta = 2.0 * target / (linear + std::sqrt(disc));

  if (!(beta > 0.0 && beta <= peak) || std::abs(accuracy_at(beta) - target) > 1e-13) {
    double lo = 0.0;
    double hi = peak;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (accuracy_at(mid) < target ? lo : hi) = mid;
    }
    beta = 0.5 * (lo + hi);
  }
  if (!(beta > 0.0) || beta > 1.0) {
    throw CalibrationInfeasible("no beta in (0, 1] reaches the target");
  }
  return beta;
}

Topology reference_grid() {
  const GridSetup setup;
  Topology t = make_grid(setup.spacing, setup.region, setup.event, setup.ch_corner);
  t.label = "reference grid";
  return t;
}

Topology reference_grid_prefix(Index m) {
  const Topology grid = reference_grid();
  if (m < 1 || m > grid.size()) throw std::invalid_argument("prefix size out of range");
  const auto order = order_by_event_distance(grid, Ordering::FarthestFirst);
  Topology t = grid.subset(std::span(order).first(static_cast<std::size_t>(m)));
  t.label = "reference grid m=" + std::to_string(m);
  return t;
}

}  // namespace dacc
