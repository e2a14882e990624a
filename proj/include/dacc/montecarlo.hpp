#pragma once

#include "dacc/correlation.hpp"
#include "dacc/estimator.hpp"
#include "dacc/random.hpp"
#include "dacc/topology.hpp"

#include <cstdint>
#include <vector>

namespace dacc {

/// One realization of the zero-mean Gaussian field: the event value and the
/// value at every node (CH included, in topology order).
struct FieldSample {
  double s = 0.0;
  Vector node_values;
};

/// Draws joint field samples for a fixed topology. Points sharing a location
/// are perfectly correlated and are factored once, then copied, so the
/// covariance handed to the Cholesky factorization has distinct points only.
class FieldSampler {
 public:
  FieldSampler(const Topology& topology, const CorrelationModel& model, double sigma_s2);

  FieldSample operator()(Rng& rng) const;

  Index size() const { return static_cast<Index>(slot_.size()) - 1; }
  double jitter() const { return factor_.jitter; }
  const Matrix& factor() const { return factor_.lower; }

 private:
  CholeskyFactor factor_;
  std::vector<Index> slot_;  // field point -> row of the distinct-point factor
};

FieldSample sample_field(const Topology& topology, const CorrelationModel& model,
                         double sigma_s2, Rng& rng);

/// Every quantity of the sensing, transmission and MMSE chain for one trial.
/// Per-node vectors are indexed by node; entries for the CH are unused (0)
/// in y and z, and s_hat_nodes holds the CH estimate at the CH slot.
struct ChainObservation {
  Vector x;            ///< X_i = S_i + N_i  (X_CH = S_CH + N_CH at the CH slot)
  Vector y;            ///< Y_i = X_i + N_ti
  Vector z;            ///< Z_i = alpha * Y_i
  double x_ch = 0.0;
  Vector s_hat_nodes;  ///< MMSE estimates of S_i
  double s_hat_ch = 0.0;
  double s_hat = 0.0;  ///< fused estimate: mean of the MMSE estimates
};

ChainObservation simulate_chain(const FieldSample& sample, const NoiseProfile& profile,
                                const Topology& topology, Rng& rng);

struct McEstimate {
  double mean_accuracy = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::uint64_t master_seed = 0;
  double jitter = 0.0;
};

struct McOptions {
  std::int64_t trials = 100000;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

/// Empirical accuracy 1 - mean((S - S_hat)^2) / sigma_s2 over independent
/// trials. Trial t draws from substream (master_seed, t); the result does
/// not depend on the thread count.
McEstimate mc_accuracy(const Topology& topology, const CorrelationModel& model,
                       const NoiseProfile& profile, const McOptions& options);

/// Neumaier-compensated sum, accumulated in index order.
double compensated_sum(std::span<const double> values);

}  // namespace dacc
