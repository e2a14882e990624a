#pragma once

#include "dacc/correlation.hpp"
#include "dacc/topology.hpp"

#include <string_view>

namespace dacc {

/// Noise variances and the encoding power constraint of the sensing chain.
/// The field is homogeneous: sigma_s2 is the variance of S, S_i and S_CH.
struct NoiseProfile {
  double sigma_s2 = 1.0;    ///< field variance
  double sigma_n2 = 0.0;    ///< node observation noise
  double sigma_nt2 = 0.0;   ///< node-to-CH transmission noise
  double sigma_nch2 = 0.0;  ///< CH observation noise
  double power = 1.0;       ///< encoding power constraint P

  /// Profile reproducing the given beta factors. Node noise is split evenly
  /// between observation and transmission.
  static NoiseProfile from_betas(double beta_i, double beta_ch, double sigma_s2 = 1.0,
                                 double power = 1.0);
};

void validate(const NoiseProfile& profile);

struct BetaFactors {
  double beta_i = 1.0;
  double beta_ch = 1.0;

  friend bool operator==(const BetaFactors&, const BetaFactors&) = default;
};

/// Throws std::invalid_argument unless both factors lie in (0, 1].
void validate(const BetaFactors& betas);

double beta_node(const NoiseProfile& profile);
double beta_ch(const NoiseProfile& profile);
BetaFactors betas(const NoiseProfile& profile);

/// Transmission scaling sqrt(P / (sigma_s2 + sigma_n2 + sigma_nt2)).
double alpha(const NoiseProfile& profile);

/// Constant term of the CH's own second moment: beta_ch^2 as printed, or
/// beta_ch as implied by the MMSE chain.
enum class Variant { AsPrinted, NoiseConsistent };

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);

/// Six additive pieces of the closed-form accuracy. Node pieces are zero for
/// a single-node (CH only) cluster.
struct AccuracyTerms {
  double gain_nodes = 0.0;   ///<  (2/m) beta_i sum_i K(d_Si)
  double gain_ch = 0.0;      ///<  (2/m) beta_ch K(d_SCH)
  double cross_nodes = 0.0;  ///< -(1/m^2) beta_i^2 sum_{i != j} K(d_ij)
  double self_nodes = 0.0;   ///< -(1/m^2) (m - 1) beta_i
  double cross_ch = 0.0;     ///< -(1/m^2) 2 beta_ch beta_i sum_i K(d_CHi)
  double self_ch = 0.0;      ///< -(1/m^2) beta_ch^2 or beta_ch

  double total() const {
    return gain_nodes + gain_ch + cross_nodes + self_nodes + cross_ch + self_ch;
  }
};

struct AccuracyValue {
  double value = 0.0;
  Variant variant = Variant::NoiseConsistent;
  Index m = 0;
};

AccuracyTerms accuracy_terms(const Topology& topology, const CorrelationModel& model,
                             const BetaFactors& betas, Variant variant);

/// Normalized data accuracy of the fused cluster estimate. May be negative
/// when the cluster is far from the event; never clamped.
AccuracyValue accuracy_closed_form(const Topology& topology, const CorrelationModel& model,
                                   const BetaFactors& betas,
                                   Variant variant = Variant::NoiseConsistent);

}  // namespace dacc
