#include "dacc/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dacc {

NoiseProfile NoiseProfile::from_betas(double beta_i, double beta_ch, double sigma_s2,
                                      double power) {
  validate(BetaFactors{beta_i, beta_ch});
  NoiseProfile p;
  p.sigma_s2 = sigma_s2;
  const double node_noise = sigma_s2 * (1.0 / beta_i - 1.0);
  p.sigma_n2 = 0.5 * node_noise;
  p.sigma_nt2 = node_noise - p.sigma_n2;
  p.sigma_nch2 = sigma_s2 * (1.0 / beta_ch - 1.0);
  p.power = power;
  validate(p);
  return p;
}

void validate(const NoiseProfile& p) {
  if (!(p.sigma_s2 > 0.0) || !std::isfinite(p.sigma_s2)) {
    throw std::invalid_argument("sigma_s2 must be > 0");
  }
  if (!(p.sigma_n2 >= 0.0) || !(p.sigma_nt2 >= 0.0) || !(p.sigma_nch2 >= 0.0)) {
    throw std::invalid_argument("noise variances must be >= 0");
  }
  if (!(p.power > 0.0)) throw std::invalid_argument("power must be > 0");
}

void validate(const BetaFactors& b) {
  if (!(b.beta_i > 0.0 && b.beta_i <= 1.0) || !(b.beta_ch > 0.0 && b.beta_ch <= 1.0)) {
    throw std::invalid_argument("beta factors must lie in (0, 1]");
  }
}

double beta_node(const NoiseProfile& p) {
  return p.sigma_s2 / (p.sigma_s2 + p.sigma_n2 + p.sigma_nt2);
}

double beta_ch(const NoiseProfile& p) { return p.sigma_s2 / (p.sigma_s2 + p.sigma_nch2); }

BetaFactors betas(const NoiseProfile& p) { return {beta_node(p), beta_ch(p)}; }

double alpha(const NoiseProfile& p) {
  return std::sqrt(p.power / (p.sigma_s2 + p.sigma_n2 + p.sigma_nt2));
}

std::string_view to_string(Variant v) {
  return v == Variant::AsPrinted ? "as-printed" : "noise-consistent";
}

Variant parse_variant(std::string_view text) {
  if (text == "as-printed") return Variant::AsPrinted;
  if (text == "noise-consistent") return Variant::NoiseConsistent;
  throw std::invalid_argument("unknown variant '" + std::string(text) +
                              "' (expected as-printed or noise-consistent)");
}

AccuracyTerms accuracy_terms(const Topology& topology, const CorrelationModel& model,
                             const BetaFactors& b, Variant variant) {
  const Index m = topology.size();
  if (m < 1) throw std::invalid_argument("accuracy: m must be >= 1");
  validate(model);
  validate(b);

  const std::vector<Index> rest = topology.non_ch();
  const Index n = static_cast<Index>(rest.size());
  Points others(2, n);
  for (Index k = 0; k < n; ++k) others.col(k) = topology.nodes.col(rest[static_cast<std::size_t>(k)]);
  const Position ch = topology.ch_position();

  const double sum_event = kernel(distances_from(topology.event, others).array(), model).sum();
  const double k_event_ch = kernel((ch - topology.event).norm(), model);
  const double sum_ch = kernel(distances_from(ch, others).array(), model).sum();
  // Ordered pairs of distinct nodes: full kernel sum minus the unit diagonal.
  const double sum_pairs =
      n > 0 ? kernel(pairwise_distances(others).array(), model).sum() - static_cast<double>(n) : 0.0;

  const double md = static_cast<double>(m);
  const double inv_m2 = 1.0 / (md * md);

  AccuracyTerms t;
  t.gain_nodes = (2.0 / md) * b.beta_i * sum_event;
  t.gain_ch = (2.0 / md) * b.beta_ch * k_event_ch;
  t.cross_nodes = -inv_m2 * b.beta_i * b.beta_i * sum_pairs;
  t.self_nodes = -inv_m2 * static_cast<double>(n) * b.beta_i;
  t.cross_ch = -inv_m2 * 2.0 * b.beta_ch * b.beta_i * sum_ch;
  t.self_ch = -inv_m2 * (variant == Variant::AsPrinted ? b.beta_ch * b.beta_ch : b.beta_ch);
  return t;
}

AccuracyValue accuracy_closed_form(const Topology& topology, const CorrelationModel& model,
                                   const BetaFactors& b, Variant variant) {
  return {accuracy_terms(topology, model, b, variant).total(), variant, topology.size()};
}

}  // namespace dacc
