#include "dacc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace dacc {

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

FieldSampler::FieldSampler(const Topology& topology, const CorrelationModel& model,
                           double sigma_s2) {
  validate(model);
  if (!(sigma_s2 > 0.0)) throw std::invalid_argument("sigma_s2 must be > 0");
  const Points pts = field_points(topology);

  Points distinct(2, pts.cols());
  Index count = 0;
  slot_.resize(static_cast<std::size_t>(pts.cols()));
  for (Index p = 0; p < pts.cols(); ++p) {
    Index found = -1;
    for (Index q = 0; q < count; ++q) {
      if (pts.col(p) == distinct.col(q)) {
        found = q;
        break;
      }
    }
    if (found < 0) {
      distinct.col(count) = pts.col(p);
      found = count++;
    }
    slot_[static_cast<std::size_t>(p)] = found;
  }

  const Matrix d = pairwise_distances(distinct.leftCols(count));
  const Matrix cov = sigma_s2 * kernel(d.array(), model).matrix();
  factor_ = cholesky(cov, sigma_s2);
}

FieldSample FieldSampler::operator()(Rng& rng) const {
  const Index k = factor_.lower.rows();
  Vector g(k);
  for (Index i = 0; i < k; ++i) g(i) = rng.normal();
  const Vector values = factor_.lower.triangularView<Eigen::Lower>() * g;

  FieldSample out;
  out.s = values(slot_.front());
  out.node_values.resize(size());
  for (Index i = 0; i < size(); ++i) out.node_values(i) = values(slot_[static_cast<std::size_t>(i + 1)]);
  return out;
}

FieldSample sample_field(const Topology& topology, const CorrelationModel& model,
                         double sigma_s2, Rng& rng) {
  return FieldSampler(topology, model, sigma_s2)(rng);
}

ChainObservation simulate_chain(const FieldSample& sample, const NoiseProfile& profile,
                                const Topology& topology, Rng& rng) {
  const Index m = topology.size();
  if (sample.node_values.size() != m) {
    throw std::invalid_argument("simulate_chain: sample does not match topology");
  }
  const double b_i = beta_node(profile);
  const double b_ch = beta_ch(profile);
  const double a = alpha(profile);
  const double sd_n = std::sqrt(profile.sigma_n2);
  const double sd_nt = std::sqrt(profile.sigma_nt2);
  const double sd_nch = std::sqrt(profile.sigma_nch2);

  ChainObservation obs;
  obs.x = Vector::Zero(m);
  obs.y = Vector::Zero(m);
  obs.z = Vector::Zero(m);
  obs.s_hat_nodes = Vector::Zero(m);

  for (Index i = 0; i < m; ++i) {
    const double s_i = sample.node_values(i);
    if (i == topology.ch) {
      obs.x_ch = s_i + sd_nch * rng.normal();
      obs.x(i) = obs.x_ch;
      obs.s_hat_ch = b_ch * obs.x_ch;
      obs.s_hat_nodes(i) = obs.s_hat_ch;
      continue;
    }
    const double n_i = sd_n * rng.normal();
    const double n_ti = sd_nt * rng.normal();
    obs.x(i) = s_i + n_i;
    obs.y(i) = obs.x(i) + n_ti;
    obs.z(i) = a * obs.y(i);
    obs.s_hat_nodes(i) = b_i * (s_i + n_i + n_ti);
    // The MMSE decoder applied to Z_i recovers the same estimate: alpha cancels.
    const double via_z = (b_i / a) * obs.z(i);
    if (std::abs(via_z - obs.s_hat_nodes(i)) >
        1e-12 * std::max(1.0, std::abs(obs.s_hat_nodes(i)))) {
      throw std::logic_error("simulate_chain: scaled decoder disagrees with direct estimate");
    }
  }
  obs.s_hat = compensated_sum({obs.s_hat_nodes.data(), static_cast<std::size_t>(m)}) /
              static_cast<double>(m);
  return obs;
}

McEstimate mc_accuracy(const Topology& topology, const CorrelationModel& model,
                       const NoiseProfile& profile, const McOptions& options) {
  if (options.trials < 2) throw std::invalid_argument("mc_accuracy: trials must be >= 2");
  validate(topology);
  validate(profile);
  const FieldSampler sampler(topology, model, profile.sigma_s2);

  const auto n = static_cast<std::size_t>(options.trials);
  std::vector<double> stat(n);
  std::vector<std::exception_ptr> failures(64);
  auto run_range = [&](std::size_t worker, std::size_t begin, std::size_t end) {
    try {
      for (std::size_t t = begin; t < end; ++t) {
        Rng rng(substream_seed(options.master_seed, {static_cast<std::uint64_t>(t)}));
        const FieldSample sample = sampler(rng);
        const ChainObservation obs = simulate_chain(sample, profile, topology, rng);
        const double err = sample.s - obs.s_hat;
        stat[t] = 1.0 - err * err / profile.sigma_s2;
      }
    } catch (...) {
      failures[worker] = std::current_exception();
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, 64);
  if (threads == 1 || n < 4096) {
    run_range(0, 0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0, w = 0; begin < n; begin += chunk, ++w) {
      pool.emplace_back(run_range, w, begin, std::min(n, begin + chunk));
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  const double mean = compensated_sum(stat) / static_cast<double>(n);
  std::vector<double> sq(n);
  std::transform(stat.begin(), stat.end(), sq.begin(), [mean](double v) {
    const double d = v - mean;
    return d * d;
  });
  const double var = compensated_sum(sq) / static_cast<double>(n - 1);

  McEstimate est;
  est.mean_accuracy = mean;
  est.std_error = std::sqrt(var / static_cast<double>(n));
  est.trials = options.trials;
  est.master_seed = options.master_seed;
  est.jitter = sampler.jitter();
  return est;
}

}  // namespace dacc
