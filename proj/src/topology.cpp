#include "dacc/topology.hpp"

#include "dacc/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace dacc {

std::vector<Index> Topology::non_ch() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(std::max<Index>(size() - 1, 0)));
  for (Index i = 0; i < size(); ++i) {
    if (i != ch) out.push_back(i);
  }
  return out;
}

Topology Topology::subset(std::span<const Index> indices) const {
  Topology out;
  out.region = region;
  out.event = event;
  out.label = label;
  out.total_deployed = total_deployed;
  out.nodes.resize(2, static_cast<Index>(indices.size()));
  std::optional<Index> new_ch;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index i = indices[k];
    if (i < 0 || i >= size()) throw std::invalid_argument("subset: node index out of range");
    out.nodes.col(static_cast<Index>(k)) = nodes.col(i);
    if (i == ch) new_ch = static_cast<Index>(k);
  }
  if (!new_ch) throw std::invalid_argument("subset: the cluster head must be retained");
  out.ch = *new_ch;
  return out;
}

std::vector<std::string> validate(const Topology& t) {
  if (t.size() < 1) throw std::invalid_argument("topology: at least one node (the CH) is required");
  if (t.ch < 0 || t.ch >= t.size()) throw std::invalid_argument("topology: CH index out of range");
  if (!t.event.allFinite() || !t.nodes.allFinite()) {
    throw std::invalid_argument("topology: coordinates must be finite");
  }
  std::vector<std::string> warnings;
  if (t.region.degenerate()) return warnings;
  if (!t.region.contains(t.event)) warnings.emplace_back("event lies outside the region");
  for (Index i = 0; i < t.size(); ++i) {
    if (!t.region.contains(t.node(i))) {
      warnings.push_back("node " + std::to_string(i) + " lies outside the region");
    }
  }
  return warnings;
}

Topology make_circle(Index m, double radius, const Position& center) {
  if (m < 1) throw std::invalid_argument("make_circle: m must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("make_circle: radius must be > 0");
  Topology t;
  t.region = {center.x() - radius, center.y() - radius, center.x() + radius, center.y() + radius};
  t.event = center;
  t.ch = 0;
  t.nodes.resize(2, m);
  for (Index k = 0; k < m; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    t.nodes.col(k) = center + radius * Position(std::cos(angle), std::sin(angle));
  }
  t.label = "circle m=" + std::to_string(m);
  return t;
}

namespace {

Index lattice_count(double extent, double spacing) {
  return static_cast<Index>(std::floor(extent / spacing + 1e-9)) + 1;
}

}  // namespace

Topology make_grid(double spacing, const Region& region, const Position& event,
                   const Position& ch_corner) {
  if (!(spacing > 0.0)) throw std::invalid_argument("make_grid: spacing must be > 0");
  if (region.degenerate()) throw std::invalid_argument("make_grid: region is degenerate");
  if (spacing > region.width() || spacing > region.height()) {
    throw std::invalid_argument("make_grid: spacing larger than region");
  }
  const Index nx = lattice_count(region.width(), spacing);
  const Index ny = lattice_count(region.height(), spacing);
  const double coincide_tol = 1e-9 * spacing;

  std::vector<Position> points;
  points.reserve(static_cast<std::size_t>(nx * ny));
  for (Index ix = 0; ix < nx; ++ix) {
    for (Index iy = 0; iy < ny; ++iy) {
      const Position p(region.x_min + spacing * static_cast<double>(ix),
                       region.y_min + spacing * static_cast<double>(iy));
      if ((p - event).norm() <= coincide_tol) continue;
      points.push_back(p);
    }
  }

  Topology t;
  t.region = region;
  t.event = event;
  t.nodes.resize(2, static_cast<Index>(points.size()));
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < t.size(); ++i) {
    t.nodes.col(i) = points[static_cast<std::size_t>(i)];
    const double d = (points[static_cast<std::size_t>(i)] - ch_corner).norm();
    if (d < best) {
      best = d;
      t.ch = i;
    }
  }
  t.label = "grid spacing=" + std::to_string(spacing);
  return t;
}

Topology make_random(Index m, const Region& region, const Position& event,
                     const std::optional<Position>& ch, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("make_random: m must be >= 1");
  if (region.degenerate()) throw std::invalid_argument("make_random: region is degenerate");
  Rng rng(seed);
  auto draw = [&] {
    const double x = rng.uniform(region.x_min, region.x_max);
    const double y = rng.uniform(region.y_min, region.y_max);
    return Position(x, y);
  };
  Topology t;
  t.region = region;
  t.event = event;
  t.ch = 0;
  t.nodes.resize(2, m);
  t.nodes.col(0) = ch ? *ch : draw();
  for (Index i = 1; i < m; ++i) t.nodes.col(i) = draw();
  t.label = "random m=" + std::to_string(m) + " seed=" + std::to_string(seed);
  return t;
}

Topology elect_cluster_head(Topology topology, std::uint64_t seed) {
  if (topology.size() < 1) throw std::invalid_argument("elect_cluster_head: empty topology");
  Rng rng(seed);
  topology.ch = static_cast<Index>(rng() % static_cast<std::uint64_t>(topology.size()));
  return topology;
}

std::vector<Index> order_by_event_distance(const Topology& t, Ordering direction) {
  const Vector d = t.event_distances();
  std::vector<Index> rest = t.non_ch();
  const bool nearest = direction == Ordering::NearestFirst;
  std::sort(rest.begin(), rest.end(), [&](Index a, Index b) {
    if (d(a) != d(b)) return nearest ? d(a) < d(b) : d(a) > d(b);
    if (t.nodes(0, a) != t.nodes(0, b)) return t.nodes(0, a) < t.nodes(0, b);
    if (t.nodes(1, a) != t.nodes(1, b)) return t.nodes(1, a) < t.nodes(1, b);
    return a < b;
  });
  std::vector<Index> out;
  out.reserve(rest.size() + 1);
  out.push_back(t.ch);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

SpatialModelConditions check_spatial_conditions(const Topology& t) {
  SpatialModelConditions c;
  c.nodes_sense_event = t.size() >= 2;
  c.node_pairs_correlated = t.size() >= 3;
  c.nodes_reach_ch = true;
  return c;
}

}  // namespace dacc
