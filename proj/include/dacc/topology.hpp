#pragma once

#include "dacc/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dacc {

/// One awake cluster sensing a point event. The cluster is fully connected,
/// so no adjacency is stored. `nodes` holds every awake node including the
/// cluster head (CH) at column `ch`.
struct Topology {
  Region region;
  Position event = Position::Zero();
  Index ch = 0;
  Points nodes;
  std::string label;
  std::optional<std::int64_t> total_deployed;

  Index size() const { return nodes.cols(); }
  Position node(Index i) const { return nodes.col(i); }
  Position ch_position() const { return nodes.col(ch); }

  double event_distance(Index i) const { return (nodes.col(i) - event).norm(); }
  double distance(Index i, Index j) const { return (nodes.col(i) - nodes.col(j)).norm(); }

  /// d_{S,i} for every node, in node order.
  Vector event_distances() const { return distances_from(event, nodes); }

  /// Indices of every node other than the CH, ascending.
  std::vector<Index> non_ch() const;

  /// Sub-cluster keeping the listed nodes in the given order. The CH must be
  /// among them; its new index is updated accordingly.
  Topology subset(std::span<const Index> indices) const;
};

/// Throws std::invalid_argument when m = 0, the CH index is out of range or a
/// coordinate is not finite. Returns warnings for points outside the region.
std::vector<std::string> validate(const Topology& topology);

/// m nodes equally spaced on a circle (angles 2*pi*k/m from angle 0) around
/// the event; node 0 is the CH.
Topology make_circle(Index m, double radius, const Position& center = Position::Zero());

/// Inclusive lattice over `region` with the given spacing. A lattice point
/// coinciding with the event is dropped; the CH is the node nearest
/// `ch_corner`. Lattice order is x-major.
Topology make_grid(double spacing, const Region& region, const Position& event,
                   const Position& ch_corner);

/// CH at `ch` (or drawn uniformly over the region when nullopt) at index 0,
/// followed by m - 1 nodes drawn uniformly over the region.
Topology make_random(Index m, const Region& region, const Position& event,
                     const std::optional<Position>& ch, std::uint64_t seed);

/// Seeded uniform draw over node indices; returns a copy with that node as CH.
Topology elect_cluster_head(Topology topology, std::uint64_t seed);

enum class Ordering { NearestFirst, FarthestFirst };

/// Permutation of node indices sorted by distance to the event, CH pinned
/// first. Ties fall back to (x, y, index) ascending.
std::vector<Index> order_by_event_distance(const Topology& topology, Ordering direction);

/// Conditions a cluster must meet for the spatial correlation model to be
/// fully exercised: at least one non-CH node sensing the event, at least one
/// pair of non-CH nodes (node-to-node correlation) and every node reaching
/// the CH (always true for a fully connected cluster).
struct SpatialModelConditions {
  bool nodes_sense_event = false;
  bool node_pairs_correlated = false;
  bool nodes_reach_ch = true;

  bool satisfied() const { return nodes_sense_event && node_pairs_correlated && nodes_reach_ch; }
};

SpatialModelConditions check_spatial_conditions(const Topology& topology);

}  // namespace dacc
