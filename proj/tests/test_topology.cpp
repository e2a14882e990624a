#include "dacc/random.hpp"
#include "dacc/topology.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace dacc;

namespace {

bool near(const Position& a, const Position& b, double tol = 1e-12) { return (a - b).norm() <= tol; }

const Region kReferenceRegion{0.0, 0.0, 30.0, 30.0};

}  // namespace

TEST_CASE("make_circle places nodes equally spaced from angle 0") {
  const Topology t = make_circle(4, 5.0, Position(0, 0));
  REQUIRE(t.size() == 4);
  CHECK(t.ch == 0);
  CHECK(near(t.node(0), {5, 0}, 1e-12));
  CHECK(near(t.node(1), {0, 5}, 1e-12));
  CHECK(near(t.node(2), {-5, 0}, 1e-12));
  CHECK(near(t.node(3), {0, -5}, 1e-12));
  for (Index i = 0; i < 4; ++i) CHECK(t.event_distance(i) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("make_circle edge cases") {
  const Topology single = make_circle(1, 5.0);
  REQUIRE(single.size() == 1);
  CHECK(near(single.ch_position(), {5, 0}));
  CHECK(single.event_distance(single.ch) == doctest::Approx(5.0));

  const Topology tri = make_circle(3, 2.0);
  const double chord = 2.0 * 2.0 * std::sin(std::acos(-1.0) / 3.0);
  CHECK(chord == doctest::Approx(3.4641016151377544));
  CHECK(tri.distance(0, 1) == doctest::Approx(chord).epsilon(1e-12));
  CHECK(tri.distance(1, 2) == doctest::Approx(chord).epsilon(1e-12));

  CHECK_THROWS_AS(make_circle(0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(make_circle(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_circle(3, -1.0), std::invalid_argument);
}

TEST_CASE("circle radius invariant holds for many sizes") {
  for (Index m = 1; m <= 64; ++m) {
    const double r = 0.5 + 0.37 * static_cast<double>(m);
    const Topology t = make_circle(m, r, Position(3, -2));
    const Vector d = t.event_distances();
    CHECK(((d.array() - r).abs() / r).maxCoeff() <= 1e-12);
  }
}

TEST_CASE("make_grid reproduces the reference 48-node layout") {
  const Topology g = make_grid(5.0, kReferenceRegion, {15, 15}, {0, 0});
  CHECK(g.size() == 48);
  CHECK(near(g.ch_position(), {0, 0}));
  for (Index i = 0; i < g.size(); ++i) CHECK_FALSE(near(g.node(i), {15, 15}));
  CHECK(validate(g).empty());
}

TEST_CASE("make_grid coarse spacings") {
  const Topology corners = make_grid(30.0, kReferenceRegion, {15, 15}, {0, 0});
  CHECK(corners.size() == 4);
  const Topology ring = make_grid(15.0, kReferenceRegion, {15, 15}, {0, 0});
  CHECK(ring.size() == 8);

  CHECK_THROWS_AS(make_grid(31.0, kReferenceRegion, {15, 15}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, kReferenceRegion, {15, 15}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(5.0, Region{0, 0, 0, 30}, {15, 15}, {0, 0}), std::invalid_argument);
}

TEST_CASE("grid distances are spacing times sqrt(a^2 + b^2)") {
  const double spacing = 5.0;
  const Topology g = make_grid(spacing, kReferenceRegion, {15, 15}, {0, 0});
  for (Index i = 0; i < g.size(); ++i) {
    for (Index j = 0; j < g.size(); ++j) {
      const Position delta = (g.node(i) - g.node(j)) / spacing;
      const double a = std::round(delta.x());
      const double b = std::round(delta.y());
      CHECK(std::abs(delta.x() - a) < 1e-12);
      CHECK(std::abs(delta.y() - b) < 1e-12);
      CHECK(g.distance(i, j) == doctest::Approx(spacing * std::hypot(a, b)).epsilon(1e-12));
      CHECK(g.distance(i, j) == g.distance(j, i));
    }
    CHECK(g.distance(i, i) == 0.0);
  }
}

TEST_CASE("make_random is seeded and keeps the CH at index 0") {
  const Topology a = make_random(100, kReferenceRegion, {15, 15}, Position(0, 0), 42);
  CHECK(a.size() == 100);
  CHECK(a.ch == 0);
  CHECK(near(a.ch_position(), {0, 0}));
  CHECK(validate(a).empty());

  const Topology b = make_random(100, kReferenceRegion, {15, 15}, Position(0, 0), 42);
  CHECK(a.nodes == b.nodes);
  const Topology c = make_random(100, kReferenceRegion, {15, 15}, Position(0, 0), 43);
  CHECK(a.nodes != c.nodes);

  const Topology lone = make_random(1, kReferenceRegion, {15, 15}, Position(0, 0), 7);
  CHECK(lone.size() == 1);
  CHECK(near(lone.ch_position(), {0, 0}));

  const Topology drawn = make_random(5, kReferenceRegion, {15, 15}, std::nullopt, 7);
  CHECK(kReferenceRegion.contains(drawn.ch_position()));
  CHECK_THROWS_AS(make_random(0, kReferenceRegion, {15, 15}, Position(0, 0), 1), std::invalid_argument);
}

TEST_CASE("random draws are spread over the region") {
  const Topology t = make_random(5000, kReferenceRegion, {15, 15}, Position(0, 0), 9);
  const Eigen::Vector2d mean = t.nodes.rightCols(4999).rowwise().mean();
  CHECK(mean.x() == doctest::Approx(15.0).epsilon(0.02));
  CHECK(mean.y() == doctest::Approx(15.0).epsilon(0.02));
}

TEST_CASE("order_by_event_distance") {
  SUBCASE("equidistant corners fall back to coordinate order") {
    const Topology g = make_grid(30.0, kReferenceRegion, {15, 15}, {30, 30});
    const auto order = order_by_event_distance(g, Ordering::NearestFirst);
    REQUIRE(order.size() == 4);
    CHECK(order.front() == g.ch);
    CHECK(near(g.node(order[1]), {0, 0}));
    CHECK(near(g.node(order[2]), {0, 30}));
    CHECK(near(g.node(order[3]), {30, 0}));
  }
  SUBCASE("distinct distances sort ascending") {
    Topology t;
    t.region = {0, 0, 10, 10};
    t.event = {0, 0};
    t.nodes.resize(2, 4);
    t.nodes << 4, 3, 1, 2,
               0, 0, 0, 0;
    t.ch = 0;
    const auto order = order_by_event_distance(t, Ordering::NearestFirst);
    CHECK(order == std::vector<Index>{0, 2, 3, 1});
  }
  SUBCASE("farthest-first on the grid starts with the outer corners") {
    const Topology g = make_grid(5.0, kReferenceRegion, {15, 15}, {0, 0});
    const auto order = order_by_event_distance(g, Ordering::FarthestFirst);
    CHECK(order.front() == g.ch);
    std::set<std::pair<double, double>> first;
    for (std::size_t k = 1; k < 4; ++k) first.insert({g.nodes(0, order[k]), g.nodes(1, order[k])});
    CHECK(first == std::set<std::pair<double, double>>{{0, 30}, {30, 0}, {30, 30}});
    CHECK(g.event_distance(order[4]) < g.event_distance(order[3]));
  }
}

TEST_CASE("ordering is a permutation and reverses the suffix for distinct distances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Topology t = make_random(30, kReferenceRegion, {15, 15}, Position(0, 0), seed);
    auto near_first = order_by_event_distance(t, Ordering::NearestFirst);
    auto far_first = order_by_event_distance(t, Ordering::FarthestFirst);
    std::vector<Index> sorted = near_first;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Index> iota(static_cast<std::size_t>(t.size()));
    std::iota(iota.begin(), iota.end(), Index{0});
    CHECK(sorted == iota);
    CHECK(near_first.front() == t.ch);
    std::reverse(far_first.begin() + 1, far_first.end());
    CHECK(near_first == far_first);
  }
}

TEST_CASE("validate rejects broken topologies and warns on outside points") {
  Topology t = make_circle(3, 5.0);
  t.region = {0, 0, 1, 1};
  const auto warnings = validate(t);
  CHECK(warnings.size() >= 2);

  Topology bad_ch = make_circle(3, 5.0);
  bad_ch.ch = 3;
  CHECK_THROWS_AS(validate(bad_ch), std::invalid_argument);

  Topology empty;
  CHECK_THROWS_AS(validate(empty), std::invalid_argument);

  Topology nan = make_circle(2, 1.0);
  nan.nodes(0, 1) = std::nan("");
  CHECK_THROWS_AS(validate(nan), std::invalid_argument);
}

TEST_CASE("subset keeps order and retargets the CH") {
  const Topology g = make_grid(5.0, kReferenceRegion, {15, 15}, {0, 0});
  const std::vector<Index> keep{5, g.ch, 7};
  const Topology s = g.subset(keep);
  CHECK(s.size() == 3);
  CHECK(s.ch == 1);
  CHECK(near(s.node(0), g.node(5)));
  const std::vector<Index> no_ch{5, 7};
  CHECK_THROWS_AS(g.subset(no_ch), std::invalid_argument);
}

TEST_CASE("random CH election is a seeded draw over node indices") {
  const Topology g = make_grid(5.0, kReferenceRegion, {15, 15}, {0, 0});
  const Topology a = elect_cluster_head(g, 11);
  const Topology b = elect_cluster_head(g, 11);
  CHECK(a.ch == b.ch);
  std::set<Index> seen;
  for (std::uint64_t s = 0; s < 200; ++s) seen.insert(elect_cluster_head(g, s).ch);
  CHECK(seen.size() > 30);
}

TEST_CASE("spatial model conditions need two non-CH nodes") {
  CHECK_FALSE(check_spatial_conditions(make_circle(1, 5.0)).satisfied());
  const auto two = check_spatial_conditions(make_circle(2, 5.0));
  CHECK(two.nodes_sense_event);
  CHECK_FALSE(two.node_pairs_correlated);
  CHECK_FALSE(two.satisfied());
  CHECK(check_spatial_conditions(make_circle(3, 5.0)).satisfied());
}

TEST_CASE("substreams differ and Rng is reproducible") {
  CHECK(substream_seed(1, {0}) != substream_seed(1, {1}));
  CHECK(substream_seed(1, {2, 3}) != substream_seed(1, {3, 2}));
  Rng a(5);
  Rng b(5);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  Rng u(123);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK((x >= 0.0 && x < 1.0));
  }
}
