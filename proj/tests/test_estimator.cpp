#include "dacc/estimator.hpp"
#include "dacc/experiments.hpp"
#include "dacc/random.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace dacc;

namespace {

Topology corners_m4() { return reference_grid_prefix(4); }

Topology coincident(Index m, const Position& at) {
  Topology t;
  t.region = {-1, -1, 1, 1};
  t.event = at;
  t.nodes = Points(2, m);
  for (Index i = 0; i < m; ++i) t.nodes.col(i) = at;
  return t;
}

Topology random_cluster(Rng& rng) {
  const auto m = static_cast<Index>(1 + rng() % 12);
  Topology t = make_random(m, {0, 0, 40, 40}, {rng.uniform(0, 40), rng.uniform(0, 40)}, std::nullopt, rng());
  t.ch = static_cast<Index>(rng() % static_cast<std::uint64_t>(m));
  return t;
}

}  // namespace

TEST_CASE("beta and alpha factors") {
  CHECK(beta_node({1, 0, 0, 0, 1}) == 1.0);
  CHECK(beta_node({1, 0.5, 0.5, 0, 1}) == 0.5);
  CHECK(beta_node({4, 1, 1, 0, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK(beta_ch({1, 0, 0, 0, 1}) == 1.0);
  CHECK(beta_ch({1, 0, 0, 1, 1}) == 0.5);
  CHECK(beta_ch({1, 0, 0, 1.0 / 9.0, 1}) == doctest::Approx(0.9));
  CHECK(alpha({1, 0, 0, 0, 1}) == 1.0);
  CHECK(alpha({1, 0, 0, 0, 4}) == 2.0);
  CHECK(alpha({2, 1, 1, 0, 1}) == 0.5);
}

TEST_CASE("noise profile from betas reproduces them") {
  const NoiseProfile p = NoiseProfile::from_betas(0.8545, 0.7, 2.0, 3.0);
  CHECK(beta_node(p) == doctest::Approx(0.8545).epsilon(1e-14));
  CHECK(beta_ch(p) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(p.sigma_n2 == doctest::Approx(p.sigma_nt2));
  CHECK_THROWS_AS(NoiseProfile::from_betas(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseProfile::from_betas(1.0, 1.2), std::invalid_argument);
}

TEST_CASE("closed form: single observer") {
  const Topology at_event = coincident(1, {0, 0});
  for (auto v : {Variant::AsPrinted, Variant::NoiseConsistent}) {
    CHECK(accuracy_closed_form(at_event, {50, 1}, {1, 1}, v).value == 1.0);
  }
  const Topology far = make_circle(1, 50.0);
  const double expect = 2.0 * std::exp(-1.0) - 1.0;
  CHECK(accuracy_closed_form(far, {50, 1}, {1, 1}).value == doctest::Approx(expect).epsilon(1e-14));
  CHECK(expect == doctest::Approx(-0.264241).epsilon(1e-6));
}

TEST_CASE("closed form: reference grid corners") {
  const Topology t = corners_m4();
  REQUIRE(t.size() == 4);
  const double d50 = accuracy_closed_form(t, {50, 1}, {1, 1}).value;
  CHECK(d50 == doctest::Approx(0.6770852428604991).epsilon(1e-12));
  CHECK(std::abs(d50 - 0.67705) < 1e-4);
  const double d400 = accuracy_closed_form(t, {400, 1}, {1, 1}).value;
  CHECK(d400 == doctest::Approx(0.9579843553218597).epsilon(1e-12));
  CHECK(std::abs(d400 - 0.958) < 1e-3);
}

TEST_CASE("accuracy terms") {
  const Topology t = corners_m4();
  const auto terms = accuracy_terms(t, {50, 1}, {1, 1}, Variant::NoiseConsistent);
  CHECK(terms.gain_nodes == doctest::Approx(0.5 * 3.0 * 0.6542510918525355).epsilon(1e-12));
  CHECK(terms.total() == accuracy_closed_form(t, {50, 1}, {1, 1}).value);

  const auto single = accuracy_terms(make_circle(1, 3.0), {50, 1}, {0.9, 0.8}, Variant::AsPrinted);
  CHECK(single.gain_nodes == 0.0);
  CHECK(single.cross_nodes == 0.0);
  CHECK(single.self_nodes == 0.0);
  CHECK(single.cross_ch == 0.0);

  const auto pair = accuracy_terms(make_circle(2, 5.0), {50, 1}, {0.9, 0.8}, Variant::AsPrinted);
  CHECK(pair.cross_nodes == 0.0);
  CHECK(pair.self_nodes != 0.0);

  CHECK_THROWS_AS(accuracy_terms(Topology{}, {50, 1}, {1, 1}, Variant::AsPrinted), std::invalid_argument);
  CHECK_THROWS_AS(accuracy_terms(t, {50, 1}, {0, 1}, Variant::AsPrinted), std::invalid_argument);
}

TEST_CASE("noise-consistent closed form agrees with the moment oracle") {
  Rng rng(2024);
  for (int k = 0; k < 200; ++k) {
    const Topology t = random_cluster(rng);
    const CorrelationModel model{rng.uniform(5, 400), rng.uniform(0.1, 2.0)};
    const double b_i = rng.uniform(0.05, 1.0);
    const double b_ch = rng.uniform(0.05, 1.0);
    const NoiseProfile p = NoiseProfile::from_betas(b_i, b_ch, rng.uniform(0.5, 3.0));
    const double oracle = oracle::accuracy_by_moments(t, model, p);
    const double closed = accuracy_closed_form(t, model, betas(p), Variant::NoiseConsistent).value;
    CHECK(std::abs(oracle - closed) <= 1e-12);
  }
}

TEST_CASE("variant gap identity") {
  Rng rng(77);
  for (int k = 0; k < 100; ++k) {
    const Topology t = random_cluster(rng);
    const CorrelationModel model{rng.uniform(5, 400), rng.uniform(0.1, 2.0)};
    const BetaFactors b{rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)};
    const double gap = accuracy_closed_form(t, model, b, Variant::AsPrinted).value -
                       accuracy_closed_form(t, model, b, Variant::NoiseConsistent).value;
    const double m = static_cast<double>(t.size());
    CHECK(std::abs(gap - (b.beta_ch - b.beta_ch * b.beta_ch) / (m * m)) <= 1e-12);
  }
}

TEST_CASE("accuracy never exceeds one and equals one only for noiseless coincident clusters") {
  Rng rng(5);
  for (int k = 0; k < 300; ++k) {
    const Topology t = random_cluster(rng);
    const CorrelationModel model{rng.uniform(1, 500), rng.uniform(0.1, 2.0)};
    const BetaFactors b{rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0)};
    for (auto v : {Variant::AsPrinted, Variant::NoiseConsistent}) {
      CHECK(accuracy_closed_form(t, model, b, v).value <= 1.0 + 1e-12);
    }
  }
  for (Index m : {1, 2, 4, 8}) {
    const Topology t = coincident(m, {2, 3});
    for (auto v : {Variant::AsPrinted, Variant::NoiseConsistent}) {
      CHECK(accuracy_closed_form(t, {50, 1}, {1, 1}, v).value == 1.0);
      // a lone node is the cluster head, so beta_i has nothing to act on
      if (m > 1) CHECK(accuracy_closed_form(t, {50, 1}, {0.9, 1}, v).value < 1.0);
    }
  }
}

TEST_CASE("moving a circle cluster away from the event lowers accuracy") {
  for (Index m : {1, 2, 4, 9}) {
    for (double theta2 : {0.5, 1.0, 2.0}) {
      double prev = 2.0;
      for (double r = 0.5; r <= 60.0; r += 0.5) {
        const double v = accuracy_closed_form(make_circle(m, r), {50, theta2}, {0.9, 0.85}).value;
        CHECK(v < prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("larger range parameter never lowers accuracy on the experiment topologies") {
  std::vector<Topology> tops;
  for (Index m : {1, 2, 3, 4, 8, 20}) tops.push_back(make_circle(m, 5.0));
  for (Index m = 4; m <= 48; m += 4) tops.push_back(reference_grid_prefix(m));
  for (std::uint64_t s = 0; s < 10; ++s) tops.push_back(make_random(15, {0, 0, 30, 30}, {15, 15}, Position(0, 0), s));
  for (const auto& t : tops) {
    for (const BetaFactors b : {BetaFactors{1, 1}, BetaFactors{0.8545, 0.8545}}) {
      double prev = -10.0;
      for (double theta1 : {50.0, 100.0, 200.0, 400.0, 800.0}) {
        const double v = accuracy_closed_form(t, {theta1, 1}, b).value;
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("variant names") {
  CHECK(parse_variant("as-printed") == Variant::AsPrinted);
  CHECK(parse_variant(to_string(Variant::NoiseConsistent)) == Variant::NoiseConsistent);
  CHECK_THROWS_AS(parse_variant("printed"), std::invalid_argument);
}
