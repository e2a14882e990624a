#include "dacc/config.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace dacc;

TEST_CASE("minimal document gets defaults") {
  const auto c = parse_config("experiment: single\ntheta1: [50, 400]\nbeta: 1\n");
  CHECK(c.kind == ExperimentKind::Single);
  REQUIRE(c.models.size() == 2);
  CHECK(c.models[0] == CorrelationModel{50, 1});
  CHECK(c.models[1] == CorrelationModel{400, 1});
  CHECK(c.variant == Variant::NoiseConsistent);
  CHECK(c.trials == 100000);
  CHECK(c.effective_betas() == BetaFactors{1, 1});
  CHECK(c.topology_source == TopologySource::Grid);
  CHECK(c.output_path.empty());
}

TEST_CASE("full document") {
  const char* doc = R"(
experiment: grid-density
variant: as-printed
models:
  - {theta1: 50, theta2: 1.5}
  - theta1: 400
noise: {sigma_s2: 2, sigma_n2: 0.5, sigma_nt2: 0.5, sigma_nch2: 1, power: 3}
monte_carlo: true
trials: 5000
seed: 7
epsilon: 0.01
ordering: farthest-first
grid: {spacing: 10, region: [0, 0, 40, 40], event: [20, 20], ch_corner: [40, 40], increment: 2}
output: {path: out.csv, format: both}
)";
  const auto c = parse_config(doc);
  CHECK(c.variant == Variant::AsPrinted);
  CHECK(c.models[0] == CorrelationModel{50, 1.5});
  CHECK(c.models[1] == CorrelationModel{400, 1});
  REQUIRE(c.noise);
  CHECK(c.effective_betas().beta_i == doctest::Approx(2.0 / 3.0));
  CHECK(c.effective_betas().beta_ch == doctest::Approx(2.0 / 3.0));
  CHECK(c.effective_profile().power == 3.0);
  CHECK(c.monte_carlo);
  CHECK(c.trials == 5000);
  CHECK(c.seed == 7);
  CHECK(c.ordering == ClusterOrdering::FarthestFirst);
  CHECK(c.grid.setup.spacing == 10.0);
  CHECK(c.grid.setup.region == Region{0, 0, 40, 40});
  CHECK(c.grid.increment == 2);
  CHECK(c.output_format == OutputFormat::Both);
}

TEST_CASE("ranges expand inclusively") {
  const auto c = parse_config(
      "experiment: circle-radius\ntheta1: 50\nbeta: 1\ncircle: {m: 4, radii: {start: 1, stop: 50, step: 1}}\n");
  REQUIRE(c.circle.radii.size() == 50);
  CHECK(c.circle.radii.front() == 1.0);
  CHECK(c.circle.radii.back() == 50.0);
  const auto n = parse_config("experiment: node-count\ntheta1: 50\nbeta: 1\ncircle: {ms: {start: 2, stop: 20}}\n");
  CHECK(n.circle.ms.size() == 19);
}

TEST_CASE("semantic errors name the violated invariant") {
  auto message = [](const std::string& doc) {
    try {
      parse_config(doc);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("experiment: single\ntheta1: 50\nbeta: 1\nnoise: {sigma_s2: 1}\n").find("ambiguous beta source") !=
        std::string::npos);
  CHECK(message("experiment: single\ntheta1: 50\n").find("missing beta source") != std::string::npos);
  CHECK(message("experiment: single\ntheta1: 50\ntheta2: 2.5\nbeta: 1\n").find("(0, 2]") != std::string::npos);
  CHECK(message("experiment: single\ntheta1: -1\nbeta: 1\n").find("theta1") != std::string::npos);
  CHECK(message("experiment: single\ntheta1: 50\nbeta: 1.5\n").find("(0, 1]") != std::string::npos);
  CHECK(message("experiment: single\ntheta1: 50\nbeta: 1\ntrials: 1\n").find("trials") != std::string::npos);
  CHECK(message("experiment: orbit\ntheta1: 50\nbeta: 1\n").find("unknown experiment") != std::string::npos);
  CHECK(message("experiment: circle-radius\ntheta1: 50\nbeta: 1\n").find("circle.radii") != std::string::npos);
  CHECK(message("experiment: single\ntheta1: 50\nbeta: 1\nepsilon: 0\n").find("epsilon") != std::string::npos);
}

TEST_CASE("syntax and type errors carry line numbers") {
  try {
    parse_config("experiment: single\ntheta1: 50\nbeta: 1\ntrials: many\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 4") != std::string::npos);
    CHECK(what.find("trials") != std::string::npos);
  }
  try {
    parse_config("experiment: single\ntheta1: [50\nbeta: 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  try {
    parse_config("experiment: single\ntheta1: 50\nbeta: 1\ngrid: {spacng: 5}\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("spacng") != std::string::npos);
  }
}

TEST_CASE("overrides take precedence and reach every key") {
  const std::string doc = "experiment: single\ntheta1: 50\nbeta: 1\nseed: 1\n";
  const std::vector<std::string> overrides{"seed=9", "grid.spacing=10", "models=[{theta1: 7, theta2: 2}]",
                                           "beta.beta_ch=0.5", "beta.beta_i=0.25", "output.path=x.csv"};
  const auto c = parse_config(doc, overrides);
  CHECK(c.seed == 9);
  CHECK(c.grid.setup.spacing == 10.0);
  REQUIRE(c.models.size() == 1);
  CHECK(c.models[0] == CorrelationModel{7, 2});
  CHECK(c.effective_betas() == BetaFactors{0.25, 0.5});
  CHECK(c.output_path == "x.csv");

  const std::vector<std::string> bad{"seed"};
  CHECK_THROWS_AS(parse_config(doc, bad), ConfigError);
  const std::vector<std::string> from_nothing{"experiment=single", "theta1=50", "beta=1"};
  CHECK(parse_config("", from_nothing).models.size() == 1);
}

TEST_CASE("load_config reports missing files") {
  CHECK_THROWS_WITH_AS(load_config("/nonexistent/exp.yaml"), doctest::Contains("not found"), ConfigError);
}

TEST_CASE("build_topology sources") {
  auto c = parse_config("experiment: single\ntheta1: 50\nbeta: 1\ngrid: {prefix: 4}\n");
  const Topology g = build_topology(c);
  CHECK(g.size() == 4);
  c = parse_config("experiment: single\ntheta1: 50\nbeta: 1\ntopology: {source: circle}\ncircle: {m: 6, radius: 2}\n");
  CHECK(build_topology(c).size() == 6);
  c = parse_config("experiment: single\ntheta1: 50\nbeta: 1\ntopology: {source: random}\nrandom: {m: 11}\nseed: 3\n");
  CHECK(build_topology(c).size() == 11);
  c = parse_config("experiment: single\ntheta1: 50\nbeta: 1\ngrid: {prefix: 60}\n");
  CHECK_THROWS_AS(build_topology(c), ConfigError);
}

TEST_CASE("run produces tables and summaries") {
  std::ostringstream out;
  const auto c = parse_config(
      "experiment: minimal-cluster\ntheta1: 400\nbeta: 0.85\nvariant: as-printed\nepsilon: 0.02\n"
      "ordering: farthest-first\n");
  const ResultTable t = run(c, out);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.number(0, "full_m") == 48.0);
  CHECK(out.str().find("p = ") != std::string::npos);
  CHECK(out.str().find("epsilon 0.0200") != std::string::npos);

  std::ostringstream out2;
  const auto s = parse_config(
      "experiment: single\ntheta1: 50\nbeta: 1\ngrid: {prefix: 4}\nmonte_carlo: true\ntrials: 2000\nseed: 5\n");
  const ResultTable st = run(s, out2);
  CHECK(st.number(0, "d_a") == doctest::Approx(0.6770852428604991).epsilon(1e-12));
  CHECK(st.number(0, "trials") == 2000.0);
  CHECK(out2.str().find("d_a min: 0.6771") != std::string::npos);
}
