#include "dacc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace dacc {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::CircleRadius: return "circle-radius";
    case ExperimentKind::NodeCount: return "node-count";
    case ExperimentKind::GridDensity: return "grid-density";
    case ExperimentKind::RandomAverage: return "random-average";
    case ExperimentKind::MinimalCluster: return "minimal-cluster";
    case ExperimentKind::Single: return "single";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view text) {
  for (auto kind : {ExperimentKind::CircleRadius, ExperimentKind::NodeCount,
                    ExperimentKind::GridDensity, ExperimentKind::RandomAverage,
                    ExperimentKind::MinimalCluster, ExperimentKind::Single}) {
    if (to_string(kind) == text) return kind;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(text) + "'");
}

BetaFactors ExperimentConfig::effective_betas() const {
  if (beta) return *beta;
  if (noise) return betas(*noise);
  throw ConfigError("missing beta source: set 'beta' or 'noise'");
}

NoiseProfile ExperimentConfig::effective_profile() const {
  if (noise) return *noise;
  const BetaFactors b = effective_betas();
  return NoiseProfile::from_betas(b.beta_i, b.beta_ch);
}

namespace {

std::string where(const YAML::Node& node, std::string_view field) {
  std::string out;
  if (!node.Mark().is_null()) out = "line " + std::to_string(node.Mark().line + 1) + ": ";
  return out + "'" + std::string(field) + "'";
}

template <typename T>
T scalar(const YAML::Node& node, std::string_view field) {
  if (!node.IsDefined()) throw ConfigError("missing key '" + std::string(field) + "'");
  if (!node.IsScalar()) throw ConfigError(where(node, field) + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where(node, field) + ": cannot read '" + node.Scalar() + "' as " +
                      (std::is_integral_v<T> ? "an integer" : std::is_floating_point_v<T> ? "a number" : "text"));
  }
}

void require_keys(const YAML::Node& map, std::string_view section,
                  std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) throw ConfigError(where(map, section) + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where(kv.first, key) + ": unknown key in " + std::string(section));
    }
  }
}

bool present(const YAML::Node& node) { return node.IsDefined() && !node.IsNull(); }

Position position(const YAML::Node& node, std::string_view field) {
  if (!node.IsSequence() || node.size() != 2) {
    throw ConfigError(where(node, field) + " must be an [x, y] pair");
  }
  return {scalar<double>(node[0], field), scalar<double>(node[1], field)};
}

Region region(const YAML::Node& node, std::string_view field) {
  if (node.IsSequence() && node.size() == 4) {
    return {scalar<double>(node[0], field), scalar<double>(node[1], field),
            scalar<double>(node[2], field), scalar<double>(node[3], field)};
  }
  if (node.IsMap()) {
    require_keys(node, field, {"x_min", "y_min", "x_max", "y_max"});
    return {scalar<double>(node["x_min"], "x_min"), scalar<double>(node["y_min"], "y_min"),
            scalar<double>(node["x_max"], "x_max"), scalar<double>(node["y_max"], "y_max")};
  }
  throw ConfigError(where(node, field) + " must be [x_min, y_min, x_max, y_max]");
}

/// A list, or a {start, stop, step} range (stop inclusive).
template <typename T>
std::vector<T> series(const YAML::Node& node, std::string_view field) {
  std::vector<T> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(scalar<T>(item, field));
    return out;
  }
  if (node.IsScalar()) return {scalar<T>(node, field)};
  if (node.IsMap()) {
    require_keys(node, field, {"start", "stop", "step"});
    const T start = scalar<T>(node["start"], "start");
    const T stop = scalar<T>(node["stop"], "stop");
    const T step = present(node["step"]) ? scalar<T>(node["step"], "step") : T(1);
    if (!(step > T(0))) throw ConfigError(where(node, field) + ": step must be > 0");
    const auto count = static_cast<std::int64_t>(std::floor(static_cast<double>(stop - start) /
                                                            static_cast<double>(step) + 1e-9));
    for (std::int64_t k = 0; k <= count; ++k) out.push_back(static_cast<T>(start + static_cast<T>(k) * step));
    return out;
  }
  throw ConfigError(where(node, field) + " must be a list or {start, stop, step}");
}

void set_path(YAML::Node node, std::span<const std::string> parts, const YAML::Node& value) {
  if (parts.size() == 1) {
    node[parts.front()] = value;
    return;
  }
  if (!node[parts.front()].IsMap()) node[parts.front()] = YAML::Node(YAML::NodeType::Map);
  set_path(node[parts.front()], parts.subspan(1), value);
}

void apply_override(YAML::Node root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must have the form key=value");
  }
  std::vector<std::string> parts;
  std::stringstream key(assignment.substr(0, eq));
  for (std::string part; std::getline(key, part, '.');) {
    if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
    parts.push_back(part);
  }
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override '" + assignment + "': " + e.msg);
  }
  set_path(root, parts, value);
}

CorrelationModel read_model(const YAML::Node& node, double default_theta2) {
  CorrelationModel model;
  if (node.IsMap()) {
    require_keys(node, "models", {"theta1", "theta2"});
    if (!present(node["theta1"])) throw ConfigError(where(node, "models") + ": theta1 is required");
    model.theta1 = scalar<double>(node["theta1"], "theta1");
    model.theta2 = present(node["theta2"]) ? scalar<double>(node["theta2"], "theta2") : default_theta2;
  } else {
    model.theta1 = scalar<double>(node, "theta1");
    model.theta2 = default_theta2;
  }
  return model;
}

void check_model(const CorrelationModel& m) {
  if (!(m.theta1 > 0.0)) throw ConfigError("theta1 = " + format_real(m.theta1) + " must be > 0");
  if (!(m.theta2 > 0.0 && m.theta2 <= 2.0)) {
    throw ConfigError("theta2 = " + format_real(m.theta2) + " is out of range (0, 2]");
  }
}

Ordering parse_ordering(const YAML::Node& node) {
  const auto text = scalar<std::string>(node, "ordering");
  if (text == "nearest-first") return Ordering::NearestFirst;
  if (text == "farthest-first") return Ordering::FarthestFirst;
  throw ConfigError(where(node, "ordering") + ": expected nearest-first or farthest-first");
}

template <typename F>
auto wrap(const YAML::Node& node, std::string_view field, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where(node, field) + ": " + e.what());
  }
}

ExperimentConfig from_yaml(const YAML::Node& root) {
  require_keys(root, "document",
               {"experiment", "variant", "models", "theta1", "theta2", "beta", "noise",
                "monte_carlo", "trials", "seed", "threads", "epsilon", "ordering", "circle",
                "grid", "random", "topology", "output"});
  ExperimentConfig c;
  if (!present(root["experiment"])) throw ConfigError("missing 'experiment'");
  c.kind = wrap(root["experiment"], "experiment",
                [&] { return parse_experiment_kind(scalar<std::string>(root["experiment"], "experiment")); });
  if (present(root["variant"])) {
    c.variant = wrap(root["variant"], "variant",
                     [&] { return parse_variant(scalar<std::string>(root["variant"], "variant")); });
  }

  const double default_theta2 = present(root["theta2"]) ? scalar<double>(root["theta2"], "theta2") : 1.0;
  if (present(root["models"])) {
    const YAML::Node models = root["models"];
    if (!models.IsSequence()) throw ConfigError(where(models, "models") + " must be a list");
    for (const auto& m : models) c.models.push_back(read_model(m, default_theta2));
  } else if (present(root["theta1"])) {
    for (double t1 : series<double>(root["theta1"], "theta1")) c.models.push_back({t1, default_theta2});
  }
  if (c.models.empty()) throw ConfigError("missing correlation model: set 'theta1' or 'models'");
  for (const auto& m : c.models) check_model(m);

  const bool has_beta = present(root["beta"]);
  const bool has_noise = present(root["noise"]);
  if (has_beta && has_noise) throw ConfigError("ambiguous beta source: both 'beta' and 'noise' are set");
  if (!has_beta && !has_noise) throw ConfigError("missing beta source: set 'beta' or 'noise'");
  if (has_beta) {
    const YAML::Node b = root["beta"];
    BetaFactors betas;
    if (b.IsScalar()) {
      betas.beta_i = betas.beta_ch = scalar<double>(b, "beta");
    } else {
      require_keys(b, "beta", {"beta_i", "beta_ch"});
      betas.beta_i = scalar<double>(b["beta_i"], "beta_i");
      betas.beta_ch = scalar<double>(b["beta_ch"], "beta_ch");
    }
    if (!(betas.beta_i > 0.0 && betas.beta_i <= 1.0) || !(betas.beta_ch > 0.0 && betas.beta_ch <= 1.0)) {
      throw ConfigError(where(b, "beta") + ": beta factors must lie in (0, 1]");
    }
    c.beta = betas;
  } else {
    const YAML::Node n = root["noise"];
    require_keys(n, "noise", {"sigma_s2", "sigma_n2", "sigma_nt2", "sigma_nch2", "power"});
    NoiseProfile p;
    if (present(n["sigma_s2"])) p.sigma_s2 = scalar<double>(n["sigma_s2"], "sigma_s2");
    if (present(n["sigma_n2"])) p.sigma_n2 = scalar<double>(n["sigma_n2"], "sigma_n2");
    if (present(n["sigma_nt2"])) p.sigma_nt2 = scalar<double>(n["sigma_nt2"], "sigma_nt2");
    if (present(n["sigma_nch2"])) p.sigma_nch2 = scalar<double>(n["sigma_nch2"], "sigma_nch2");
    if (present(n["power"])) p.power = scalar<double>(n["power"], "power");
    wrap(n, "noise", [&] { validate(p); return 0; });
    c.noise = p;
  }

  if (present(root["monte_carlo"])) c.monte_carlo = scalar<bool>(root["monte_carlo"], "monte_carlo");
  if (present(root["trials"])) c.trials = scalar<std::int64_t>(root["trials"], "trials");
  if (c.trials < 2) throw ConfigError("trials = " + std::to_string(c.trials) + " must be >= 2");
  if (present(root["seed"])) c.seed = scalar<std::uint64_t>(root["seed"], "seed");
  if (present(root["threads"])) c.threads = scalar<unsigned>(root["threads"], "threads");
  if (present(root["epsilon"])) c.epsilon = scalar<double>(root["epsilon"], "epsilon");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon = " + format_real(c.epsilon) + " must be > 0");
  if (present(root["ordering"])) {
    c.ordering = wrap(root["ordering"], "ordering", [&] {
      return parse_cluster_ordering(scalar<std::string>(root["ordering"], "ordering"));
    });
  }

  if (present(root["circle"])) {
    const YAML::Node s = root["circle"];
    require_keys(s, "circle", {"m", "radius", "radii", "ms"});
    if (present(s["m"])) c.circle.m = scalar<Index>(s["m"], "m");
    if (present(s["radius"])) c.circle.radius = scalar<double>(s["radius"], "radius");
    if (present(s["radii"])) c.circle.radii = series<double>(s["radii"], "radii");
    if (present(s["ms"])) c.circle.ms = series<Index>(s["ms"], "ms");
  }
  if (present(root["grid"])) {
    const YAML::Node s = root["grid"];
    require_keys(s, "grid", {"spacing", "region", "event", "ch_corner", "increment", "ordering", "prefix"});
    if (present(s["spacing"])) c.grid.setup.spacing = scalar<double>(s["spacing"], "spacing");
    if (present(s["region"])) c.grid.setup.region = region(s["region"], "region");
    if (present(s["event"])) c.grid.setup.event = position(s["event"], "event");
    if (present(s["ch_corner"])) c.grid.setup.ch_corner = position(s["ch_corner"], "ch_corner");
    if (present(s["increment"])) c.grid.increment = scalar<Index>(s["increment"], "increment");
    if (present(s["ordering"])) c.grid.ordering = parse_ordering(s["ordering"]);
    if (present(s["prefix"])) c.grid.prefix = scalar<Index>(s["prefix"], "prefix");
  }
  if (present(root["random"])) {
    const YAML::Node s = root["random"];
    require_keys(s, "random", {"ms", "m", "region", "event", "ch", "runs"});
    if (present(s["ms"])) c.random.ms = series<Index>(s["ms"], "ms");
    if (present(s["m"])) c.random.m = scalar<Index>(s["m"], "m");
    if (present(s["region"])) c.random.setup.region = region(s["region"], "region");
    if (present(s["event"])) c.random.setup.event = position(s["event"], "event");
    if (present(s["ch"])) {
      if (s["ch"].IsScalar() && s["ch"].Scalar() == "random") {
        c.random.setup.ch.reset();
      } else {
        c.random.setup.ch = position(s["ch"], "ch");
      }
    }
    if (present(s["runs"])) c.random.runs = scalar<Index>(s["runs"], "runs");
    if (c.random.runs < 1) throw ConfigError(where(s, "runs") + " must be >= 1");
  }
  if (present(root["topology"])) {
    const YAML::Node s = root["topology"];
    require_keys(s, "topology", {"source", "file"});
    if (present(s["source"])) {
      const auto src = scalar<std::string>(s["source"], "source");
      if (src == "grid") c.topology_source = TopologySource::Grid;
      else if (src == "circle") c.topology_source = TopologySource::Circle;
      else if (src == "random") c.topology_source = TopologySource::Random;
      else if (src == "file") c.topology_source = TopologySource::File;
      else throw ConfigError(where(s["source"], "source") + ": expected grid, circle, random or file");
    }
    if (present(s["file"])) {
      c.topology_file = scalar<std::string>(s["file"], "file");
      if (!present(s["source"])) c.topology_source = TopologySource::File;
    }
  }
  if (present(root["output"])) {
    const YAML::Node s = root["output"];
    require_keys(s, "output", {"path", "format"});
    if (present(s["path"])) c.output_path = scalar<std::string>(s["path"], "path");
    if (present(s["format"])) {
      const auto f = scalar<std::string>(s["format"], "format");
      if (f == "csv") c.output_format = OutputFormat::Csv;
      else if (f == "json") c.output_format = OutputFormat::Json;
      else if (f == "both") c.output_format = OutputFormat::Both;
      else throw ConfigError(where(s["format"], "format") + ": expected csv, json or both");
    }
  }

  switch (c.kind) {
    case ExperimentKind::CircleRadius:
      if (c.circle.radii.empty()) throw ConfigError("circle-radius requires 'circle.radii'");
      break;
    case ExperimentKind::NodeCount:
      if (c.circle.ms.empty()) throw ConfigError("node-count requires 'circle.ms'");
      break;
    case ExperimentKind::RandomAverage:
      if (c.random.ms.empty()) throw ConfigError("random-average requires 'random.ms'");
      break;
    case ExperimentKind::Single:
    case ExperimentKind::MinimalCluster:
      if (c.topology_source == TopologySource::File && c.topology_file.empty()) {
        throw ConfigError("topology source 'file' requires 'topology.file'");
      }
      break;
    case ExperimentKind::GridDensity:
      break;
  }
  return c;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (root.IsNull() || !root.IsDefined()) {
    YAML::Node empty(YAML::NodeType::Map);
    for (const auto& o : overrides) apply_override(empty, o);
    return from_yaml(empty);
  }
  if (!root.IsMap()) throw ConfigError("config document must be a mapping");
  // A scalar beta is shorthand for equal factors; expand it so that a single
  // beta.beta_i / beta.beta_ch override keeps the other factor.
  if (root["beta"].IsScalar() && !overrides.empty()) {
    const YAML::Node b = root["beta"];
    YAML::Node expanded(YAML::NodeType::Map);
    expanded["beta_i"] = YAML::Clone(b);
    expanded["beta_ch"] = YAML::Clone(b);
    root["beta"] = expanded;
  }
  for (const auto& o : overrides) apply_override(root, o);
  return from_yaml(root);
}

ExperimentConfig load_config(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Topology build_topology(const ExperimentConfig& c) {
  switch (c.topology_source) {
    case TopologySource::File:
      return read_topology_file(c.topology_file);
    case TopologySource::Circle:
      return make_circle(c.circle.m, c.circle.radius);
    case TopologySource::Random:
      return make_random(c.random.m, c.random.setup.region, c.random.setup.event, c.random.setup.ch,
                         c.seed);
    case TopologySource::Grid: {
      const auto& g = c.grid.setup;
      Topology grid = make_grid(g.spacing, g.region, g.event, g.ch_corner);
      if (!c.grid.prefix) return grid;
      if (*c.grid.prefix < 1 || *c.grid.prefix > grid.size()) {
        throw ConfigError("grid.prefix = " + std::to_string(*c.grid.prefix) + " must lie in [1, " +
                          std::to_string(grid.size()) + "]");
      }
      const auto order = order_by_event_distance(grid, c.grid.ordering);
      return grid.subset(std::span(order).first(static_cast<std::size_t>(*c.grid.prefix)));
    }
  }
  throw ConfigError("unknown topology source");
}

namespace {

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;  // a failure here surfaces as the open error below
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) {
    throw std::runtime_error("cannot write output file: " + path.string());
  }
}

void write_outputs(const ExperimentConfig& c, const ResultTable& table, std::ostream& summary) {
  std::filesystem::path path = c.output_path;
  if (path.empty()) {
    const char* dir = std::getenv("DACC_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0') return;
    path = std::filesystem::path(dir) / std::string(to_string(c.kind));
  }
  auto with_ext = [&](const char* ext) {
    std::filesystem::path p = path;
    if (c.output_format == OutputFormat::Both || !p.has_extension()) p.replace_extension(ext);
    return p;
  };
  if (c.output_format != OutputFormat::Json) {
    const auto p = with_ext(".csv");
    write_text(p, write_csv(table));
    summary << "wrote " << p.string() << '\n';
  }
  if (c.output_format != OutputFormat::Csv) {
    const auto p = with_ext(".json");
    write_text(p, to_json(table).dump(2) + "\n");
    summary << "wrote " << p.string() << '\n';
  }
}

void summarize_sweep(const ExperimentConfig& c, const SweepResult& sweep, std::ostream& out) {
  out << "experiment: " << to_string(c.kind) << '\n';
  out << "variant: " << to_string(c.variant) << '\n';
  out << "rows: " << sweep.rows.size() << '\n';
  if (sweep.rows.empty()) return;
  Index m_lo = sweep.rows.front().m;
  Index m_hi = m_lo;
  double lo = sweep.rows.front().accuracy(c.variant);
  double hi = lo;
  for (const auto& r : sweep.rows) {
    m_lo = std::min(m_lo, r.m);
    m_hi = std::max(m_hi, r.m);
    lo = std::min(lo, r.accuracy(c.variant));
    hi = std::max(hi, r.accuracy(c.variant));
  }
  out << "m range: " << m_lo << ".." << m_hi << '\n';
  out << "d_a min: " << fixed4(lo) << " max: " << fixed4(hi) << '\n';
  if (sweep.rows.size() == 1 && sweep.rows.front().mc) {
    const McEstimate& e = *sweep.rows.front().mc;
    out << "monte carlo: " << fixed4(e.mean_accuracy) << " +/- " << fixed4(e.std_error) << " (" << e.trials
        << " trials)\n";
  }
}

}  // namespace

ResultTable run(const ExperimentConfig& c, std::ostream& summary) {
  const BetaFactors b = c.effective_betas();
  const RunMetadata meta{c.variant, c.seed, std::string(kVersion)};
  std::optional<McSettings> mc;
  if (c.monte_carlo) mc = McSettings{c.effective_profile(), {c.trials, c.seed, c.threads}};

  ResultTable table;
  switch (c.kind) {
    case ExperimentKind::CircleRadius: {
      const auto sweep = circle_radius_sweep(c.circle.m, c.circle.radii, c.models, b, mc);
      summarize_sweep(c, sweep, summary);
      table = sweep_table(sweep, meta);
      break;
    }
    case ExperimentKind::NodeCount: {
      const auto sweep = node_count_sweep(c.circle.ms, c.circle.radius, c.models, b, mc);
      summarize_sweep(c, sweep, summary);
      table = sweep_table(sweep, meta, {{{"radius", ColumnType::Real}, c.circle.radius}});
      break;
    }
    case ExperimentKind::GridDensity: {
      const auto sweep = grid_density_sweep(c.grid.setup, c.models, b, c.grid.increment,
                                            c.grid.ordering, mc);
      summarize_sweep(c, sweep, summary);
      table = sweep_table(sweep, meta);
      break;
    }
    case ExperimentKind::RandomAverage: {
      const auto sweep = random_topology_average(c.random.ms, c.random.setup, c.models, b,
                                                 c.random.runs, c.seed);
      summarize_sweep(c, sweep, summary);
      table = sweep_table(sweep, meta);
      break;
    }
    case ExperimentKind::Single: {
      const auto sweep = evaluate_topology(build_topology(c), c.models, b, mc);
      summarize_sweep(c, sweep, summary);
      table = sweep_table(sweep, meta);
      break;
    }
    case ExperimentKind::MinimalCluster: {
      const Topology t = build_topology(c);
      std::vector<MinimalClusterReport> reports;
      summary << "experiment: " << to_string(c.kind) << '\n';
      for (const auto& model : c.models) {
        reports.push_back(find_minimal_cluster(t, model, b, c.epsilon, c.ordering, c.variant, c.seed));
        const auto& r = reports.back();
        summary << "theta1 " << format_real(model.theta1) << ": p = " << r.minimal_p << " of m = "
                << r.full_m << " (epsilon " << fixed4(c.epsilon) << ", " << to_string(c.ordering)
                << "), d_a " << fixed4(r.minimal_accuracy) << " vs full " << fixed4(r.full_accuracy)
                << '\n';
      }
      table = minimal_cluster_table(reports, c.models, b, meta);
      break;
    }
  }
  write_outputs(c, table, summary);
  return table;
}

}  // namespace dacc
