#include "dacc/cli.hpp"

#include "dacc/config.hpp"
#include "dacc/io.hpp"
#include "dacc/montecarlo.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

namespace dacc {

namespace {

struct ModelFlags {
  std::vector<double> theta1;
  double theta2 = 1.0;
  double beta_i = 1.0;
  double beta_ch = 1.0;
  std::string variant = "noise-consistent";
  std::string topology;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_betas) {
  cmd->add_option("--topology", f.topology, "Topology JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--theta1", f.theta1, "Range parameter(s) theta1 > 0 (meters)")->required();
  cmd->add_option("--theta2", f.theta2, "Smoothness parameter in (0, 2]")->capture_default_str();
  if (with_betas) {
    cmd->add_option("--beta-i", f.beta_i, "Constraint factor of non-CH nodes, in (0, 1]")
        ->capture_default_str();
    cmd->add_option("--beta-ch", f.beta_ch, "Constraint factor of the CH, in (0, 1]")
        ->capture_default_str();
  }
  cmd->add_option("--variant", f.variant, "as-printed or noise-consistent")
      ->check(CLI::IsMember({"as-printed", "noise-consistent"}))
      ->capture_default_str();
}

std::vector<CorrelationModel> models_of(const ModelFlags& f) {
  std::vector<CorrelationModel> out;
  for (double t1 : f.theta1) {
    CorrelationModel m{t1, f.theta2};
    validate(m);
    out.push_back(m);
  }
  return out;
}

struct RunFlags {
  std::string config;
  std::vector<std::string> set;
  std::vector<double> theta1;
  std::optional<double> theta2;
  std::optional<double> beta_i;
  std::optional<double> beta_ch;
  std::optional<std::string> variant;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> epsilon;
  std::optional<std::string> ordering;
  std::optional<std::string> output;
  std::optional<std::string> format;
  bool mc = false;
};

/// Named flags are shorthands for --set assignments and are applied after them.
std::vector<std::string> overrides_of(const RunFlags& f) {
  std::vector<std::string> out = f.set;
  auto num = [](double v) { return format_real(v); };
  if (!f.theta1.empty()) {
    std::string list = "[";
    for (std::size_t k = 0; k < f.theta1.size(); ++k) list += (k ? "," : "") + num(f.theta1[k]);
    out.push_back("models=null");
    out.push_back("theta1=" + list + "]");
  }
  if (f.theta2) out.push_back("theta2=" + num(*f.theta2));
  if (f.beta_i || f.beta_ch) {
    out.push_back("noise=null");
    if (f.beta_i) out.push_back("beta.beta_i=" + num(*f.beta_i));
    if (f.beta_ch) out.push_back("beta.beta_ch=" + num(*f.beta_ch));
  }
  if (f.variant) out.push_back("variant=" + *f.variant);
  if (f.trials) out.push_back("trials=" + std::to_string(*f.trials));
  if (f.seed) out.push_back("seed=" + std::to_string(*f.seed));
  if (f.threads) out.push_back("threads=" + std::to_string(*f.threads));
  if (f.epsilon) out.push_back("epsilon=" + num(*f.epsilon));
  if (f.ordering) out.push_back("ordering=" + *f.ordering);
  if (f.output) out.push_back("output.path=\"" + *f.output + "\"");
  if (f.format) out.push_back("output.format=" + *f.format);
  if (f.mc) out.push_back("monte_carlo=true");
  return out;
}

int report_error(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster data-accuracy model for a point event over a correlated field", "dacc"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment described by a YAML config file");
  run_cmd->add_option("config", rf.config, "Experiment config file")->required();
  run_cmd->add_option("--set", rf.set, "Override any config key: dotted.key=value (repeatable)");
  run_cmd->add_option("--theta1", rf.theta1, "Replace the model list with these theta1 values");
  run_cmd->add_option("--theta2", rf.theta2, "Default theta2 for theta1-only models");
  run_cmd->add_option("--beta-i", rf.beta_i, "Direct beta_i (replaces a noise profile)");
  run_cmd->add_option("--beta-ch", rf.beta_ch, "Direct beta_ch (replaces a noise profile)");
  run_cmd->add_option("--variant", rf.variant, "as-printed or noise-consistent");
  run_cmd->add_option("--trials", rf.trials, "Monte Carlo trials");
  run_cmd->add_option("--seed", rf.seed, "Master seed");
  run_cmd->add_option("--threads", rf.threads, "Monte Carlo worker threads (0 = all cores)");
  run_cmd->add_option("--epsilon", rf.epsilon, "Minimal-cluster tolerance");
  run_cmd->add_option("--ordering", rf.ordering, "nearest-first, farthest-first or random");
  run_cmd->add_option("--output", rf.output, "Output path");
  run_cmd->add_option("--format", rf.format, "csv, json or both");
  run_cmd->add_flag("--mc", rf.mc, "Attach Monte Carlo estimates to every row");

  ModelFlags af;
  bool show_terms = false;
  auto* acc_cmd = app.add_subcommand("accuracy", "Closed-form data accuracy of a topology file");
  add_model_flags(acc_cmd, af, true);
  acc_cmd->add_flag("--terms", show_terms, "Print the six-term breakdown");

  ModelFlags mf;
  std::int64_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimate of the data accuracy of a topology file");
  add_model_flags(mc_cmd, mf, true);
  mc_cmd->add_option("--trials", trials, "Number of trials (>= 2)")->capture_default_str();
  mc_cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
  mc_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

  ModelFlags cf;
  double target = 0.0;
  auto* cal_cmd = app.add_subcommand("calibrate", "Common beta reproducing a target accuracy");
  add_model_flags(cal_cmd, cf, false);
  cal_cmd->add_option("--target", target, "Target data accuracy")->required();

  std::string topo_kind = "grid";
  Index topo_m = 4;
  double radius = 5.0;
  double spacing = 5.0;
  std::vector<double> region{0.0, 0.0, 30.0, 30.0};
  std::vector<double> event{15.0, 15.0};
  std::vector<double> ch{0.0, 0.0};
  std::optional<Index> prefix;
  std::uint64_t topo_seed = 0;
  std::string topo_out;
  std::string topo_csv;
  auto* topo_cmd = app.add_subcommand("topology", "Generate a topology file");
  topo_cmd->add_option("--kind", topo_kind, "grid, circle or random")
      ->check(CLI::IsMember({"grid", "circle", "random"}))
      ->capture_default_str();
  topo_cmd->add_option("--m", topo_m, "Node count (circle, random)")->capture_default_str();
  topo_cmd->add_option("--radius", radius, "Circle radius")->capture_default_str();
  topo_cmd->add_option("--spacing", spacing, "Grid spacing")->capture_default_str();
  topo_cmd->add_option("--region", region, "x_min y_min x_max y_max")->expected(4);
  topo_cmd->add_option("--event", event, "Event position x y")->expected(2);
  topo_cmd->add_option("--ch", ch, "CH position (random) or corner (grid)")->expected(2);
  topo_cmd->add_option("--prefix", prefix, "Grid: keep the first N nodes farthest-first");
  topo_cmd->add_option("--seed", topo_seed, "Seed (random)")->capture_default_str();
  topo_cmd->add_option("--out", topo_out, "Output JSON file")->required();
  topo_cmd->add_option("--csv", topo_csv, "Also write index,x,y,is_ch CSV");

  app.add_subcommand("version", "Print the version");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("version")) {
      out << kVersion << '\n';
      return kExitOk;
    }
    if (app.got_subcommand(run_cmd)) {
      const ExperimentConfig config = load_config(rf.config, overrides_of(rf));
      run(config, out);
      return kExitOk;
    }
    if (app.got_subcommand(acc_cmd)) {
      const Topology t = read_topology_file(af.topology);
      const Variant v = parse_variant(af.variant);
      const BetaFactors b{af.beta_i, af.beta_ch};
      for (const auto& model : models_of(af)) {
        const auto terms = accuracy_terms(t, model, b, v);
        out << format_real(terms.total()) << '\n';
        if (show_terms) {
          out << "  gain_nodes " << format_real(terms.gain_nodes) << "\n  gain_ch "
              << format_real(terms.gain_ch) << "\n  cross_nodes " << format_real(terms.cross_nodes)
              << "\n  self_nodes " << format_real(terms.self_nodes) << "\n  cross_ch "
              << format_real(terms.cross_ch) << "\n  self_ch " << format_real(terms.self_ch) << '\n';
        }
      }
      return kExitOk;
    }
    if (app.got_subcommand(mc_cmd)) {
      const Topology t = read_topology_file(mf.topology);
      const Variant v = parse_variant(mf.variant);
      const BetaFactors b{mf.beta_i, mf.beta_ch};
      const NoiseProfile profile = NoiseProfile::from_betas(b.beta_i, b.beta_ch);
      for (const auto& model : models_of(mf)) {
        const McEstimate est = mc_accuracy(t, model, profile, {trials, seed, threads});
        out << "theta1 " << format_real(model.theta1) << " mc_mean " << format_real(est.mean_accuracy)
            << " mc_se " << format_real(est.std_error) << " closed_form "
            << format_real(accuracy_closed_form(t, model, b, v).value) << " trials " << est.trials
            << " seed " << est.master_seed << " jitter " << format_real(est.jitter) << '\n';
      }
      return kExitOk;
    }
    if (app.got_subcommand(cal_cmd)) {
      const Topology t = read_topology_file(cf.topology);
      const Variant v = parse_variant(cf.variant);
      for (const auto& model : models_of(cf)) out << format_real(calibrate_beta(target, t, model, v)) << '\n';
      return kExitOk;
    }
    if (app.got_subcommand(topo_cmd)) {
      const Region r{region[0], region[1], region[2], region[3]};
      const Position e(event[0], event[1]);
      const Position c(ch[0], ch[1]);
      Topology t;
      if (topo_kind == "circle") {
        t = make_circle(topo_m, radius, e);
      } else if (topo_kind == "random") {
        t = make_random(topo_m, r, e, c, topo_seed);
      } else {
        t = make_grid(spacing, r, e, c);
        if (prefix) {
          if (*prefix < 1 || *prefix > t.size()) throw std::invalid_argument("prefix out of range");
          const auto order = order_by_event_distance(t, Ordering::FarthestFirst);
          t = t.subset(std::span(order).first(static_cast<std::size_t>(*prefix)));
        }
      }
      write_topology_file(t, topo_out);
      if (!topo_csv.empty()) {
        std::ofstream csv(topo_csv, std::ios::binary);
        if (!(csv << topology_csv(t))) throw std::runtime_error("cannot write " + topo_csv);
      }
      out << "wrote " << topo_out << " (m = " << t.size() << ")\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    return report_error(err, e, kExitConfig);
  } catch (const FormatError& e) {
    return report_error(err, e, kExitConfig);
  } catch (const std::invalid_argument& e) {
    return report_error(err, e, kExitConfig);
  } catch (const std::exception& e) {
    return report_error(err, e, kExitComputation);
  }
  return kExitUsage;
}

}  // namespace dacc
