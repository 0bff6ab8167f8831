// saddlesim command-line driver: run, sweep, constants, gossip-check, lb-check.
#include "saddlesim/harness/checks.hpp"
#include "saddlesim/harness/config.hpp"
#include "saddlesim/harness/data.hpp"
#include "saddlesim/harness/experiment.hpp"
#include "saddlesim/harness/trace_io.hpp"
#include "saddlesim/solvers.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace {

using namespace saddlesim;
using namespace saddlesim::harness;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Overrides {
  std::string output_dir;
  std::optional<Index> K;
  std::optional<std::uint64_t> seed;
  std::optional<Index> cadence;
  std::optional<double> target;
  bool wall_time = false;

  void attach(CLI::App* app) {
    app->add_option("-o,--output-dir", output_dir, "Directory for CSV traces and manifest.json");
    app->add_option("-K,--rounds", K, "Outer rounds per method");
    app->add_option("--seed", seed, "Experiment seed");
    app->add_option("--cadence", cadence, "Metric sampling cadence");
    app->add_option("--target", target, "Stop each method once dist_sq <= target");
    app->add_flag("--wall-time", wall_time, "Record wall_seconds (runs are then not byte-reproducible)");
  }

  void apply(ExperimentConfig& c) const {
    if (!output_dir.empty()) c.output_dir = output_dir;
    if (K) c.K = *K;
    if (seed) c.seed = *seed;
    if (cadence) c.metric_cadence = *cadence;
    if (target) c.target_dist_sq = *target;
    if (wall_time) c.record_wall_time = true;
    c.validate();
  }
};

void print_summary(const ExperimentResult& r) {
  std::printf("%-24s %8s %12s %12s %14s\n", "method", "rounds", "comm_rounds", "local_iters", "dist_sq");
  for (const auto& m : r.manifest["methods"]) {
    std::printf("%-24s %8lld %12lld %12lld %14.6e\n", m["label"].get<std::string>().c_str(),
                m["rounds"].get<long long>(), m["comm_rounds"].get<long long>(), m["local_iters"].get<long long>(),
                m["final_dist_sq"].is_number() ? m["final_dist_sq"].get<double>() : std::nan(""));
  }
  for (const auto& f : r.files) std::printf("wrote %s\n", f.c_str());
}

std::vector<TopologyKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<TopologyKind> kinds;
  for (const auto& n : names) kinds.push_back(topology_kind_from_string(n));
  return kinds;
}

std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed saddle-point simulator under function similarity"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* run = app.add_subcommand("run", "Run every method of one experiment config");
  run->add_option("config", config_path, "JSON experiment config")->required();
  ov.attach(run);

  std::vector<double> amplitudes;
  std::vector<Index> sizes;
  auto* sweep = app.add_subcommand("sweep", "Run a config over a grid of noise amplitudes and agent counts");
  sweep->add_option("config", config_path, "JSON experiment config")->required();
  sweep->add_option("--amplitudes", amplitudes, "Noise amplitudes")->delimiter(',');
  sweep->add_option("--sizes", sizes, "Agent counts M")->delimiter(',');
  ov.attach(sweep);

  auto* constants = app.add_subcommand("constants", "Print measured L, mu, delta, rho and diameter for a config");
  constants->add_option("config", config_path, "JSON experiment config")->required();

  std::vector<std::string> topo_names{"ring", "star", "grid", "line"};
  GossipCheckOptions gopts;
  auto* gcheck = app.add_subcommand("gossip-check", "Check accelerated gossip contraction");
  gcheck->add_option("--topologies", topo_names, "Topology kinds")->delimiter(',');
  gcheck->add_option("--sizes", gopts.sizes, "Node counts")->delimiter(',');
  gcheck->add_option("--budgets", gopts.budgets, "Gossip budgets H")->delimiter(',');
  gcheck->add_option("--trials", gopts.trials, "Random inputs per case");
  gcheck->add_option("--slack", gopts.slack, "Allowed factor over the bound");
  gcheck->add_option("--seed", gopts.seed, "Seed");
  gcheck->add_flag("--lazy", gopts.lazy, "Use the lazy matrix (W + I) / 2");

  LowerBoundOptions lopts;
  auto* lcheck = app.add_subcommand("lb-check", "Zero-propagation certificate on the hard instance");
  lcheck->add_option("--M", lopts.M, "Nodes on the line graph");
  lcheck->add_option("--mu", lopts.mu, "Strong monotonicity modulus");
  lcheck->add_option("--delta", lopts.delta, "Similarity");
  lcheck->add_option("--d", lopts.d, "Block dimension (0 = minimum for the largest K)");
  lcheck->add_option("--multiples", lopts.multiples, "K as multiples of l")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      ExperimentConfig c = load_config(config_path);
      ov.apply(c);
      print_summary(run_experiment(c));
    } else if (*sweep) {
      const ExperimentConfig base = load_config(config_path);
      if (amplitudes.empty()) amplitudes.push_back(base.problem.noise_amplitude);
      if (sizes.empty()) sizes.push_back(base.problem.M);
      for (double a : amplitudes) {
        for (Index M : sizes) {
          ExperimentConfig c = base;
          ov.apply(c);
          c.problem.noise_amplitude = a;
          c.problem.M = M;
          c.output_dir = (std::filesystem::path(c.output_dir) /
                          ("amp_" + format_number(a) + "_M_" + std::to_string(M)))
                             .string();
          c.validate();
          std::printf("== amplitude %s, M = %lld\n", format_number(a).c_str(), static_cast<long long>(M));
          print_summary(run_experiment(c));
        }
      }
    } else if (*constants) {
      const ExperimentConfig c = load_config(config_path);
      std::cout << describe(build_experiment(c)).dump(2) << '\n';
    } else if (*gcheck) {
      gopts.kinds = parse_kinds(topo_names);
      bool ok = true;
      std::printf("%-9s %4s %4s %10s %10s %10s %10s %s\n", "topology", "M", "H", "rho", "ratio", "node_ratio",
                  "mean_drift", "result");
      for (const auto& r : gossip_check(gopts)) {
        ok = ok && r.pass;
        std::printf("%-9s %4lld %4lld %10.4f %10.4f %10.4f %10.2e %s\n", to_string(r.kind).c_str(),
                    static_cast<long long>(r.M), static_cast<long long>(r.H), r.rho, r.ratio, r.node_ratio,
                    r.mean_drift, r.pass ? "PASS" : "FAIL");
      }
      return ok ? kOk : kNumericalFailure;
    } else if (*lcheck) {
      const auto res = lower_bound_check(lopts);
      std::printf("M = %lld, d = %lld, l = %lld, q = %.6g\n", static_cast<long long>(res.M),
                  static_cast<long long>(res.d), static_cast<long long>(res.l), res.q);
      std::printf("%6s %8s %8s %14s %14s %s\n", "K", "support", "allowed", "dist_sq", "floor", "result");
      bool ok = true;
      for (const auto& r : res.rows) {
        const bool pass = r.support_ok && r.floor_ok;
        ok = ok && pass;
        std::printf("%6lld %8lld %8lld %14.6e %14.6e %s\n", static_cast<long long>(r.K),
                    static_cast<long long>(r.support), static_cast<long long>(r.allowed), r.dist_sq, r.floor,
                    pass ? "PASS" : "FAIL");
      }
      return ok ? kOk : kNumericalFailure;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kConfigError;
  } catch (const NumericalFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalFailure;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumericalFailure;
  }
  return kOk;
}
