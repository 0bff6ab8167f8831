#ifndef SADDLESIM_HARNESS_EXPERIMENT_HPP
#define SADDLESIM_HARNESS_EXPERIMENT_HPP

#include "saddlesim/harness/config.hpp"
#include "saddlesim/network.hpp"
#include "saddlesim/solvers.hpp"
#include "saddlesim/trace.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace saddlesim::harness {

/// Raised for divergence and reference non-convergence; maps to exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuiltExperiment {
  NetworkProblem<double> problem;
  ProblemConstants<double> constants;
  double mu_paper = 0;
  double mu_safe = 0;
  Topology topology;
  GossipMatrix<double> gossip;
  Index diameter = 0;
  Vector<double> z_star;
  double reference_residual = 0;
  std::string reference_method;
};

/// Problem, measured constants, network and reference solution.
BuiltExperiment build_experiment(const ExperimentConfig& config);

/// Constants and network facts as written to the manifest.
nlohmann::json describe(const BuiltExperiment& built);

struct MethodOutcome {
  std::string label;
  std::string method;
  RunTrace trace;
  nlohmann::json tuning;
  Vector<double> z;
};

struct ExperimentResult {
  nlohmann::json manifest;
  std::vector<MethodOutcome> outcomes;
  std::vector<std::string> files;
};

/// Runs every method, then writes <output_dir>/<label>.csv and manifest.json.
/// Nothing is left on disk if any method fails.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

/// Worker threads for independent method runs: SADDLESIM_THREADS if set and
/// positive, else the hardware concurrency.
unsigned thread_cap();

}  // namespace saddlesim::harness

#endif  // SADDLESIM_HARNESS_EXPERIMENT_HPP
