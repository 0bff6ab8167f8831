#ifndef SADDLESIM_HARNESS_CONFIG_HPP
#define SADDLESIM_HARNESS_CONFIG_HPP

#include "saddlesim/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace saddlesim::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  /// robust_regression | hard_instance | random_quadratic
  std::string family = "robust_regression";
  Index M = 25;
  // robust regression
  Index n_local = 100;
  Index d = 40;
  double lambda = 0.1;
  double beta = 1.0;
  double R_w = 0.5;
  double R_r = 1.0;
  double noise_amplitude = 0.1;
  std::string dataset;  ///< LIBSVM path; synthetic data when empty
  std::string partition = "contiguous";
  std::string mu_convention = "safe";  ///< safe | paper
  // hard instance and random quadratic
  double mu = 1.0;
  double delta = 10.0;
  double spread = 0.5;
};

struct NetworkSpec {
  std::string topology = "star";
  Index grid_rows = 0;
  std::string edge_list;  ///< used when topology is "custom"
  bool lazy = false;
};

/// One method run. Unset overrides fall back to the tuning rules.
struct MethodSpec {
  std::string name;   ///< alg1 | alg2 | egd_centralized | egd_decentralized | egd_gradient_tracking
  std::string label;  ///< output file stem, defaults to name
  std::optional<std::string> mode;
  std::optional<double> gamma;
  std::optional<double> step;
  std::optional<Index> inner_iters;
  std::optional<Index> gossip_h0;
  std::optional<Index> gossip_h1;
  std::optional<double> inner_constant;
  std::optional<double> gossip_constant;
  std::optional<double> epsilon;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  Index K = 100;
  Index metric_cadence = 1;
  std::string output_dir = "out";
  bool record_wall_time = false;
  /// Stop a method once dist_sq falls to this value.
  std::optional<double> target_dist_sq;
  double reference_tol = 1e-12;
  bool compute_gap = false;
  std::optional<Index> gap_iters;
  ProblemSpec problem;
  NetworkSpec network;
  std::vector<MethodSpec> methods;

  void validate() const;
};

/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace saddlesim::harness

#endif  // SADDLESIM_HARNESS_CONFIG_HPP
