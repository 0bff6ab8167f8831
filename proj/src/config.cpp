#include "saddlesim/harness/config.hpp"

#include <fstream>
#include <set>

namespace saddlesim::harness {

namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: " + where + key + " has the wrong type");
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, where);
  out = v;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key " + where + key);
  }
}

const std::set<std::string> kMethods{"alg1", "alg2", "egd_centralized", "egd_decentralized",
                                     "egd_gradient_tracking"};

}  // namespace

void ExperimentConfig::validate() const {
  if (K < 1) throw ConfigError("config: K must be >= 1");
  if (metric_cadence < 1) throw ConfigError("config: metric_cadence must be >= 1");
  if (!(reference_tol > 0)) throw ConfigError("config: reference_tol must be positive");
  if (methods.empty()) throw ConfigError("config: methods must be nonempty");
  const auto& p = problem;
  if (p.family != "robust_regression" && p.family != "hard_instance" && p.family != "random_quadratic") {
    throw ConfigError("config: problem.family must be robust_regression, hard_instance or random_quadratic");
  }
  if (p.M < 1) throw ConfigError("config: problem.M must be >= 1");
  if (p.d < 1) throw ConfigError("config: problem.d must be >= 1");
  if (p.family == "robust_regression") {
    if (p.n_local < 1) throw ConfigError("config: problem.n_local must be >= 1");
    if (!(p.lambda > 0 && p.beta > 0 && p.R_w > 0 && p.R_r > 0)) {
      throw ConfigError("config: problem.lambda, beta, R_w, R_r must be positive");
    }
    if (!(p.noise_amplitude >= 0)) throw ConfigError("config: problem.noise_amplitude must be >= 0");
    if (p.partition != "contiguous" && p.partition != "shuffled") {
      throw ConfigError("config: problem.partition must be contiguous or shuffled");
    }
    if (p.mu_convention != "safe" && p.mu_convention != "paper") {
      throw ConfigError("config: problem.mu_convention must be safe or paper");
    }
  } else {
    if (!(p.mu > 0)) throw ConfigError("config: problem.mu must be positive");
    if (p.family == "hard_instance" && !(p.delta > 0)) throw ConfigError("config: problem.delta must be positive");
    if (p.family == "hard_instance" && p.M < 3) throw ConfigError("config: hard_instance needs problem.M >= 3");
    if (p.family == "hard_instance" && p.d < 2) throw ConfigError("config: hard_instance needs problem.d >= 2");
    if (p.family == "random_quadratic" && !(p.spread >= 0)) throw ConfigError("config: problem.spread must be >= 0");
  }
  static const std::set<std::string> topologies{"line", "ring", "star", "grid", "complete", "custom"};
  if (!topologies.count(network.topology)) throw ConfigError("config: unknown network.topology " + network.topology);
  if (network.topology == "custom" && network.edge_list.empty()) {
    throw ConfigError("config: network.edge_list is required for a custom topology");
  }
  std::set<std::string> labels;
  for (const auto& m : methods) {
    if (!kMethods.count(m.name)) throw ConfigError("config: unknown method " + m.name);
    const std::string label = m.label.empty() ? m.name : m.label;
    if (!labels.insert(label).second) throw ConfigError("config: duplicate method label " + label);
    if (m.gamma && !(*m.gamma > 0)) throw ConfigError("config: method gamma must be positive");
    if (m.step && !(*m.step > 0)) throw ConfigError("config: method step must be positive");
    if (m.inner_iters && *m.inner_iters < 1) throw ConfigError("config: method inner_iters must be >= 1");
    if ((m.gossip_h0 && *m.gossip_h0 < 0) || (m.gossip_h1 && *m.gossip_h1 < 0)) {
      throw ConfigError("config: method gossip budgets must be >= 0");
    }
  }
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j,
                 {"seed", "K", "metric_cadence", "output_dir", "record_wall_time", "target_dist_sq", "reference_tol",
                  "compute_gap", "gap_iters", "problem", "network", "methods"},
                 "");
  ExperimentConfig c;
  if (!j.contains("seed") || j.at("seed").is_null()) throw ConfigError("config: seed is required");
  read(j, "seed", c.seed, "");
  read(j, "K", c.K, "");
  read(j, "metric_cadence", c.metric_cadence, "");
  read(j, "output_dir", c.output_dir, "");
  read(j, "record_wall_time", c.record_wall_time, "");
  read(j, "target_dist_sq", c.target_dist_sq, "");
  read(j, "reference_tol", c.reference_tol, "");
  read(j, "compute_gap", c.compute_gap, "");
  read(j, "gap_iters", c.gap_iters, "");

  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (!p.is_object()) throw ConfigError("config: problem must be an object");
    reject_unknown(p,
                   {"family", "M", "n_local", "d", "lambda", "beta", "R_w", "R_r", "noise_amplitude", "dataset",
                    "partition", "mu_convention", "mu", "delta", "spread"},
                   "problem.");
    auto& q = c.problem;
    read(p, "family", q.family, "problem.");
    read(p, "M", q.M, "problem.");
    read(p, "n_local", q.n_local, "problem.");
    read(p, "d", q.d, "problem.");
    read(p, "lambda", q.lambda, "problem.");
    read(p, "beta", q.beta, "problem.");
    read(p, "R_w", q.R_w, "problem.");
    read(p, "R_r", q.R_r, "problem.");
    read(p, "noise_amplitude", q.noise_amplitude, "problem.");
    read(p, "dataset", q.dataset, "problem.");
    read(p, "partition", q.partition, "problem.");
    read(p, "mu_convention", q.mu_convention, "problem.");
    read(p, "mu", q.mu, "problem.");
    read(p, "delta", q.delta, "problem.");
    read(p, "spread", q.spread, "problem.");
  }
  if (j.contains("network")) {
    const auto& n = j.at("network");
    if (!n.is_object()) throw ConfigError("config: network must be an object");
    reject_unknown(n, {"topology", "grid_rows", "edge_list", "lazy"}, "network.");
    read(n, "topology", c.network.topology, "network.");
    read(n, "grid_rows", c.network.grid_rows, "network.");
    read(n, "edge_list", c.network.edge_list, "network.");
    read(n, "lazy", c.network.lazy, "network.");
  }
  if (!j.contains("methods") || !j.at("methods").is_array()) throw ConfigError("config: methods must be an array");
  for (const auto& m : j.at("methods")) {
    MethodSpec s;
    if (m.is_string()) {
      s.name = m.get<std::string>();
    } else if (m.is_object()) {
      reject_unknown(m,
                     {"name", "label", "mode", "gamma", "step", "inner_iters", "gossip_h0", "gossip_h1",
                      "inner_constant", "gossip_constant", "epsilon"},
                     "methods[].");
      read(m, "name", s.name, "methods[].");
      read(m, "label", s.label, "methods[].");
      read(m, "mode", s.mode, "methods[].");
      read(m, "gamma", s.gamma, "methods[].");
      read(m, "step", s.step, "methods[].");
      read(m, "inner_iters", s.inner_iters, "methods[].");
      read(m, "gossip_h0", s.gossip_h0, "methods[].");
      read(m, "gossip_h1", s.gossip_h1, "methods[].");
      read(m, "inner_constant", s.inner_constant, "methods[].");
      read(m, "gossip_constant", s.gossip_constant, "methods[].");
      read(m, "epsilon", s.epsilon, "methods[].");
    } else {
      throw ConfigError("config: each method must be a name or an object");
    }
    c.methods.push_back(std::move(s));
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["K"] = c.K;
  j["metric_cadence"] = c.metric_cadence;
  j["output_dir"] = c.output_dir;
  j["record_wall_time"] = c.record_wall_time;
  j["target_dist_sq"] = c.target_dist_sq ? json(*c.target_dist_sq) : json(nullptr);
  j["reference_tol"] = c.reference_tol;
  j["compute_gap"] = c.compute_gap;
  j["gap_iters"] = c.gap_iters ? json(*c.gap_iters) : json(nullptr);
  const auto& p = c.problem;
  j["problem"] = {{"family", p.family},   {"M", p.M},
                  {"n_local", p.n_local}, {"d", p.d},
                  {"lambda", p.lambda},   {"beta", p.beta},
                  {"R_w", p.R_w},         {"R_r", p.R_r},
                  {"noise_amplitude", p.noise_amplitude},
                  {"dataset", p.dataset}, {"partition", p.partition},
                  {"mu_convention", p.mu_convention},
                  {"mu", p.mu},           {"delta", p.delta},
                  {"spread", p.spread}};
  j["network"] = {{"topology", c.network.topology},
                  {"grid_rows", c.network.grid_rows},
                  {"edge_list", c.network.edge_list},
                  {"lazy", c.network.lazy}};
  j["methods"] = json::array();
  for (const auto& m : c.methods) {
    json mj{{"name", m.name}};
    if (!m.label.empty()) mj["label"] = m.label;
    if (m.mode) mj["mode"] = *m.mode;
    if (m.gamma) mj["gamma"] = *m.gamma;
    if (m.step) mj["step"] = *m.step;
    if (m.inner_iters) mj["inner_iters"] = *m.inner_iters;
    if (m.gossip_h0) mj["gossip_h0"] = *m.gossip_h0;
    if (m.gossip_h1) mj["gossip_h1"] = *m.gossip_h1;
    if (m.inner_constant) mj["inner_constant"] = *m.inner_constant;
    if (m.gossip_constant) mj["gossip_constant"] = *m.gossip_constant;
    if (m.epsilon) mj["epsilon"] = *m.epsilon;
    j["methods"].push_back(std::move(mj));
  }
  return j;
}

}  // namespace saddlesim::harness
