#include "saddlesim/harness/experiment.hpp"

#include "saddlesim/harness/data.hpp"
#include "saddlesim/harness/trace_io.hpp"
#include "saddlesim/metrics.hpp"
#include "saddlesim/problems.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

namespace saddlesim::harness {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct ProblemBuild {
  std::optional<NetworkProblem<double>> problem;
  ProblemConstants<double> constants;
  double mu_paper = 0;
  double mu_safe = 0;
  std::optional<Vector<double>> known_solution;
};

ProblemBuild build_regression(const ExperimentConfig& c) {
  const auto& p = c.problem;
  std::vector<Dataset> shards;
  if (p.dataset.empty()) {
    shards = generate_synthetic(p.n_local, p.d, p.M, p.noise_amplitude, c.seed);
  } else {
    const Dataset full = to_dense(parse_libsvm(p.dataset));
    shards = partition_data(full, p.M, partition_scheme_from_string(p.partition), c.seed);
  }
  std::vector<std::shared_ptr<RobustRegression<double>>> agents;
  for (auto& s : shards) {
    agents.push_back(build_robust_regression<double>(std::move(s.X), std::move(s.y), p.lambda, p.beta, p.R_w, p.R_r));
  }
  const RobustRegression<double> pooled =
      pooled_regression<double>(std::span<const std::shared_ptr<RobustRegression<double>>>(agents));

  ProblemBuild b;
  double L = 0;
  double delta = 0;
  for (const auto& a : agents) {
    const auto rc = estimate_regression_constants(*a);
    L = std::max(L, rc.L);
    b.mu_paper = rc.mu_paper;
    b.mu_safe = rc.mu_safe;
    delta = std::max(delta, estimate_similarity(*a, pooled));
  }
  b.constants.L = std::max(L, delta);
  b.constants.mu = p.mu_convention == "paper" ? b.mu_paper : b.mu_safe;
  b.constants.delta = delta;
  std::vector<NetworkProblem<double>::AgentPtr> ptrs(agents.begin(), agents.end());
  const auto sets = agents.front()->constraints();
  b.constants.omega = sets.diameter();
  b.problem.emplace(std::move(ptrs), sets);
  return b;
}

ProblemBuild build_hard(const ExperimentConfig& c) {
  const auto& p = c.problem;
  auto inst = build_hard_instance<double>(p.M, p.mu, p.delta, p.d);
  ProblemBuild b;
  // Each agent's Jacobian is 2s I plus a skew block with norm (delta/4)||A_i|| <= (delta/4)(1 + sqrt 2).
  const double s = 16.0 * static_cast<double>(inst.p) * p.mu / static_cast<double>(p.M);
  const double coupling = p.delta / 4.0 * (1.0 + std::sqrt(2.0));
  b.constants.L = std::max(p.delta, std::sqrt(4.0 * s * s + coupling * coupling));
  b.constants.mu = p.mu;
  b.constants.delta = p.delta;
  b.mu_paper = b.mu_safe = p.mu;
  b.known_solution = hard_instance_solution(inst);
  b.problem.emplace(inst.problem);
  return b;
}

ProblemBuild build_quadratic(const ExperimentConfig& c) {
  const auto& p = c.problem;
  ProblemBuild b;
  b.problem.emplace(random_quadratic_network<double>(p.M, p.d, p.mu, p.spread, c.seed));
  b.constants = exact_affine_constants(*b.problem);
  b.mu_paper = b.mu_safe = b.constants.mu;
  return b;
}

Topology build_network(const ExperimentConfig& c) {
  const auto& n = c.network;
  const auto kind = topology_kind_from_string(n.topology);
  if (kind != TopologyKind::Custom) return build_topology(kind, c.problem.M, n.grid_rows);
  std::ifstream in(n.edge_list);
  if (!in) throw ConfigError("config: cannot open edge list '" + n.edge_list + "'");
  Topology t = read_edge_list(in, c.problem.M);
  if (t.size() != c.problem.M) throw ConfigError("config: edge list node count does not match problem.M");
  return t;
}

ReferenceCache<double>& reference_cache() {
  static ReferenceCache<double> cache;
  return cache;
}

json tuning_json(const TuningParameters<double>& t) {
  return {{"mode", to_string(t.mode)},         {"gamma", t.gamma},         {"inner_precision", t.inner_precision},
          {"inner_iters", t.inner_iters},      {"gossip_h0", t.gossip_h0}, {"gossip_h1", t.gossip_h1},
          {"L", t.L}};
}

MethodOutcome run_method(const ExperimentConfig& c, const BuiltExperiment& b, const MethodSpec& m) {
  MethodOutcome out;
  out.method = m.name;
  out.label = m.label.empty() ? m.name : m.label;

  RunOptions<double> o;
  o.K = c.K;
  o.cadence = c.metric_cadence;
  o.record_wall_time = c.record_wall_time;
  o.seed = c.seed;
  const double L = b.constants.L;
  GapOptions<double> gap{L, c.gap_iters.value_or(default_gap_iterations(L, std::max(b.constants.mu, 1e-12))), false};
  o.callback = [&](const RoundState<double>& s) {
    RoundMetrics r;
    r.dist_sq = distance_sq(s.point, b.z_star);
    if (s.nodes) r.consensus_err = consensus_error(*s.nodes);
    if (c.compute_gap) r.gap = saddle_gap(b.problem, s.point, gap);
    if (c.target_dist_sq && r.dist_sq <= *c.target_dist_sq) r.stop = true;
    return r;
  };

  RunResult<double> res;
  if (m.name == "alg1" || m.name == "alg2") {
    const bool mesh = m.name == "alg2";
    const TuningMode mode = tuning_mode_from_string(m.mode.value_or(mesh ? "sc-decentralized" : "sc-centralized"));
    TuningOptions<double> topts;
    if (m.inner_constant) topts.inner_constant = *m.inner_constant;
    if (m.gossip_constant) topts.gossip_constant = *m.gossip_constant;
    if (m.epsilon) topts.epsilon = *m.epsilon;
    std::optional<NetworkSpectrum<double>> spectrum;
    if (is_decentralized(mode)) spectrum = NetworkSpectrum<double>{b.gossip.rho, b.problem.size()};
    TuningParameters<double> t;
    try {
      t = tune(mode, b.constants, spectrum, topts);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("method " + out.label + ": " + e.what());
    }
    if (m.gamma) t.gamma = *m.gamma;
    if (m.inner_iters) t.inner_iters = *m.inner_iters;
    if (m.gossip_h0) t.gossip_h0 = *m.gossip_h0;
    if (m.gossip_h1) t.gossip_h1 = *m.gossip_h1;
    out.tuning = tuning_json(t);
    res = mesh ? run_algorithm2(b.problem, b.gossip, t, o) : run_algorithm1(b.problem, t, o);
  } else {
    const BaselineKind kind = baseline_kind_from_string(m.name);
    const double step = m.step.value_or(1.0 / (2.0 * L));
    out.tuning = {{"step", step}};
    res = run_baseline(kind, b.problem, &b.gossip, step, o);
  }
  out.trace = std::move(res.trace);
  out.trace.method = out.label;
  out.z = res.averaged.value_or(res.z);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SADDLESIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

BuiltExperiment build_experiment(const ExperimentConfig& config) {
  config.validate();
  ProblemBuild pb;
  const auto& family = config.problem.family;
  if (family == "robust_regression") {
    pb = build_regression(config);
  } else if (family == "hard_instance") {
    pb = build_hard(config);
  } else {
    pb = build_quadratic(config);
  }
  try {
    pb.constants.validate();
  } catch (const std::invalid_argument& e) {
    throw NumericalFailure(std::string("measured constants are inconsistent: ") + e.what());
  }

  Topology topo = build_network(config);
  auto gossip = build_gossip_matrix<double>(topo, config.network.lazy);
  const Index diam = diameter(topo);
  NetworkProblem<double> problem = std::move(*pb.problem);

  ReferenceSolution<double> ref;
  if (pb.known_solution) {
    ref.z_star = *pb.known_solution;
    ref.achieved_residual = apply_mean_operator(problem, ref.z_star).norm();
    ref.method = "closed_form";
  } else {
    json key = to_json(config)["problem"];
    key["seed"] = config.seed;
    key["tol"] = config.reference_tol;
    try {
      ref = reference_cache().get(key.dump(), [&] {
        return reference_solution(problem, config.reference_tol, {pb.constants.L});
      });
    } catch (const DivergenceError& e) {
      throw NumericalFailure(std::string("reference solution: ") + e.what());
    } catch (const std::runtime_error& e) {
      throw NumericalFailure(e.what());
    }
  }
  double G = 0;
  for (Index m = 0; m < problem.size(); ++m) G = std::max(G, problem.agent(m).apply(ref.z_star).norm());
  pb.constants.G = G;

  return BuiltExperiment{std::move(problem), pb.constants, pb.mu_paper, pb.mu_safe, std::move(topo),
                         std::move(gossip),  diam,         std::move(ref.z_star), ref.achieved_residual,
                         ref.method};
}

json describe(const BuiltExperiment& b) {
  json j;
  j["constants"] = {{"L", b.constants.L},
                    {"mu", b.constants.mu},
                    {"mu_paper", b.mu_paper},
                    {"mu_safe", b.mu_safe},
                    {"delta", b.constants.delta},
                    {"G", b.constants.G.value_or(0.0)},
                    {"omega", b.constants.omega ? json(*b.constants.omega) : json(nullptr)}};
  j["network"] = {{"topology", to_string(b.topology.kind())},
                  {"M", b.topology.size()},
                  {"edges", b.topology.edges().size()},
                  {"rho", b.gossip.rho},
                  {"lambda2", b.gossip.lambda2},
                  {"lambda_min", b.gossip.lambda_min},
                  {"diameter", b.diameter}};
  j["reference"] = {{"method", b.reference_method}, {"residual", b.reference_residual}};
  j["dims"] = {{"x", b.problem.dims().x}, {"y", b.problem.dims().y}};
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files) {
  const BuiltExperiment built = build_experiment(config);
  const std::size_t n = config.methods.size();
  std::vector<std::optional<MethodOutcome>> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        outcomes[i] = run_method(config, built, config.methods[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(thread_cap(), static_cast<unsigned>(n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    const auto& m = config.methods[i];
    const std::string label = m.label.empty() ? m.name : m.label;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const DivergenceError& e) {
      throw NumericalFailure("method " + label + ": " + e.what());
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("method " + label + ": " + e.what());
    }
  }

  ExperimentResult result;
  result.manifest = describe(built);
  result.manifest["config"] = to_json(config);
  result.manifest["methods"] = json::array();
  for (auto& o : outcomes) {
    const auto& last = o->trace.back();
    result.manifest["methods"].push_back({{"label", o->label},
                                          {"method", o->method},
                                          {"file", o->label + ".csv"},
                                          {"tuning", o->tuning},
                                          {"rounds", last.round},
                                          {"comm_rounds", last.comm_rounds},
                                          {"local_iters", last.local_iters},
                                          {"final_dist_sq", last.dist_sq}});
    result.outcomes.push_back(std::move(*o));
  }

  if (write_files) {
    const fs::path dir(config.output_dir);
    std::vector<fs::path> written;
    try {
      fs::create_directories(dir);
      for (const auto& o : result.outcomes) {
        const fs::path path = dir / (o.label + ".csv");
        written.push_back(path);
        write_trace(o.trace, path.string());
      }
      const fs::path manifest = dir / "manifest.json";
      written.push_back(manifest);
      write_text(manifest, result.manifest.dump(2) + "\n");
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) fs::remove(p, ec);
      throw;
    }
    for (const auto& p : written) result.files.push_back(p.string());
  }
  return result;
}

}  // namespace saddlesim::harness
