// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "oracles.hpp"
#include "saddlesim/harness/checks.hpp"
#include "saddlesim/harness/config.hpp"
#include "saddlesim/harness/experiment.hpp"
#include "saddlesim/harness/trace_io.hpp"
#include "saddlesim/metrics.hpp"
#include "saddlesim/network.hpp"
#include "saddlesim/problems.hpp"
#include "saddlesim/solvers.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace saddlesim;
using namespace saddlesim::harness;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace tol {
constexpr double gossip_slack = 1.05;
constexpr double gossip_mean = 1e-10;
constexpr double support = 1e-14;
constexpr double alg1_target = 1e-8;
constexpr double similarity_target = 1e-6;
constexpr double scaling_target = 1e-6;
constexpr double scaling_low = 3.0;
constexpr double scaling_high = 30.0;
constexpr double agreement = 1e-6;
constexpr double fd_relative = 1e-5;
// contraction ratios are not meaningful once dist_sq reaches rounding level
constexpr double ratio_floor = 1e-20;
// the ybar error bound falls below double rounding of y* for large alpha
constexpr double ybar_rounding = 1e-15;
}  // namespace tol

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, double budget_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_seconds) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%.2fs, budget %.0fs)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs,
              budget_seconds);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double hard_instance_L(const HardInstance<double>& inst) {
  const double s = 16.0 * double(inst.p) * inst.mu / double(inst.M);
  const double coupling = inst.delta / 4.0 * (1.0 + std::sqrt(2.0));
  return std::max(inst.delta, std::sqrt(4.0 * s * s + coupling * coupling));
}

Outcome gossip_contraction() {
  GossipCheckOptions opts;
  opts.slack = tol::gossip_slack;
  opts.mean_tol = tol::gossip_mean;
  const auto rows = gossip_check(opts);
  std::map<std::string, double> worst;
  bool ok = true;
  double drift = 0;
  for (const auto& r : rows) {
    auto& w = worst[to_string(r.kind)];
    w = std::max(w, r.ratio);
    drift = std::max(drift, r.mean_drift);
    ok = ok && r.pass;
  }
  std::string detail = "worst ratio to (1-sqrt(rho))^{2H}:";
  for (const auto& [k, v] : worst) detail += " " + k + "=" + fmt("%.3f", v);
  detail += fmt(", mean drift %.1e", drift);
  return {ok, detail};
}

Outcome delta_relatedness() {
  bool ok = true;
  std::string detail = "max block distance / delta:";
  for (double ratio : {1.0, 10.0, 100.0}) {
    const auto inst = build_hard_instance<double>(33, 1.0, ratio, 64);
    const auto mean = mean_hessian(inst.problem, Vec::Zero(128));
    double worst = 0;
    for (Index m = 0; m < 33; ++m) {
      const auto h = *inst.problem.agent(m).constant_hessian();
      worst = std::max({worst, spectral_norm(h.xx - mean.xx), spectral_norm(h.xy - mean.xy),
                        spectral_norm(h.yy - mean.yy)});
    }
    ok = ok && worst <= ratio;
    detail += fmt(" %.4f", worst / ratio);
  }
  return {ok, detail};
}

Outcome zero_propagation() {
  LowerBoundOptions opts;
  opts.multiples = {1, 2, 3};
  opts.tol = tol::support;
  const auto res = lower_bound_check(opts);
  bool ok = res.rows.size() == 3;
  std::string detail = "l=" + std::to_string(res.l) + ", support/allowed:";
  for (const auto& r : res.rows) {
    ok = ok && r.support_ok;
    detail += " K=" + std::to_string(r.K) + ":" + std::to_string(r.support) + "/" + std::to_string(r.allowed);
  }
  return {ok, detail};
}

Outcome ybar_approximation() {
  bool ok = true;
  double worst = 0;
  for (double alpha : {0.1, 1.0, 10.0}) {
    for (Index d : {10, 20, 40}) {
      Mat A = Mat::Identity(d, d);
      for (Index i = 0; i + 1 < d; ++i) A(i, i + 1) = -1;
      const Vec y = oracle::affine_root(A.transpose() * A + alpha * Mat::Identity(d, d), -Vec::Unit(d, 0));
      const auto approx = approx_solution_ybar(alpha, d);
      const double err = (approx.ybar - y).norm();
      const double allowed = approx.error_bound + tol::ybar_rounding * y.norm();
      ok = ok && err <= allowed;
      worst = std::max(worst, err / allowed);
    }
  }
  return {ok, fmt("max error / (bound + rounding) %.3f", worst)};
}

Outcome lower_bound_floor() {
  LowerBoundOptions opts;
  opts.multiples = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto res = lower_bound_check(opts);
  bool ok = res.rows.size() == 10;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& r : res.rows) {
    ok = ok && r.floor_ok;
    margin = std::min(margin, std::min(r.dist_sq, r.min_node_dist_sq) / r.floor);
  }
  return {ok, "d=" + std::to_string(res.d) + ", l=" + std::to_string(res.l) + fmt(", min dist/floor %.3g", margin)};
}

Outcome algorithm1_contraction() {
  auto net = random_quadratic_network<double>(8, 20, 1.0, 0.5, 42);
  const auto k = exact_affine_constants(net);
  const Vec z_star = reference_solution(net, 1e-14).z_star;
  const auto t = tune(TuningMode::ScCentralized, k);
  const double dist0 = z_star.squaredNorm();
  const Index bound =
      static_cast<Index>(std::ceil(8.0 / (t.gamma * k.mu) * std::log(dist0 / tol::alg1_target)));
  RunOptions<double> opts;
  opts.K = bound;
  opts.callback = [&](const RoundState<double>& s) {
    RoundMetrics m;
    m.dist_sq = distance_sq(s.point, z_star);
    return m;
  };
  const auto res = run_algorithm1(net, t, opts);
  const double allowed = 1.0 - t.gamma * k.mu / 2.0;
  double worst = 0;
  Index reached = -1;
  for (std::size_t i = 1; i < res.trace.rows.size(); ++i) {
    const auto& prev = res.trace.rows[i - 1];
    const auto& cur = res.trace.rows[i];
    if (reached < 0 && cur.dist_sq <= tol::alg1_target) reached = cur.round;
    if (cur.round > 3 && prev.dist_sq > tol::ratio_floor) worst = std::max(worst, cur.dist_sq / prev.dist_sq);
  }
  const bool ok = worst <= allowed && reached >= 0;
  return {ok, fmt("worst ratio %.4f", worst) + fmt(" vs 1-gamma*mu/2 = %.4f", allowed) + ", reached 1e-8 at round " +
                  std::to_string(reached) + " of bound " + std::to_string(bound)};
}

ExperimentConfig similarity_config(double amplitude) {
  ExperimentConfig c;
  c.seed = 0;
  c.K = 3000;
  c.target_dist_sq = tol::similarity_target;
  c.problem.M = 25;
  c.problem.n_local = 100;
  c.problem.d = 40;
  c.problem.noise_amplitude = amplitude;
  c.network.topology = "star";
  MethodSpec a1;
  a1.name = "alg1";
  MethodSpec egd;
  egd.name = "egd_centralized";
  c.methods = {a1, egd};
  c.validate();
  return c;
}

std::int64_t rounds_to(const RunTrace& t, double target) {
  for (const auto& r : t.rows)
    if (r.dist_sq <= target) return r.comm_rounds;
  return -1;
}

Outcome similarity_advantage() {
  double ratio[2] = {0, 0};
  std::int64_t a1[2], eg[2];
  const double amps[2] = {0.1, 1.0};
  for (int i = 0; i < 2; ++i) {
    const auto res = run_experiment(similarity_config(amps[i]), false);
    a1[i] = rounds_to(res.outcomes[0].trace, tol::similarity_target);
    eg[i] = rounds_to(res.outcomes[1].trace, tol::similarity_target);
    if (a1[i] < 0 || eg[i] < 0) return {false, "target not reached at amplitude " + fmt("%g", amps[i])};
    ratio[i] = double(eg[i]) / double(a1[i]);
  }
  const bool ok = a1[0] < eg[0] && ratio[0] > ratio[1];
  std::string detail = "rounds alg1/egd: amp 0.1 " + std::to_string(a1[0]) + "/" + std::to_string(eg[0]) +
                       ", amp 1.0 " + std::to_string(a1[1]) + "/" + std::to_string(eg[1]) +
                       fmt(", advantage %.2f", ratio[0]) + fmt(" vs %.2f", ratio[1]);
  return {ok, detail};
}

Outcome delta_scaling() {
  std::int64_t rounds[2];
  const double ratios[2] = {10.0, 100.0};
  for (int i = 0; i < 2; ++i) {
    const auto inst = build_hard_instance<double>(33, 1.0, ratios[i], 64);
    const Vec z_star = hard_instance_solution(inst);
    ProblemConstants<double> k;
    k.L = hard_instance_L(inst);
    k.mu = inst.mu;
    k.delta = inst.delta;
    const auto t = tune(TuningMode::ScCentralized, k);
    RunOptions<double> opts;
    opts.K = 200000;
    opts.callback = [&](const RoundState<double>& s) {
      RoundMetrics m;
      m.dist_sq = distance_sq(s.point, z_star);
      m.stop = m.dist_sq <= tol::scaling_target;
      return m;
    };
    const auto res = run_algorithm1(inst.problem, t, opts);
    rounds[i] = rounds_to(res.trace, tol::scaling_target);
    if (rounds[i] < 0) return {false, "target not reached for delta/mu=" + fmt("%g", ratios[i])};
  }
  const double growth = double(rounds[1]) / double(rounds[0]);
  const bool ok = growth >= tol::scaling_low && growth <= tol::scaling_high;
  return {ok, "rounds " + std::to_string(rounds[0]) + " -> " + std::to_string(rounds[1]) + fmt(", growth %.2f", growth)};
}

Outcome fixed_point_agreement() {
  auto net = random_quadratic_network<double>(8, 10, 1.0, 0.5, 7);
  const auto k = exact_affine_constants(net);
  const Vec z_star = reference_solution(net, 1e-14).z_star;
  const auto gossip = build_gossip_matrix(build_topology(TopologyKind::Complete, 8));
  RunOptions<double> opts;
  opts.K = 3000;
  opts.callback = [&](const RoundState<double>& s) {
    RoundMetrics m;
    m.stop = distance_sq(s.point, z_star) <= 1e-20;
    return m;
  };
  const auto r1 = run_algorithm1(net, tune(TuningMode::ScCentralized, k), opts);
  const auto r2 = run_algorithm2(net, gossip, tune(TuningMode::ScDecentralized, k, NetworkSpectrum<double>{gossip.rho, 8}),
                                 opts);
  opts.K = 200000;
  const auto eg = run_baseline(BaselineKind::EgdCentralized, net, static_cast<const GossipMatrix<double>*>(nullptr),
                               1.0 / (2.0 * k.L), opts);
  const double d12 = (r1.z - r2.z).norm(), d1e = (r1.z - eg.z).norm(), d2e = (r2.z - eg.z).norm();
  const double worst = std::max({d12, d1e, d2e});
  return {worst <= tol::agreement, fmt("max pairwise distance %.2e", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "saddlesim_acceptance_determinism";
  fs::remove_all(base);
  auto config_for = [&](const std::string& sub) {
    return parse_config(json{{"seed", 17},
                             {"K", 200},
                             {"output_dir", (base / sub).string()},
                             {"problem", {{"family", "random_quadratic"}, {"M", 8}, {"d", 6}}},
                             {"network", {{"topology", "ring"}}},
                             {"methods", json::array({"alg1", "alg2", "egd_decentralized", "egd_gradient_tracking"})}});
  };
  run_experiment(config_for("a"));
  run_experiment(config_for("b"));
  bool ok = true;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    ok = ok && slurp(entry.path()) == slurp(base / "b" / entry.path().filename());
  }
  fs::remove_all(base);
  return {ok && files == 4, std::to_string(files) + " CSV files compared"};
}

Outcome regression_constants() {
  std::mt19937_64 rng(11);
  const Mat X = oracle::gaussian(40, 5, rng);
  const Vec y = oracle::gaussian(40, 1, rng).col(0);
  const double lambda = 0.1, beta = 1.0, R_w = 0.5, R_r = 1.0;
  auto g = build_robust_regression<double>(X, y, lambda, beta, R_w, R_r);
  const auto c = estimate_regression_constants(*g);
  const bool lrr = c.L_rr == R_w * R_w + beta;
  const bool self = estimate_similarity(*g, *g) == 0.0;
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const Vec z = oracle::gaussian(10, 1, rng).col(0);
    Vec grad = oracle::fd_gradient(
        [&](const Vec& u) { return oracle::regression_loss(X, y, lambda, beta, u.head(5), u.tail(5)); }, z);
    grad.tail(5) *= -1;
    worst = std::max(worst, (g->apply(z) - grad).norm() / std::max(1.0, grad.norm()));
  }
  const bool ok = lrr && self && worst <= tol::fd_relative;
  return {ok, std::string("L_rr ") + (lrr ? "exact" : "wrong") + ", delta(a,a) " + (self ? "0" : "nonzero") +
                  fmt(", max relative FD error %.2e", worst)};
}

}  // namespace

int main() {
  criterion(1, 10, gossip_contraction);
  criterion(2, 5, delta_relatedness);
  criterion(3, 30, zero_propagation);
  criterion(4, 5, ybar_approximation);
  criterion(5, 60, lower_bound_floor);
  criterion(6, 60, algorithm1_contraction);
  criterion(7, 300, similarity_advantage);
  criterion(8, 300, delta_scaling);
  criterion(9, 60, fixed_point_agreement);
  criterion(10, 60, determinism);
  criterion(11, 60, regression_constants);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
