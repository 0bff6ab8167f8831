#include "saddlesim/harness/checks.hpp"

#include "saddlesim/metrics.hpp"
#include "saddlesim/problems.hpp"
#include "saddlesim/solvers.hpp"

#include <algorithm>
#include <random>

namespace saddlesim::harness {

std::vector<GossipCheckRow> gossip_check(const GossipCheckOptions& opts) {
  std::vector<GossipCheckRow> rows;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (TopologyKind kind : opts.kinds) {
    for (Index M : opts.sizes) {
      const auto g = build_gossip_matrix<double>(build_topology(kind, M), opts.lazy);
      for (Index H : opts.budgets) {
        GossipCheckRow r;
        r.kind = kind;
        r.M = M;
        r.H = H;
        r.rho = g.rho;
        const double bound = std::pow(1.0 - std::sqrt(g.rho), 2.0 * static_cast<double>(H));
        for (Index t = 0; t < opts.trials; ++t) {
          Matrix<double> X(M, opts.dim);
          for (Index i = 0; i < M; ++i)
            for (Index j = 0; j < opts.dim; ++j) X(i, j) = normal(rng);
          const Matrix<double> Y = acc_gossip(X, g, H);
          const double in = consensus_error(X);
          const auto ybar = Y.colwise().mean().eval();
          const double out = consensus_error(Y);
          const double node = (Y.rowwise() - ybar).rowwise().squaredNorm().maxCoeff();
          r.ratio = std::max(r.ratio, out / (bound * in));
          r.node_ratio = std::max(r.node_ratio, node / (bound * in));
          r.mean_drift = std::max(r.mean_drift, (ybar - X.colwise().mean()).cwiseAbs().maxCoeff());
        }
        r.pass = r.ratio <= opts.slack && r.mean_drift <= opts.mean_tol;
        rows.push_back(r);
      }
    }
  }
  return rows;
}

LowerBoundCheck lower_bound_check(const LowerBoundOptions& opts) {
  if (opts.multiples.empty()) throw std::invalid_argument("lower_bound_check: no K multiples");
  // l is known only after building; the line distance between the role groups is M - 2p + 1.
  const Index p = (opts.M + 31) / 32;
  const Index l_guess = opts.M - 2 * p + 1;
  const Index max_mult = *std::max_element(opts.multiples.begin(), opts.multiples.end());
  const Index d = opts.d > 0 ? opts.d : hard_instance_min_dimension(max_mult * l_guess, opts.mu, opts.delta);
  const auto inst = build_hard_instance<double>(opts.M, opts.mu, opts.delta, d);
  const auto rates = lower_bound_rates(opts.mu, opts.delta);
  const auto gossip = build_gossip_matrix<double>(inst.line);
  const Vector<double> z_star = hard_instance_solution(inst);
  const double y_norm_sq = z_star.tail(d).squaredNorm();

  LowerBoundCheck out;
  out.M = opts.M;
  out.d = d;
  out.l = inst.l;
  out.mu = opts.mu;
  out.delta = opts.delta;
  out.q = rates.q;

  std::vector<Index> targets;
  for (Index j : opts.multiples) targets.push_back(j * inst.l);
  std::sort(targets.begin(), targets.end());
  const Index per_iter = baseline_rounds_per_iteration(BaselineKind::EgdDecentralized);
  const Index iters = targets.back() / per_iter;

  const double s = 16.0 * static_cast<double>(inst.p) * opts.mu / static_cast<double>(opts.M);
  const double coupling = opts.delta / 4.0 * (1.0 + std::sqrt(2.0));
  const double L = std::max(opts.delta, std::sqrt(4.0 * s * s + coupling * coupling));

  RunOptions<double> o;
  o.K = std::max<Index>(iters, 1);
  o.callback = [&](const RoundState<double>& st) {
    RoundMetrics m;
    for (Index K : targets) {
      // comm rounds advance in steps of 2; sample the last state within budget K
      if (st.comm_rounds != (K / per_iter) * per_iter) continue;
      LowerBoundRow r;
      r.K = K;
      for (Index i = 0; i < st.nodes->rows(); ++i) {
        const Vector<double> zi = st.nodes->row(i).transpose();
        r.support = std::max(r.support, support_size<double>(zi, inst.problem.dims(), opts.tol));
        const double di = distance_sq(zi, z_star);
        r.min_node_dist_sq = i == 0 ? di : std::min(r.min_node_dist_sq, di);
      }
      r.allowed = K / inst.l;
      r.dist_sq = distance_sq(st.point, z_star);
      r.floor = std::pow(rates.q, 2.0 * static_cast<double>(K) / static_cast<double>(inst.l)) * y_norm_sq / 16.0;
      r.support_ok = r.support <= r.allowed;
      r.floor_ok = r.dist_sq >= r.floor && r.min_node_dist_sq >= r.floor;
      out.rows.push_back(r);
    }
    return m;
  };
  run_baseline(BaselineKind::EgdDecentralized, inst.problem, &gossip, 1.0 / (2.0 * L), o);
  return out;
}

}  // namespace saddlesim::harness
