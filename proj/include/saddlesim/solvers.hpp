#ifndef SADDLESIM_SOLVERS_HPP
#define SADDLESIM_SOLVERS_HPP

#include "saddlesim/core.hpp"
#include "saddlesim/network.hpp"
#include "saddlesim/trace.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>

namespace saddlesim {

/// A non-finite iterate appeared. `round` is the outer round (or inner
/// iteration for plain extragradient) that produced it.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& where, Index round)
      : std::runtime_error(where + ": non-finite iterate at round " + std::to_string(round)), round_(round) {}
  Index round() const { return round_; }

 private:
  Index round_;
};

// ---------------------------------------------------------------------------
// Extragradient
// ---------------------------------------------------------------------------

template <typename Scalar>
struct ExtragradientStop {
  Index max_iters = 1000;
  /// Stop early once ||z^{k+1} - z^k|| <= tol. 0 runs exactly max_iters.
  Scalar tol = Scalar(0);
};

template <typename Scalar>
struct ExtragradientResult {
  Vector<Scalar> z;
  Index iterations = 0;
  Scalar last_step = Scalar(0);  ///< ||z^{k+1} - z^k|| of the final iteration
};

/// z^{k+1/2} = proj(z^k - step F(z^k)),  z^{k+1} = proj(z^k - step F(z^{k+1/2})).
/// `op` maps a stacked vector to the operator value.
template <typename Scalar, typename Op>
ExtragradientResult<Scalar> extragradient(const Op& op, const SplitConstraints<Scalar>& sets, SplitDims dims,
                                          const VecRef<Scalar>& z0, Scalar step, ExtragradientStop<Scalar> stop = {}) {
  if (!(step > Scalar(0))) throw std::invalid_argument("extragradient: step must be positive");
  if (z0.size() != dims.total()) throw std::invalid_argument("extragradient: dimension mismatch");
  ExtragradientResult<Scalar> res;
  res.z = project(sets, dims, z0);
  Vector<Scalar> half(dims.total());
  Vector<Scalar> next(dims.total());
  for (Index k = 0; k < stop.max_iters; ++k) {
    half = project(sets, dims, res.z - step * op(res.z));
    next = project(sets, dims, res.z - step * op(half));
    if (!all_finite(next)) throw DivergenceError("extragradient", k + 1);
    res.last_step = (next - res.z).norm();
    res.z.swap(next);
    res.iterations = k + 1;
    if (stop.tol > Scalar(0) && res.last_step <= stop.tol) break;
  }
  return res;
}

/// Approximately solves min_{u_x} max_{u_y} gamma f(u) + 1/2||u_x - v_x||^2 - 1/2||u_y - v_y||^2
/// over Z by `iters` extragradient steps on gamma F(u) + u - v, starting from
/// `start`. The operator is 1-strongly monotone and (1 + gamma L)-Lipschitz,
/// so the step is 1 / (2 (1 + gamma L)).
template <typename Scalar>
Vector<Scalar> solve_local_subproblem(const LocalProblem<Scalar>& f, const SplitConstraints<Scalar>& sets,
                                      const VecRef<Scalar>& v, const VecRef<Scalar>& start, Scalar gamma, Scalar L,
                                      Index iters) {
  const SplitDims dims = f.dims();
  if (gamma < Scalar(0)) throw std::invalid_argument("solve_local_subproblem: gamma must be nonnegative");
  if (gamma == Scalar(0)) return project(sets, dims, v);
  const Vector<Scalar> vv = v;
  auto op = [&](const Vector<Scalar>& u) -> Vector<Scalar> { return gamma * f.apply(u) + u - vv; };
  const Scalar step = Scalar(1) / (Scalar(2) * (Scalar(1) + gamma * L));
  return extragradient<Scalar>(op, sets, dims, start, step, {iters, Scalar(0)}).z;
}

// ---------------------------------------------------------------------------
// Tuning
// ---------------------------------------------------------------------------

enum class TuningMode { ScCentralized, ScDecentralized, CcCentralized, CcDecentralized };

inline std::string to_string(TuningMode m) {
  switch (m) {
    case TuningMode::ScCentralized: return "sc-centralized";
    case TuningMode::ScDecentralized: return "sc-decentralized";
    case TuningMode::CcCentralized: return "cc-centralized";
    case TuningMode::CcDecentralized: return "cc-decentralized";
  }
  return "sc-centralized";
}

inline TuningMode tuning_mode_from_string(const std::string& s) {
  if (s == "sc-centralized") return TuningMode::ScCentralized;
  if (s == "sc-decentralized") return TuningMode::ScDecentralized;
  if (s == "cc-centralized") return TuningMode::CcCentralized;
  if (s == "cc-decentralized") return TuningMode::CcDecentralized;
  throw std::invalid_argument("unknown tuning mode '" + s + "'");
}

inline bool is_decentralized(TuningMode m) {
  return m == TuningMode::ScDecentralized || m == TuningMode::CcDecentralized;
}
inline bool is_convex_concave(TuningMode m) {
  return m == TuningMode::CcCentralized || m == TuningMode::CcDecentralized;
}

template <typename Scalar>
struct TuningParameters {
  TuningMode mode = TuningMode::ScCentralized;
  Scalar gamma = Scalar(0);
  /// Relative precision for sc modes, absolute for cc modes.
  Scalar inner_precision = Scalar(0);
  Index inner_iters = 1;
  Index gossip_h0 = 0;
  Index gossip_h1 = 0;
  /// Smoothness used for the inner step size.
  Scalar L = Scalar(0);

  void validate() const {
    if (!(gamma > Scalar(0)) || !std::isfinite(static_cast<double>(gamma))) {
      throw std::invalid_argument("tuning: gamma must be positive and finite");
    }
    if (!is_convex_concave(mode) && !(inner_precision > Scalar(0) && inner_precision < Scalar(1))) {
      throw std::invalid_argument("tuning: relative inner precision must lie in (0, 1)");
    }
    if (inner_iters < 1) throw std::invalid_argument("tuning: inner_iters must be >= 1");
    if (gossip_h0 < 0 || gossip_h1 < 0) throw std::invalid_argument("tuning: gossip budgets must be >= 0");
    if (!(L >= Scalar(0))) throw std::invalid_argument("tuning: L must be nonnegative");
  }
};

template <typename Scalar>
struct NetworkSpectrum {
  Scalar rho = Scalar(1);
  Index M = 1;
};

template <typename Scalar>
struct TuningOptions {
  /// Constant inside T = c (1 + gamma L) log(1/precision).
  Scalar inner_constant = Scalar(4);
  /// Constant inside H = c / sqrt(rho) log(arg).
  Scalar gossip_constant = Scalar(1);
  /// Target accuracy; enters the gossip budgets and the cc precisions.
  Scalar epsilon = Scalar(1e-6);
};

namespace detail {

template <typename Scalar>
Scalar inverse_or_inf(Scalar c, Scalar v) {
  return v > Scalar(0) ? Scalar(1) / (c * v) : std::numeric_limits<Scalar>::infinity();
}

template <typename Scalar>
Index ceil_at_least_one(Scalar v) {
  if (!std::isfinite(static_cast<double>(v)) || v <= Scalar(1)) return 1;
  return static_cast<Index>(std::ceil(v));
}

template <typename Scalar>
Index gossip_budget(Scalar c, Scalar rho, Scalar arg) {
  if (!(rho > Scalar(0))) throw std::invalid_argument("tune: rho must lie in (0, 1]");
  if (!(arg > Scalar(1))) return 1;
  return ceil_at_least_one(c / std::sqrt(rho) * std::log(arg));
}

}  // namespace detail

/// Step, inner precision, inner budget and gossip budgets for a tuning mode.
template <typename Scalar>
TuningParameters<Scalar> tune(TuningMode mode, const ProblemConstants<Scalar>& k,
                              std::optional<NetworkSpectrum<std::type_identity_t<Scalar>>> network = std::nullopt,
                              TuningOptions<std::type_identity_t<Scalar>> opts = {}) {
  k.validate();
  if (is_decentralized(mode) && !network) throw std::invalid_argument("tune: decentralized modes need rho and M");
  if (!(opts.epsilon > Scalar(0))) throw std::invalid_argument("tune: epsilon must be positive");
  TuningParameters<Scalar> t;
  t.mode = mode;
  t.L = k.L;
  const Scalar eps = opts.epsilon;
  const Scalar delta = k.delta;

  if (!is_convex_concave(mode)) {
    const Scalar mu = k.mu;
    if (!(mu > Scalar(0))) throw std::invalid_argument("tune: strongly monotone modes need mu > 0");
    if (mode == TuningMode::ScCentralized) {
      t.gamma = std::min(Scalar(1) / (Scalar(12) * mu), detail::inverse_or_inf(Scalar(4), delta));
      const Scalar g = t.gamma;
      t.inner_precision = Scalar(1) / (Scalar(2) * (Scalar(2) + Scalar(4) * g * delta * delta / mu +
                                                    Scalar(4) / (g * mu) + Scalar(4) * g * g * delta * delta));
    } else {
      t.gamma = std::min(Scalar(1) / (Scalar(12) * mu), detail::inverse_or_inf(Scalar(7), delta));
      const Scalar g = t.gamma;
      t.inner_precision = Scalar(1) / (Scalar(2) * (Scalar(2) + Scalar(12) * g * g * delta * delta +
                                                    Scalar(4) / (g * mu) + Scalar(8) * g * delta * delta / mu));
      const Scalar omega = k.omega.value_or(Scalar(1));
      const Scalar G = k.G.value_or(Scalar(1));
      const Scalar M = Scalar(network->M);
      const Scalar L = k.L;
      const Scalar a0 = (g * g + g / mu) * M * (L * omega + G) * (L * omega + G) / (eps * g * mu);
      const Scalar a1 = (Scalar(1) + g * g * L * L + g * L * L / mu) * M * omega * omega / (eps * g * mu);
      t.gossip_h0 = detail::gossip_budget(opts.gossip_constant, network->rho, a0);
      t.gossip_h1 = detail::gossip_budget(opts.gossip_constant, network->rho, a1);
    }
    t.inner_iters = detail::ceil_at_least_one(opts.inner_constant * (Scalar(1) + t.gamma * k.L) *
                                              std::log(Scalar(1) / t.inner_precision));
  } else {
    if (!k.omega || !k.G) throw std::invalid_argument("tune: convex-concave modes need Omega and G");
    if (!(delta > Scalar(0))) throw std::invalid_argument("tune: convex-concave modes need delta > 0");
    const Scalar omega = *k.omega;
    const Scalar G = *k.G;
    const Scalar L = k.L;
    t.gamma = mode == TuningMode::CcCentralized ? Scalar(1) / (Scalar(2) * delta) : Scalar(1) / (Scalar(4) * delta);
    const Scalar spread = L * omega + G + delta * omega;
    t.inner_precision = std::min(eps / delta, eps * eps / (spread * spread));
    t.inner_iters = detail::ceil_at_least_one(opts.inner_constant * (Scalar(1) + t.gamma * L) *
                                              std::log(omega * omega / t.inner_precision));
    if (mode == TuningMode::CcDecentralized) {
      const Scalar mu = eps / (Scalar(2) * omega * omega);
      const Scalar g = t.gamma;
      const Scalar M = Scalar(network->M);
      const Scalar a0 = (g * g + g / mu) * M * (L * omega + G) * (L * omega + G) / (eps * g * mu);
      const Scalar a1 = (Scalar(1) + g * g * L * L + g * L * L / mu) * M * omega * omega / (eps * g * mu);
      t.gossip_h0 = detail::gossip_budget(opts.gossip_constant, network->rho, a0);
      t.gossip_h1 = detail::gossip_budget(opts.gossip_constant, network->rho, a1);
    }
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// Run plumbing
// ---------------------------------------------------------------------------

/// What the solver hands to the metric hook after a round. `point` is the
/// reported iterate (last or averaged); `nodes` holds per-node rows for
/// decentralized methods and is null otherwise.
template <typename Scalar>
struct RoundState {
  Index round = 0;
  Index comm_rounds = 0;
  Index local_iters = 0;
  const Vector<Scalar>& point;
  const Matrix<Scalar>* nodes = nullptr;
};

struct RoundMetrics {
  double dist_sq = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double consensus_err = std::numeric_limits<double>::quiet_NaN();
  bool stop = false;
};

template <typename Scalar>
using RoundCallback = std::function<RoundMetrics(const RoundState<Scalar>&)>;

template <typename Scalar>
struct RunOptions {
  Index K = 100;
  /// Sample metrics every `cadence` rounds; round 0 and the last round are always sampled.
  Index cadence = 1;
  bool record_wall_time = false;
  std::uint64_t seed = 0;
  /// Report the running mean of the u^k (or half-step) iterates instead of the last iterate.
  bool report_averaged = false;
  std::optional<Vector<Scalar>> z0;
  RoundCallback<Scalar> callback;
};

template <typename Scalar>
struct RunResult {
  RunTrace trace;
  Vector<Scalar> z;      ///< last iterate (node mean for decentralized methods)
  Matrix<Scalar> nodes;  ///< per-node rows; empty for centralized methods
  std::optional<Vector<Scalar>> averaged;
  Index rounds = 0;
  Index comm_rounds = 0;
  Index local_iters = 0;
};

/// Coordinate-wise running mean.
template <typename Scalar>
class RunningAverage {
 public:
  void add(const VecRef<Scalar>& v) {
    if (count_ == 0) {
      mean_ = v;
    } else {
      if (v.size() != mean_.size()) throw std::invalid_argument("RunningAverage: dimension mismatch");
      mean_ += (v - mean_) / Scalar(count_ + 1);
    }
    ++count_;
  }
  Index count() const { return count_; }
  const Vector<Scalar>& mean() const {
    if (count_ == 0) throw std::logic_error("averaged_iterate: empty history");
    return mean_;
  }

 private:
  Vector<Scalar> mean_;
  Index count_ = 0;
};

template <typename Scalar>
Vector<Scalar> averaged_iterate(const std::vector<Vector<Scalar>>& history) {
  if (history.empty()) throw std::invalid_argument("averaged_iterate: empty history");
  RunningAverage<Scalar> avg;
  for (const auto& u : history) avg.add(u);
  return avg.mean();
}

namespace detail {

template <typename Scalar>
class Recorder {
 public:
  Recorder(std::string method, const RunOptions<Scalar>& opts) : opts_(opts), start_(std::chrono::steady_clock::now()) {
    if (opts_.K < 1) throw std::invalid_argument(method + ": K must be >= 1");
    if (opts_.cadence < 1) throw std::invalid_argument(method + ": cadence must be >= 1");
    trace_.method = std::move(method);
  }

  /// Returns true when the hook asked to stop.
  bool record(Index round, Index comm, Index local, const Vector<Scalar>& point, const Matrix<Scalar>* nodes,
              bool force) {
    if (!force && round % opts_.cadence != 0 && round != opts_.K) return false;
    TraceRow row;
    row.round = round;
    row.comm_rounds = comm;
    row.local_iters = local;
    bool stop = false;
    if (opts_.callback) {
      const RoundMetrics m = opts_.callback(RoundState<Scalar>{round, comm, local, point, nodes});
      row.dist_sq = m.dist_sq;
      row.gap = m.gap;
      row.consensus_err = m.consensus_err;
      stop = m.stop;
    }
    if (opts_.record_wall_time) {
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    trace_.rows.push_back(row);
    return stop;
  }

  RunTrace take() { return std::move(trace_); }

 private:
  const RunOptions<Scalar>& opts_;
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
};

template <typename Scalar>
Vector<Scalar> initial_point(const NetworkProblem<Scalar>& problem, const RunOptions<Scalar>& opts) {
  const SplitDims dims = problem.dims();
  if (opts.z0) {
    if (opts.z0->size() != dims.total()) throw std::invalid_argument("initial point dimension mismatch");
    return project(problem.sets(), dims, *opts.z0);
  }
  return project(problem.sets(), dims, Vector<Scalar>::Zero(dims.total()));
}

/// Row m = F_m(row m of Z).
template <typename Scalar>
Matrix<Scalar> local_operator_rows(const NetworkProblem<Scalar>& problem, const Matrix<Scalar>& Z) {
  Matrix<Scalar> out(Z.rows(), Z.cols());
  for (Index m = 0; m < problem.size(); ++m) out.row(m) = problem.agent(m).apply(Z.row(m).transpose()).transpose();
  return out;
}

template <typename Scalar>
Matrix<Scalar> project_rows(const NetworkProblem<Scalar>& problem, const Matrix<Scalar>& Z) {
  const SplitDims dims = problem.dims();
  if (!problem.sets().x.is_compact() && !problem.sets().y.is_compact()) return Z;
  Matrix<Scalar> out(Z.rows(), Z.cols());
  for (Index m = 0; m < Z.rows(); ++m) {
    out.row(m) = project(problem.sets(), dims, Z.row(m).transpose()).transpose();
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Algorithm 1: star network, master owns agent `master`
// ---------------------------------------------------------------------------

/// Per round: gather F_m(z^k) (1 round), master solves the proximal
/// subproblem around v^k = z^k - gamma (F(z^k) - F_1(z^k)), gathers F_m(u^k)
/// (1 round), forms z^{k+1} = proj[u^k + gamma (F(z^k) - F_1(z^k) - F(u^k) + F_1(u^k))]
/// and broadcasts it (1 round).
template <typename Scalar>
RunResult<Scalar> run_algorithm1(const NetworkProblem<Scalar>& problem, const TuningParameters<Scalar>& tuning,
                                 const RunOptions<Scalar>& opts, Index master = 0) {
  tuning.validate();
  if (master < 0 || master >= problem.size()) throw std::out_of_range("run_algorithm1: master index out of range");
  const SplitDims dims = problem.dims();
  const auto& sets = problem.sets();
  const auto& f1 = problem.agent(master);
  const Scalar g = tuning.gamma;
  const bool averaged = opts.report_averaged || is_convex_concave(tuning.mode);

  detail::Recorder<Scalar> rec("alg1", opts);
  Vector<Scalar> z = detail::initial_point(problem, opts);
  RunningAverage<Scalar> avg;
  Index comm = 0;
  Index local = 0;
  rec.record(0, comm, local, z, nullptr, true);

  Index k = 1;
  for (; k <= opts.K; ++k) {
    const Vector<Scalar> shift = apply_mean_operator(problem, z) - f1.apply(z);
    const Vector<Scalar> v = z - g * shift;
    const Vector<Scalar> u = solve_local_subproblem(f1, sets, v, z, g, tuning.L, tuning.inner_iters);
    const Vector<Scalar> shift_u = apply_mean_operator(problem, u) - f1.apply(u);
    z = project(sets, dims, u + g * (shift - shift_u));
    if (!all_finite(z)) throw DivergenceError("alg1", k);
    comm += 3;
    local += tuning.inner_iters;
    if (averaged) avg.add(u);
    if (rec.record(k, comm, local, averaged ? avg.mean() : z, nullptr, false)) break;
  }

  RunResult<Scalar> res;
  res.rounds = std::min(k, opts.K);
  res.comm_rounds = comm;
  res.local_iters = local;
  res.z = z;
  if (averaged) res.averaged = avg.mean();
  res.trace = rec.take();
  return res;
}

// ---------------------------------------------------------------------------
// Algorithm 2: arbitrary connected network
// ---------------------------------------------------------------------------

/// Each round performs, in order: accelerated gossip of the operator rows
/// (H0 + 1 rounds), a proximal step at a uniformly drawn node m_k, spreading
/// of its result (H1 + 1), gossip of the new operator rows (H0 + 1), the
/// correction at m_k, spreading of the corrected point (H1 + 1), and a local
/// projection at every node.
template <typename Scalar>
RunResult<Scalar> run_algorithm2(const NetworkProblem<Scalar>& problem, const GossipMatrix<Scalar>& gossip,
                                 const TuningParameters<Scalar>& tuning, const RunOptions<Scalar>& opts) {
  tuning.validate();
  const Index M = problem.size();
  if (gossip.size() != M) throw std::invalid_argument("run_algorithm2: gossip matrix size does not match M");
  const SplitDims dims = problem.dims();
  const Index n = dims.total();
  const auto& sets = problem.sets();
  const Scalar g = tuning.gamma;
  const Index H0 = tuning.gossip_h0;
  const Index H1 = tuning.gossip_h1;
  const bool averaged = opts.report_averaged || is_convex_concave(tuning.mode);

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<Index> pick(0, M - 1);

  detail::Recorder<Scalar> rec("alg2", opts);
  Matrix<Scalar> Z = detail::initial_point(problem, opts).transpose().replicate(M, 1);
  Vector<Scalar> zbar = Z.colwise().mean().transpose();
  RunningAverage<Scalar> avg;
  Index comm = 0;
  Index local = 0;
  rec.record(0, comm, local, zbar, &Z, true);

  Matrix<Scalar> one_hot = Matrix<Scalar>::Zero(M, n);
  Index k = 1;
  for (; k <= opts.K; ++k) {
    // 1. operator tracking
    const Matrix<Scalar> Fz = detail::local_operator_rows(problem, Z);
    const Matrix<Scalar> Fbar = acc_gossip(Fz, gossip, H0);
    comm += acc_gossip_rounds(H0);

    // 2. local proximal step at m_k
    const Index mk = pick(rng);
    const auto& fk = problem.agent(mk);
    const Vector<Scalar> zk = Z.row(mk).transpose();
    const Vector<Scalar> shift = Fbar.row(mk).transpose() - Fz.row(mk).transpose();
    const Vector<Scalar> v = zk - g * shift;
    const Vector<Scalar> u_tilde = solve_local_subproblem(fk, sets, v, zk, g, tuning.L, tuning.inner_iters);
    local += tuning.inner_iters;

    // 3. spread u~ and track the operator at the new rows
    one_hot.setZero();
    one_hot.row(mk) = u_tilde.transpose();
    const Matrix<Scalar> U = Scalar(M) * acc_gossip(one_hot, gossip, H1);
    comm += acc_gossip_rounds(H1);
    const Matrix<Scalar> Fhalf = acc_gossip(detail::local_operator_rows(problem, U), gossip, H0);
    comm += acc_gossip_rounds(H0);

    // 4. correction at m_k
    const Vector<Scalar> z_tilde =
        u_tilde + g * (shift - Fhalf.row(mk).transpose() + fk.apply(u_tilde));

    // 5. spread z~
    one_hot.setZero();
    one_hot.row(mk) = z_tilde.transpose();
    const Matrix<Scalar> Zhat = Scalar(M) * acc_gossip(one_hot, gossip, H1);
    comm += acc_gossip_rounds(H1);

    // 6. local projection
    Z = detail::project_rows(problem, Zhat);
    if (!all_finite(Z)) throw DivergenceError("alg2", k);
    zbar = Z.colwise().mean().transpose();
    if (averaged) avg.add(U.colwise().mean().transpose());
    if (rec.record(k, comm, local, averaged ? avg.mean() : zbar, &Z, false)) break;
  }

  RunResult<Scalar> res;
  res.rounds = std::min(k, opts.K);
  res.comm_rounds = comm;
  res.local_iters = local;
  res.z = zbar;
  res.nodes = Z;
  if (averaged) res.averaged = avg.mean();
  res.trace = rec.take();
  return res;
}

/// Counted communication rounds of one Algorithm 2 iteration.
inline Index algorithm2_rounds_per_iteration(Index H0, Index H1) {
  return 2 * acc_gossip_rounds(H0) + 2 * acc_gossip_rounds(H1);
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

enum class BaselineKind { EgdCentralized, EgdDecentralized, EgdGradientTracking };

inline std::string to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::EgdCentralized: return "egd_centralized";
    case BaselineKind::EgdDecentralized: return "egd_decentralized";
    case BaselineKind::EgdGradientTracking: return "egd_gradient_tracking";
  }
  return "egd_centralized";
}

inline BaselineKind baseline_kind_from_string(const std::string& s) {
  if (s == "egd_centralized") return BaselineKind::EgdCentralized;
  if (s == "egd_decentralized") return BaselineKind::EgdDecentralized;
  if (s == "egd_gradient_tracking") return BaselineKind::EgdGradientTracking;
  throw std::invalid_argument("unknown baseline '" + s + "'");
}

/// Communication rounds per iteration: 4 for the centralized method (gather
/// and broadcast per operator evaluation), 2 for the decentralized ones (one
/// mixing per half-step).
inline Index baseline_rounds_per_iteration(BaselineKind k) { return k == BaselineKind::EgdCentralized ? 4 : 2; }

/// egd_centralized: extragradient on the mean operator.
/// egd_decentralized: z^{k+1/2} = proj(W(z^k - s F(z^k))), z^{k+1} = proj(W(z^k - s F(z^{k+1/2}))).
/// egd_gradient_tracking: as above with tracker rows S replacing F, where
/// S^+ = W S + F(z^+) - F(z) after each half-step and S^0 = F(z^0).
template <typename Scalar>
RunResult<Scalar> run_baseline(BaselineKind kind, const NetworkProblem<Scalar>& problem,
                               const GossipMatrix<Scalar>* gossip, Scalar step, const RunOptions<Scalar>& opts) {
  if (!(step > Scalar(0))) throw std::invalid_argument("run_baseline: step must be positive");
  const SplitDims dims = problem.dims();
  const auto& sets = problem.sets();
  const Index M = problem.size();
  const Index per_iter = baseline_rounds_per_iteration(kind);
  detail::Recorder<Scalar> rec(to_string(kind), opts);
  RunningAverage<Scalar> avg;
  RunResult<Scalar> res;
  Index comm = 0;
  Index local = 0;
  Index k = 1;

  if (kind == BaselineKind::EgdCentralized) {
    Vector<Scalar> z = detail::initial_point(problem, opts);
    rec.record(0, comm, local, z, nullptr, true);
    for (; k <= opts.K; ++k) {
      const Vector<Scalar> half = project(sets, dims, z - step * apply_mean_operator(problem, z));
      z = project(sets, dims, z - step * apply_mean_operator(problem, half));
      if (!all_finite(z)) throw DivergenceError(to_string(kind), k);
      comm += per_iter;
      local += 1;
      if (opts.report_averaged) avg.add(half);
      if (rec.record(k, comm, local, opts.report_averaged ? avg.mean() : z, nullptr, false)) break;
    }
    res.z = z;
  } else {
    if (!gossip) throw std::invalid_argument("run_baseline: decentralized baselines need a gossip matrix");
    if (gossip->size() != M) throw std::invalid_argument("run_baseline: gossip matrix size does not match M");
    const Matrix<Scalar>& W = gossip->W;
    const bool tracking = kind == BaselineKind::EgdGradientTracking;
    Matrix<Scalar> Z = detail::initial_point(problem, opts).transpose().replicate(M, 1);
    Matrix<Scalar> Fz = detail::local_operator_rows(problem, Z);
    Matrix<Scalar> S = Fz;
    Vector<Scalar> zbar = Z.colwise().mean().transpose();
    rec.record(0, comm, local, zbar, &Z, true);
    for (; k <= opts.K; ++k) {
      const Matrix<Scalar>& dir = tracking ? S : Fz;
      const Matrix<Scalar> half = detail::project_rows(problem, Matrix<Scalar>(W * (Z - step * dir)));
      const Matrix<Scalar> Fhalf = detail::local_operator_rows(problem, half);
      Matrix<Scalar> S_half;
      if (tracking) S_half = W * S + Fhalf - Fz;
      const Matrix<Scalar>& dir_half = tracking ? S_half : Fhalf;
      Z = detail::project_rows(problem, Matrix<Scalar>(W * (Z - step * dir_half)));
      if (!all_finite(Z)) throw DivergenceError(to_string(kind), k);
      const Matrix<Scalar> Fnext = detail::local_operator_rows(problem, Z);
      if (tracking) S = W * S_half + Fnext - Fhalf;
      Fz = Fnext;
      comm += per_iter;
      local += 1;
      zbar = Z.colwise().mean().transpose();
      if (opts.report_averaged) avg.add(half.colwise().mean().transpose());
      if (rec.record(k, comm, local, opts.report_averaged ? avg.mean() : zbar, &Z, false)) break;
    }
    res.z = zbar;
    res.nodes = Z;
  }

  res.rounds = std::min(k, opts.K);
  res.comm_rounds = comm;
  res.local_iters = local;
  if (opts.report_averaged && avg.count() > 0) res.averaged = avg.mean();
  res.trace = rec.take();
  return res;
}

// ---------------------------------------------------------------------------
// Regularization of convex-concave problems
// ---------------------------------------------------------------------------

/// f(z) + kappa ||x - x0||^2 - kappa ||y - y0||^2.
template <typename Scalar>
class RegularizedProblem final : public LocalProblem<Scalar> {
 public:
  using typename LocalProblem<Scalar>::VectorType;
  using typename LocalProblem<Scalar>::ConstRef;

  RegularizedProblem(std::shared_ptr<const LocalProblem<Scalar>> base, Scalar kappa, Vector<Scalar> z0)
      : base_(std::move(base)), kappa_(kappa), z0_(std::move(z0)) {
    if (z0_.size() != base_->dims().total()) throw std::invalid_argument("RegularizedProblem: anchor dimension mismatch");
  }

  SplitDims dims() const override { return base_->dims(); }

  Scalar value(const ConstRef& z) const override {
    const SplitDims d = dims();
    const VectorType diff = z - z0_;
    return base_->value(z) + kappa_ * diff.head(d.x).squaredNorm() - kappa_ * diff.tail(d.y).squaredNorm();
  }

  VectorType apply(const ConstRef& z) const override { return base_->apply(z) + Scalar(2) * kappa_ * (z - z0_); }

  bool has_constant_hessian() const override { return base_->has_constant_hessian(); }

  std::optional<HessianBlocks<Scalar>> constant_hessian() const override {
    auto h = base_->constant_hessian();
    if (h) shift(*h);
    return h;
  }

  HessianBlocks<Scalar> hessian(const ConstRef& z) const override {
    auto h = base_->hessian(z);
    shift(h);
    return h;
  }

  Scalar kappa() const { return kappa_; }

 private:
  void shift(HessianBlocks<Scalar>& h) const {
    h.xx.diagonal().array() += Scalar(2) * kappa_;
    h.yy.diagonal().array() -= Scalar(2) * kappa_;
  }

  std::shared_ptr<const LocalProblem<Scalar>> base_;
  Scalar kappa_;
  Vector<Scalar> z0_;
};

template <typename Scalar>
struct RegularizedNetwork {
  NetworkProblem<Scalar> problem;
  ProblemConstants<Scalar> constants;
};

/// Adds eps/(4 Omega^2)(||x - x0||^2 - ||y - y0||^2) to every agent. The
/// result is strongly monotone with mu = eps / (2 Omega^2); delta is unchanged
/// and L grows by mu.
template <typename Scalar>
RegularizedNetwork<Scalar> regularize_convex_concave(const NetworkProblem<Scalar>& problem,
                                                     const ProblemConstants<Scalar>& constants, Scalar epsilon,
                                                     std::optional<Vector<Scalar>> z0 = std::nullopt) {
  if (!(epsilon > Scalar(0))) throw std::invalid_argument("regularize_convex_concave: epsilon must be positive");
  if (!problem.sets().is_compact()) {
    throw std::invalid_argument("regularize_convex_concave: needs compact constraint sets");
  }
  const Scalar omega = constants.omega.value_or(problem.sets().diameter());
  const Scalar kappa = epsilon / (Scalar(4) * omega * omega);
  const Vector<Scalar> anchor = z0.value_or(Vector<Scalar>::Zero(problem.dims().total()));
  std::vector<typename NetworkProblem<Scalar>::AgentPtr> agents;
  for (const auto& a : problem.agents()) agents.push_back(std::make_shared<RegularizedProblem<Scalar>>(a, kappa, anchor));
  ProblemConstants<Scalar> c = constants;
  c.mu = Scalar(2) * kappa;
  c.L = constants.L + c.mu;
  c.omega = omega;
  return {NetworkProblem<Scalar>(std::move(agents), problem.sets()), c};
}

}  // namespace saddlesim

#endif  // SADDLESIM_SOLVERS_HPP
