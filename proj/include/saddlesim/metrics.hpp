#ifndef SADDLESIM_METRICS_HPP
#define SADDLESIM_METRICS_HPP

#include "saddlesim/core.hpp"
#include "saddlesim/solvers.hpp"

#include <Eigen/LU>

#include <functional>
#include <map>
#include <mutex>
#include <string>

namespace saddlesim {

template <typename Scalar>
struct ReferenceSolution {
  Vector<Scalar> z_star;
  /// ||F(z*)|| for direct solves, last extragradient step length otherwise.
  Scalar achieved_residual = Scalar(0);
  std::string method;
};

template <typename Scalar>
struct ReferenceOptions {
  /// Lipschitz constant for the extragradient step 1/(2L). Required unless the
  /// problem is affine, in which case it is computed from the Jacobian.
  std::optional<Scalar> L;
  Index max_iters = 2'000'000;
};

/// High-precision z*. Affine problems are solved directly (J z = -F(0)); if
/// the constraint sets cut the unconstrained solution off, or the operator is
/// not affine, centralized extragradient runs until ||z^{k+1} - z^k|| <= tol.
template <typename Scalar>
ReferenceSolution<Scalar> reference_solution(const NetworkProblem<Scalar>& problem, Scalar tol,
                                             ReferenceOptions<Scalar> opts = {}) {
  const SplitDims dims = problem.dims();
  const auto& sets = problem.sets();
  std::optional<Matrix<Scalar>> J;
  if (problem.is_affine()) {
    const Vector<Scalar> origin = Vector<Scalar>::Zero(dims.total());
    J = mean_hessian(problem, origin).operator_jacobian();
    Eigen::PartialPivLU<Matrix<Scalar>> lu(*J);
    Vector<Scalar> z = lu.solve(Vector<Scalar>(-apply_mean_operator(problem, origin)));
    if (all_finite(z) && sets.x.contains(z.head(dims.x)) && sets.y.contains(z.tail(dims.y))) {
      const Scalar residual = apply_mean_operator(problem, z).norm();
      return {std::move(z), residual, "direct"};
    }
  }
  if (!opts.L) {
    if (!J) throw std::invalid_argument("reference_solution: non-affine problems need L");
    opts.L = spectral_norm(*J);
  }
  if (!(*opts.L > Scalar(0))) throw std::invalid_argument("reference_solution: L must be positive");
  auto op = [&](const Vector<Scalar>& z) { return apply_mean_operator(problem, z); };
  const auto eg = extragradient<Scalar>(op, sets, dims, Vector<Scalar>::Zero(dims.total()),
                                        Scalar(1) / (Scalar(2) * *opts.L), {opts.max_iters, tol});
  if (eg.last_step > tol) {
    throw std::runtime_error("reference_solution: no convergence within " + std::to_string(opts.max_iters) +
                             " iterations (last step " + std::to_string(static_cast<double>(eg.last_step)) + ")");
  }
  return {eg.z, eg.last_step, "extragradient"};
}

/// Thread-safe memo of reference solutions keyed by a caller-chosen string
/// (problem fingerprint plus tolerance).
template <typename Scalar>
class ReferenceCache {
 public:
  ReferenceSolution<Scalar> get(const std::string& key, const std::function<ReferenceSolution<Scalar>()>& compute) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    ReferenceSolution<Scalar> sol = compute();
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, std::move(sol)).first->second;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, ReferenceSolution<Scalar>> cache_;
};

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar distance_sq(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance_sq: dimension mismatch");
  return (a - b).squaredNorm();
}

/// sum_m ||z_m - zbar||^2 over the rows of `rows`.
template <typename Derived>
typename Derived::Scalar consensus_error(const Eigen::MatrixBase<Derived>& rows) {
  if (rows.rows() == 0) return 0;
  const auto mean = rows.colwise().mean().eval();
  return (rows.rowwise() - mean).squaredNorm();
}

template <typename Scalar>
Scalar consensus_error(const std::vector<Vector<Scalar>>& points) {
  if (points.empty()) return Scalar(0);
  Matrix<Scalar> rows(static_cast<Index>(points.size()), points.front().size());
  for (std::size_t i = 0; i < points.size(); ++i) rows.row(static_cast<Index>(i)) = points[i].transpose();
  return consensus_error(rows);
}

/// Largest 1-based index with |z_i| > tol, taken over the x and y blocks
/// separately; 0 for a vector with no such entry.
template <typename Scalar>
Index support_size(const VecRef<Scalar>& z, SplitDims dims, Scalar tol = Scalar(1e-14)) {
  if (z.size() != dims.total()) throw std::invalid_argument("support_size: dimension mismatch");
  if (tol < Scalar(0)) throw std::invalid_argument("support_size: tol must be nonnegative");
  auto last = [tol](const auto& block) {
    for (Index i = block.size(); i > 0; --i) {
      if (std::abs(block(i - 1)) > tol) return i;
    }
    return Index(0);
  };
  return std::max(last(z.head(dims.x)), last(z.tail(dims.y)));
}

template <typename Scalar>
struct GapOptions {
  Scalar L = Scalar(1);
  Index iters = 1000;
  /// Convex-concave problems need compact sets for a finite gap.
  bool convex_concave = false;
};

/// 10 L / mu inner iterations, the strongly monotone default.
template <typename Scalar>
Index default_gap_iterations(Scalar L, Scalar mu) {
  return std::max<Index>(1, static_cast<Index>(std::ceil(Scalar(10) * L / mu)));
}

/// max_{y'} f(x, y') - min_{x'} f(x', y), each side by projected gradient
/// with step 1/L started from the current block.
template <typename Scalar>
Scalar saddle_gap(const NetworkProblem<Scalar>& problem, const VecRef<Scalar>& z, GapOptions<Scalar> opts) {
  const SplitDims dims = problem.dims();
  const auto& sets = problem.sets();
  if (z.size() != dims.total()) throw std::invalid_argument("saddle_gap: dimension mismatch");
  if (opts.convex_concave && !sets.is_compact()) throw std::invalid_argument("saddle_gap: cc mode needs compact sets");
  if (!(opts.L > Scalar(0))) throw std::invalid_argument("saddle_gap: L must be positive");
  const Scalar step = Scalar(1) / opts.L;

  Vector<Scalar> w = z;  // (x, y') for the max
  for (Index k = 0; k < opts.iters; ++k) {
    const Vector<Scalar> F = apply_mean_operator(problem, w);
    w.tail(dims.y) = project(sets.y, Vector<Scalar>(w.tail(dims.y) - step * F.tail(dims.y)));
  }
  const Scalar fmax = mean_value(problem, w);

  Vector<Scalar> u = z;  // (x', y) for the min
  for (Index k = 0; k < opts.iters; ++k) {
    const Vector<Scalar> F = apply_mean_operator(problem, u);
    u.head(dims.x) = project(sets.x, Vector<Scalar>(u.head(dims.x) - step * F.head(dims.x)));
  }
  const Scalar fmin = mean_value(problem, u);
  return fmax - fmin;
}

}  // namespace saddlesim

#endif  // SADDLESIM_METRICS_HPP
