#ifndef SADDLESIM_CORE_HPP
#define SADDLESIM_CORE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace saddlesim {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

/// Read-only vector argument; Scalar is deduced from the other parameters so
/// that expressions and blocks bind without a temporary copy.
template <typename Scalar>
using VecRef = Eigen::Ref<const Vector<std::type_identity_t<Scalar>>>;

/// Block sizes of a primal-dual point z = (x, y), stored stacked as [x; y].
struct SplitDims {
  Index x = 0;
  Index y = 0;

  Index total() const { return x + y; }
  friend bool operator==(const SplitDims&, const SplitDims&) = default;
};

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& v) {
  return v.derived().array().isFinite().all();
}

/// Primal-dual pair z = (x, y). Stored stacked so the solvers can use plain
/// vector expressions; x() and y() are views into the stacked storage.
template <typename Scalar>
class SplitPoint {
 public:
  SplitPoint() = default;

  SplitPoint(const Vector<Scalar>& x, const Vector<Scalar>& y)
      : z_(x.size() + y.size()), dx_(x.size()) {
    z_ << x, y;
    check_finite();
  }

  static SplitPoint from_stacked(Vector<Scalar> z, SplitDims dims) {
    if (z.size() != dims.total()) {
      throw std::invalid_argument("SplitPoint: stacked size " + std::to_string(z.size()) +
                                  " does not match dims " + std::to_string(dims.total()));
    }
    SplitPoint p;
    p.z_ = std::move(z);
    p.dx_ = dims.x;
    p.check_finite();
    return p;
  }

  static SplitPoint zeros(SplitDims dims) {
    return from_stacked(Vector<Scalar>::Zero(dims.total()), dims);
  }

  SplitDims dims() const { return {dx_, z_.size() - dx_}; }
  auto x() const { return z_.head(dx_); }
  auto y() const { return z_.tail(z_.size() - dx_); }
  const Vector<Scalar>& stacked() const { return z_; }

 private:
  void check_finite() const {
    if (!all_finite(z_)) throw std::invalid_argument("SplitPoint: non-finite entry");
  }

  Vector<Scalar> z_;
  Index dx_ = 0;
};

/// Feasible set for one block: the whole space or a Euclidean ball.
template <typename Scalar>
class ConstraintSet {
 public:
  enum class Kind { WholeSpace, Ball };

  ConstraintSet() = default;

  static ConstraintSet whole_space() { return ConstraintSet(); }

  static ConstraintSet ball(Vector<Scalar> center, Scalar radius) {
    if (!(radius > Scalar(0))) throw std::invalid_argument("ConstraintSet: ball radius must be positive");
    ConstraintSet s;
    s.kind_ = Kind::Ball;
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
  }

  static ConstraintSet ball(Index dim, Scalar radius) {
    return ball(Vector<Scalar>::Zero(dim), radius);
  }

  Kind kind() const { return kind_; }
  bool is_compact() const { return kind_ == Kind::Ball; }
  const Vector<Scalar>& center() const { return center_; }
  Scalar radius() const { return radius_; }

  Scalar diameter() const {
    if (kind_ == Kind::WholeSpace) throw std::logic_error("ConstraintSet: whole space has no finite diameter");
    return Scalar(2) * radius_;
  }

  bool contains(const VecRef<Scalar>& v, Scalar slack = Scalar(0)) const {
    if (kind_ == Kind::WholeSpace) return true;
    return (v - center_).norm() <= radius_ + slack;
  }

 private:
  Kind kind_ = Kind::WholeSpace;
  Vector<Scalar> center_;
  Scalar radius_ = Scalar(0);
};

/// Euclidean projection onto a single-block set.
template <typename Scalar>
Vector<Scalar> project(const ConstraintSet<Scalar>& set, const VecRef<Scalar>& v) {
  if (set.kind() == ConstraintSet<Scalar>::Kind::WholeSpace) return v;
  if (set.center().size() != v.size()) throw std::invalid_argument("project: dimension mismatch with ball center");
  const Vector<Scalar> offset = v - set.center();
  const Scalar norm = offset.norm();
  if (norm <= set.radius()) return v;
  return set.center() + (set.radius() / norm) * offset;
}

/// Z = X x Y. Blocks are projected independently.
template <typename Scalar>
struct SplitConstraints {
  ConstraintSet<Scalar> x;
  ConstraintSet<Scalar> y;

  static SplitConstraints whole_space() { return {}; }

  bool is_compact() const { return x.is_compact() && y.is_compact(); }

  /// Diameter of the product set; throws for non-compact sets.
  Scalar diameter() const {
    const Scalar dx = x.diameter();
    const Scalar dy = y.diameter();
    return std::sqrt(dx * dx + dy * dy);
  }
};

template <typename Scalar>
Vector<Scalar> project(const SplitConstraints<Scalar>& sets, SplitDims dims,
                       const VecRef<Scalar>& z) {
  if (z.size() != dims.total()) throw std::invalid_argument("project: dimension mismatch");
  Vector<Scalar> out(z.size());
  out.head(dims.x) = project(sets.x, z.head(dims.x));
  out.tail(dims.y) = project(sets.y, z.tail(dims.y));
  return out;
}

template <typename Scalar>
SplitPoint<Scalar> project(const SplitConstraints<Scalar>& sets, const SplitPoint<Scalar>& z) {
  return SplitPoint<Scalar>::from_stacked(project(sets, z.dims(), z.stacked()), z.dims());
}

/// L, mu, delta, and the convex-concave extras G and Omega.
template <typename Scalar>
struct ProblemConstants {
  Scalar L = Scalar(0);
  Scalar mu = Scalar(0);
  Scalar delta = Scalar(0);
  std::optional<Scalar> G;
  std::optional<Scalar> omega;

  void validate() const {
    if (!(L >= delta && delta >= Scalar(0))) throw std::invalid_argument("ProblemConstants: need L >= delta >= 0");
    if (!(L >= mu && mu >= Scalar(0))) throw std::invalid_argument("ProblemConstants: need L >= mu >= 0");
    if (G && !(*G >= Scalar(0))) throw std::invalid_argument("ProblemConstants: G must be nonnegative");
    if (omega && !(*omega > Scalar(0))) throw std::invalid_argument("ProblemConstants: omega must be positive");
  }
};

/// Second derivatives of f at a point: d2f/dxdx, d2f/dxdy (rows x, cols y), d2f/dydy.
template <typename Scalar>
struct HessianBlocks {
  Matrix<Scalar> xx;
  Matrix<Scalar> xy;
  Matrix<Scalar> yy;

  /// Jacobian of the operator F = (grad_x f, -grad_y f).
  Matrix<Scalar> operator_jacobian() const {
    const Index dx = xx.rows();
    const Index dy = yy.rows();
    Matrix<Scalar> J(dx + dy, dx + dy);
    J.topLeftCorner(dx, dx) = xx;
    J.topRightCorner(dx, dy) = xy;
    J.bottomLeftCorner(dy, dx) = -xy.transpose();
    J.bottomRightCorner(dy, dy) = -yy;
    return J;
  }
};

/// One agent's loss f_m. The operator is F_m(z) = (grad_x f_m, -grad_y f_m).
/// Implementations are immutable; all methods are safe to call concurrently.
template <typename Scalar>
class LocalProblem {
 public:
  using VectorType = Vector<Scalar>;
  using ConstRef = Eigen::Ref<const VectorType>;

  virtual ~LocalProblem() = default;

  virtual SplitDims dims() const = 0;
  virtual Scalar value(const ConstRef& z) const = 0;
  virtual VectorType apply(const ConstRef& z) const = 0;

  /// Hessian blocks for problems whose second derivatives do not depend on z.
  virtual bool has_constant_hessian() const { return false; }
  virtual std::optional<HessianBlocks<Scalar>> constant_hessian() const { return std::nullopt; }

  /// Hessian blocks at z. The default uses central differences of the operator.
  virtual HessianBlocks<Scalar> hessian(const ConstRef& z) const {
    if (auto h = constant_hessian()) return *h;
    const SplitDims d = dims();
    const Index n = d.total();
    Matrix<Scalar> J(n, n);
    VectorType probe = z;
    for (Index j = 0; j < n; ++j) {
      const Scalar h = std::cbrt(Eigen::NumTraits<Scalar>::epsilon()) * std::max(Scalar(1), std::abs(z(j)));
      probe(j) = z(j) + h;
      const VectorType fp = apply(probe);
      probe(j) = z(j) - h;
      const VectorType fm = apply(probe);
      probe(j) = z(j);
      J.col(j) = (fp - fm) / (Scalar(2) * h);
    }
    HessianBlocks<Scalar> out;
    out.xx = J.topLeftCorner(d.x, d.x);
    out.xy = J.topRightCorner(d.x, d.y);
    out.yy = -J.bottomRightCorner(d.y, d.y);
    // Symmetrize: the difference quotient only approximates the exact symmetry.
    out.xx = (out.xx + out.xx.transpose()).eval() / Scalar(2);
    out.yy = (out.yy + out.yy.transpose()).eval() / Scalar(2);
    return out;
  }
};

/// f = (1/M) sum_m f_m over a fixed set of agents sharing dimensions and constraints.
template <typename Scalar>
class NetworkProblem {
 public:
  using AgentPtr = std::shared_ptr<const LocalProblem<Scalar>>;

  NetworkProblem(std::vector<AgentPtr> agents, SplitConstraints<Scalar> sets)
      : agents_(std::move(agents)), sets_(std::move(sets)) {
    if (agents_.empty()) throw std::invalid_argument("NetworkProblem: need at least one agent");
    for (const auto& a : agents_) {
      if (!a) throw std::invalid_argument("NetworkProblem: null agent");
    }
    dims_ = agents_.front()->dims();
    for (const auto& a : agents_) {
      if (!(a->dims() == dims_)) throw std::invalid_argument("NetworkProblem: agents disagree on dimensions");
    }
    check_set(sets_.x, dims_.x);
    check_set(sets_.y, dims_.y);
  }

  Index size() const { return static_cast<Index>(agents_.size()); }
  SplitDims dims() const { return dims_; }
  const SplitConstraints<Scalar>& sets() const { return sets_; }
  const LocalProblem<Scalar>& agent(Index m) const { return *agents_.at(static_cast<std::size_t>(m)); }
  const std::vector<AgentPtr>& agents() const { return agents_; }

  /// True when every agent exposes constant Hessian blocks (affine operators).
  bool is_affine() const {
    for (const auto& a : agents_) {
      if (!a->has_constant_hessian()) return false;
    }
    return true;
  }

 private:
  static void check_set(const ConstraintSet<Scalar>& s, Index dim) {
    if (s.is_compact() && s.center().size() != dim) {
      throw std::invalid_argument("NetworkProblem: constraint set dimension mismatch");
    }
  }

  std::vector<AgentPtr> agents_;
  SplitConstraints<Scalar> sets_;
  SplitDims dims_;
};

template <typename Scalar>
Vector<Scalar> apply_local_operator(const NetworkProblem<Scalar>& problem, Index m,
                                    const VecRef<Scalar>& z) {
  if (m < 0 || m >= problem.size()) throw std::out_of_range("apply_local_operator: agent index out of range");
  if (z.size() != problem.dims().total()) throw std::invalid_argument("apply_local_operator: dimension mismatch");
  return problem.agent(m).apply(z);
}

template <typename Scalar>
Vector<Scalar> apply_mean_operator(const NetworkProblem<Scalar>& problem,
                                   const VecRef<Scalar>& z) {
  if (z.size() != problem.dims().total()) throw std::invalid_argument("apply_mean_operator: dimension mismatch");
  Vector<Scalar> sum = Vector<Scalar>::Zero(z.size());
  for (const auto& a : problem.agents()) sum += a->apply(z);
  return sum / Scalar(problem.size());
}

template <typename Scalar>
Scalar mean_value(const NetworkProblem<Scalar>& problem, const VecRef<Scalar>& z) {
  Scalar sum(0);
  for (const auto& a : problem.agents()) sum += a->value(z);
  return sum / Scalar(problem.size());
}

template <typename Scalar>
HessianBlocks<Scalar> mean_hessian(const NetworkProblem<Scalar>& problem,
                                   const VecRef<Scalar>& z) {
  HessianBlocks<Scalar> acc = problem.agent(0).hessian(z);
  for (Index m = 1; m < problem.size(); ++m) {
    const auto h = problem.agent(m).hessian(z);
    acc.xx += h.xx;
    acc.xy += h.xy;
    acc.yy += h.yy;
  }
  const Scalar inv = Scalar(1) / Scalar(problem.size());
  acc.xx *= inv;
  acc.xy *= inv;
  acc.yy *= inv;
  return acc;
}

/// Largest singular value.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a.derived());
  return svd.singularValues()(0);
}

}  // namespace saddlesim

#endif  // SADDLESIM_CORE_HPP
