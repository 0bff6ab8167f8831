#ifndef SADDLESIM_PROBLEMS_HPP
#define SADDLESIM_PROBLEMS_HPP

#include "saddlesim/core.hpp"
#include "saddlesim/network.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <random>
#include <span>

namespace saddlesim {

// ---------------------------------------------------------------------------
// Bilinear-quadratic saddle functions
// ---------------------------------------------------------------------------

/// f(x, y) = 1/2 x'Ax + x'By - 1/2 y'Cy + a'x + b'y with constant A, B, C.
/// The coupling matrices are stored sparse; the hard instance uses bidiagonal B.
template <typename Scalar>
class QuadraticSaddle final : public LocalProblem<Scalar> {
 public:
  using typename LocalProblem<Scalar>::VectorType;
  using typename LocalProblem<Scalar>::ConstRef;

  QuadraticSaddle(SparseMatrix<Scalar> A, SparseMatrix<Scalar> B, SparseMatrix<Scalar> C, Vector<Scalar> a,
                  Vector<Scalar> b)
      : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), a_(std::move(a)), b_(std::move(b)) {
    const Index dx = A_.rows();
    const Index dy = C_.rows();
    if (A_.cols() != dx || C_.cols() != dy || B_.rows() != dx || B_.cols() != dy || a_.size() != dx ||
        b_.size() != dy) {
      throw std::invalid_argument("QuadraticSaddle: shape mismatch");
    }
    A_.makeCompressed();
    B_.makeCompressed();
    C_.makeCompressed();
  }

  QuadraticSaddle(const Matrix<Scalar>& A, const Matrix<Scalar>& B, const Matrix<Scalar>& C,
                  Vector<Scalar> a, Vector<Scalar> b)
      : QuadraticSaddle(SparseMatrix<Scalar>(A.sparseView()), SparseMatrix<Scalar>(B.sparseView()),
                        SparseMatrix<Scalar>(C.sparseView()), std::move(a), std::move(b)) {}

  SplitDims dims() const override { return {A_.rows(), C_.rows()}; }

  Scalar value(const ConstRef& z) const override {
    const Index dx = A_.rows();
    const auto x = z.head(dx);
    const auto y = z.tail(C_.rows());
    return Scalar(0.5) * x.dot(A_ * x) + x.dot(B_ * y) - Scalar(0.5) * y.dot(C_ * y) + a_.dot(x) + b_.dot(y);
  }

  VectorType apply(const ConstRef& z) const override {
    const Index dx = A_.rows();
    const Index dy = C_.rows();
    const auto x = z.head(dx);
    const auto y = z.tail(dy);
    VectorType out(dx + dy);
    out.head(dx) = A_ * x + B_ * y + a_;
    out.tail(dy) = C_ * y - B_.transpose() * x - b_;
    return out;
  }

  bool has_constant_hessian() const override { return true; }

  std::optional<HessianBlocks<Scalar>> constant_hessian() const override {
    return HessianBlocks<Scalar>{Matrix<Scalar>(A_), Matrix<Scalar>(B_), Matrix<Scalar>(-C_)};
  }

  const SparseMatrix<Scalar>& A() const { return A_; }
  const SparseMatrix<Scalar>& B() const { return B_; }
  const SparseMatrix<Scalar>& C() const { return C_; }
  const Vector<Scalar>& a() const { return a_; }
  const Vector<Scalar>& b() const { return b_; }

 private:
  SparseMatrix<Scalar> A_, B_, C_;
  Vector<Scalar> a_, b_;
};

/// f(x, y) = x' B y.
template <typename Scalar>
std::shared_ptr<QuadraticSaddle<Scalar>> make_bilinear(const Matrix<Scalar>& B) {
  return std::make_shared<QuadraticSaddle<Scalar>>(Matrix<Scalar>::Zero(B.rows(), B.rows()), B,
                                                   Matrix<Scalar>::Zero(B.cols(), B.cols()),
                                                   Vector<Scalar>::Zero(B.rows()), Vector<Scalar>::Zero(B.cols()));
}

/// Random strongly-monotone quadratic network: agent m has
///   A_m = (mu + spread) I + P_m,  C_m = (mu + spread) I + R_m,  B_m = B_0 + Q_m,
/// with symmetric P_m, R_m of spectral norm <= spread and ||Q_m|| <= spread, and
/// random linear terms. Every A_m, C_m is >= mu I, so f is mu-strongly monotone.
template <typename Scalar>
NetworkProblem<Scalar> random_quadratic_network(Index M, Index d, Scalar mu, Scalar spread, std::uint64_t seed,
                                                Scalar coupling = Scalar(1)) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> normal(0, 1);
  auto gaussian = [&](Index r, Index c) {
    Matrix<Scalar> G(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) G(i, j) = normal(rng);
    return G;
  };
  auto scaled_to = [](Matrix<Scalar> S, Scalar norm) {
    const Scalar s = spectral_norm(S);
    return s > Scalar(0) ? Matrix<Scalar>(S * (norm / s)) : S;
  };
  const Matrix<Scalar> B0 = scaled_to(gaussian(d, d), coupling);
  const Matrix<Scalar> I = Matrix<Scalar>::Identity(d, d);
  std::vector<typename NetworkProblem<Scalar>::AgentPtr> agents;
  for (Index m = 0; m < M; ++m) {
    const Matrix<Scalar> P = gaussian(d, d);
    const Matrix<Scalar> R = gaussian(d, d);
    const Matrix<Scalar> Q = gaussian(d, d);
    const Matrix<Scalar> A = (mu + spread) * I + scaled_to((P + P.transpose()) / Scalar(2), spread);
    const Matrix<Scalar> C = (mu + spread) * I + scaled_to((R + R.transpose()) / Scalar(2), spread);
    const Matrix<Scalar> B = B0 + scaled_to(Q, spread);
    const Vector<Scalar> a = gaussian(d, 1);
    const Vector<Scalar> b = gaussian(d, 1);
    agents.push_back(std::make_shared<QuadraticSaddle<Scalar>>(A, B, C, a, b));
  }
  return NetworkProblem<Scalar>(std::move(agents), SplitConstraints<Scalar>::whole_space());
}

/// Exact L, mu, delta for networks whose agents all have constant Hessians:
/// L = max_m ||J_m||, mu = lambda_min of the symmetric part of the mean
/// Jacobian, delta = max block-wise spectral distance to the mean Hessian.
template <typename Scalar>
ProblemConstants<Scalar> exact_affine_constants(const NetworkProblem<Scalar>& problem);

// ---------------------------------------------------------------------------
// Robust linear regression
// ---------------------------------------------------------------------------

/// g(w, r) = 1/(2N) ||X w + 1 r'w - y||^2 + lambda/2 ||w||^2 - beta/2 ||r||^2,
/// minimized over ||w|| <= R_w and maximized over ||r|| <= R_r. x = w, y = r.
template <typename Scalar>
class RobustRegression final : public LocalProblem<Scalar> {
 public:
  using typename LocalProblem<Scalar>::VectorType;
  using typename LocalProblem<Scalar>::ConstRef;

  RobustRegression(Matrix<Scalar> X, Vector<Scalar> y, Scalar lambda, Scalar beta, Scalar R_w, Scalar R_r)
      : X_(std::move(X)), y_(std::move(y)), lambda_(lambda), beta_(beta), R_w_(R_w), R_r_(R_r) {
    if (X_.rows() < 1 || X_.cols() < 1) throw std::invalid_argument("RobustRegression: need N >= 1 and d >= 1");
    if (y_.size() != X_.rows()) throw std::invalid_argument("RobustRegression: labels do not match data rows");
    if (!(lambda_ > 0 && beta_ > 0 && R_w_ > 0 && R_r_ > 0)) {
      throw std::invalid_argument("RobustRegression: lambda, beta, R_w, R_r must be positive");
    }
    const Scalar inv_n = Scalar(1) / Scalar(X_.rows());
    col_mean_ = X_.colwise().sum().transpose() * inv_n;  // (1/N) X'1
    gram_ = (X_.transpose() * X_) * inv_n;                // (1/N) X'X
  }

  SplitDims dims() const override { return {X_.cols(), X_.cols()}; }

  Scalar value(const ConstRef& z) const override {
    const Index d = X_.cols();
    const auto w = z.head(d);
    const auto r = z.tail(d);
    const VectorType e = residual(w, r);
    return e.squaredNorm() / (Scalar(2) * Scalar(N())) + lambda_ / 2 * w.squaredNorm() - beta_ / 2 * r.squaredNorm();
  }

  /// (grad_w g, -grad_r g) with
  ///   grad_w g = (1/N)(X'X w + X'1 r'w - X'y + 1'(Xw - y) r) + r r'w + lambda w
  ///   grad_r g = w w'r + (1/N) 1'(Xw - y) w - beta r.
  VectorType apply(const ConstRef& z) const override {
    const Index d = X_.cols();
    const auto w = z.head(d);
    const auto r = z.tail(d);
    const VectorType e = residual(w, r);  // Xw + (r'w) 1 - y
    const Scalar inv_n = Scalar(1) / Scalar(N());
    const Scalar esum = e.sum() * inv_n;  // (1/N) 1'(Xw - y) + r'w
    VectorType out(2 * d);
    out.head(d) = X_.transpose() * e * inv_n + esum * r + lambda_ * w;
    out.tail(d) = beta_ * r - esum * w;
    return out;
  }

  HessianBlocks<Scalar> hessian(const ConstRef& z) const override {
    const Index d = X_.cols();
    const VectorType w = z.head(d);
    const VectorType r = z.tail(d);
    const Matrix<Scalar> I = Matrix<Scalar>::Identity(d, d);
    const Scalar mean_resid = ((X_ * w).sum() - y_.sum()) / Scalar(N());  // (1/N) 1'(Xw - y)
    HessianBlocks<Scalar> h;
    h.xx = gram_ + col_mean_ * r.transpose() + r * col_mean_.transpose() + r * r.transpose() + lambda_ * I;
    h.xy = col_mean_ * w.transpose() + mean_resid * I + r.dot(w) * I + r * w.transpose();
    h.yy = w * w.transpose() - beta_ * I;
    return h;
  }

  SplitConstraints<Scalar> constraints() const {
    return {ConstraintSet<Scalar>::ball(X_.cols(), R_w_), ConstraintSet<Scalar>::ball(X_.cols(), R_r_)};
  }

  Index N() const { return X_.rows(); }
  Index d() const { return X_.cols(); }
  const Matrix<Scalar>& X() const { return X_; }
  const Vector<Scalar>& y() const { return y_; }
  Scalar lambda() const { return lambda_; }
  Scalar beta() const { return beta_; }
  Scalar R_w() const { return R_w_; }
  Scalar R_r() const { return R_r_; }
  /// (1/N) X'1
  const Vector<Scalar>& column_mean() const { return col_mean_; }
  /// (1/N) X'X
  const Matrix<Scalar>& gram() const { return gram_; }

 private:
  template <typename W, typename R>
  VectorType residual(const W& w, const R& r) const {
    VectorType e = X_ * w - y_;
    e.array() += r.dot(w);
    return e;
  }

  Matrix<Scalar> X_;
  Vector<Scalar> y_;
  Scalar lambda_, beta_, R_w_, R_r_;
  Vector<Scalar> col_mean_;
  Matrix<Scalar> gram_;
};

template <typename Scalar>
std::shared_ptr<RobustRegression<Scalar>> build_robust_regression(Matrix<Scalar> X, Vector<Scalar> y, Scalar lambda,
                                                                   Scalar beta, Scalar R_w, Scalar R_r) {
  return std::make_shared<RobustRegression<Scalar>>(std::move(X), std::move(y), lambda, beta, R_w, R_r);
}

/// Smoothness bounds of one regression agent over the constraint balls.
template <typename Scalar>
struct RegressionConstants {
  Scalar L_ww = 0;
  Scalar L_wr = 0;
  Scalar L_rr = 0;
  Scalar L = 0;
  Scalar mu_paper = 0;  ///< max(lambda, beta)
  Scalar mu_safe = 0;   ///< min(lambda, beta)
};

enum class MuConvention { Safe, Paper };

template <typename Scalar>
RegressionConstants<Scalar> estimate_regression_constants(const RobustRegression<Scalar>& p) {
  RegressionConstants<Scalar> c;
  const Scalar inv_n = Scalar(1) / Scalar(p.N());
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(p.gram(), Eigen::EigenvaluesOnly);
  const Scalar lmax_gram = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  const Scalar xt1 = p.column_mean().norm();  // ||X'1|| / N
  c.L_ww = lmax_gram + p.R_r() * p.R_r() + Scalar(2) * p.R_r() * xt1 + p.lambda();
  c.L_wr = Scalar(2) * xt1 * p.R_w() + p.y().sum() * inv_n + Scalar(2) * p.R_w() * p.R_r();
  c.L_rr = p.R_w() * p.R_w() + p.beta();
  c.L = std::max({c.L_ww, c.L_wr, c.L_rr});
  c.mu_paper = std::max(p.lambda(), p.beta());
  c.mu_safe = std::min(p.lambda(), p.beta());
  return c;
}

/// Upper bound on the Hessian distance between two regression losses over
/// the constraint balls: max(delta_ww, delta_wr); delta_rr is identically 0.
template <typename Scalar>
Scalar estimate_similarity(const RobustRegression<Scalar>& a, const RobustRegression<Scalar>& b) {
  if (a.d() != b.d()) throw std::invalid_argument("estimate_similarity: dimension mismatch");
  if (a.R_w() != b.R_w() || a.R_r() != b.R_r()) throw std::invalid_argument("estimate_similarity: radii differ");
  const Matrix<Scalar> gram_diff = a.gram() - b.gram();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(gram_diff, Eigen::EigenvaluesOnly);
  const Scalar gram_norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  const Scalar mean_diff = (a.column_mean() - b.column_mean()).norm();
  const Scalar delta_ww = gram_norm + Scalar(2) * mean_diff * a.R_r();
  const Scalar delta_wr = Scalar(2) * mean_diff * a.R_w();
  return std::max(delta_ww, delta_wr);
}

/// Concatenation of several regression datasets (same d, lambda, beta, radii).
/// With equal shard sizes its loss is exactly the mean of the shard losses.
template <typename Scalar>
RobustRegression<Scalar> pooled_regression(std::span<const std::shared_ptr<RobustRegression<Scalar>>> parts) {
  if (parts.empty()) throw std::invalid_argument("pooled_regression: no datasets");
  Index rows = 0;
  for (const auto& p : parts) rows += p->N();
  const auto& first = *parts.front();
  Matrix<Scalar> X(rows, first.d());
  Vector<Scalar> y(rows);
  Index at = 0;
  for (const auto& p : parts) {
    if (p->d() != first.d()) throw std::invalid_argument("pooled_regression: dimension mismatch");
    X.middleRows(at, p->N()) = p->X();
    y.segment(at, p->N()) = p->y();
    at += p->N();
  }
  return RobustRegression<Scalar>(std::move(X), std::move(y), first.lambda(), first.beta(), first.R_w(), first.R_r());
}

// ---------------------------------------------------------------------------
// Node-vs-mean similarity
// ---------------------------------------------------------------------------

struct SimilarityOptions {
  Index samples = 16;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> sample_feasible(const ConstraintSet<Scalar>& set, Index dim, std::mt19937_64& rng) {
  std::normal_distribution<Scalar> normal(0, 1);
  Vector<Scalar> v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
  if (!set.is_compact()) return v;
  std::uniform_real_distribution<Scalar> unif(0, 1);
  const Scalar radius = set.radius() * std::pow(unif(rng), Scalar(1) / Scalar(dim));
  const Scalar n = v.norm();
  return set.center() + (n > 0 ? Vector<Scalar>(v * (radius / n)) : Vector<Scalar>::Zero(dim));
}

template <typename Scalar>
Scalar block_distance(const HessianBlocks<Scalar>& h, const HessianBlocks<Scalar>& mean) {
  return std::max({spectral_norm(h.xx - mean.xx), spectral_norm(h.xy - mean.xy), spectral_norm(h.yy - mean.yy)});
}

}  // namespace detail

/// max over agents (and sampled points) of the three spectral-norm Hessian
/// block differences against the mean Hessian. Exact for constant Hessians.
template <typename Scalar>
Scalar node_vs_mean_similarity(const NetworkProblem<Scalar>& problem, SimilarityOptions opts = {}) {
  const SplitDims dims = problem.dims();
  auto at_point = [&](const Vector<Scalar>& z) {
    const auto mean = mean_hessian(problem, z);
    Scalar worst(0);
    for (Index m = 0; m < problem.size(); ++m) {
      worst = std::max(worst, detail::block_distance(problem.agent(m).hessian(z), mean));
    }
    return worst;
  };
  if (problem.is_affine()) return at_point(Vector<Scalar>::Zero(dims.total()));
  std::mt19937_64 rng(opts.seed);
  Scalar worst(0);
  for (Index s = 0; s < opts.samples; ++s) {
    Vector<Scalar> z(dims.total());
    z.head(dims.x) = detail::sample_feasible(problem.sets().x, dims.x, rng);
    z.tail(dims.y) = detail::sample_feasible(problem.sets().y, dims.y, rng);
    worst = std::max(worst, at_point(z));
  }
  return worst;
}

template <typename Scalar>
ProblemConstants<Scalar> exact_affine_constants(const NetworkProblem<Scalar>& problem) {
  if (!problem.is_affine()) throw std::invalid_argument("exact_affine_constants: agents must have constant Hessians");
  ProblemConstants<Scalar> c;
  const Vector<Scalar> origin = Vector<Scalar>::Zero(problem.dims().total());
  for (Index m = 0; m < problem.size(); ++m) {
    c.L = std::max(c.L, spectral_norm(problem.agent(m).constant_hessian()->operator_jacobian()));
  }
  const Matrix<Scalar> J = mean_hessian(problem, origin).operator_jacobian();
  const Matrix<Scalar> sym = (J + J.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(sym, Eigen::EigenvaluesOnly);
  c.mu = std::max(Scalar(0), eig.eigenvalues()(0));
  c.delta = node_vs_mean_similarity(problem);
  return c;
}

// ---------------------------------------------------------------------------
// Lower-bound hard instance
// ---------------------------------------------------------------------------

enum class HardRole { F1, F2, F3 };

/// Bilinear hard instance on a line graph of M nodes. The first p = ceil(M/32)
/// nodes (group B) hold f2, the last p (group B-bar) hold f1, the rest f3:
///   f1 = (delta/4) x'A1 y + s||x||^2 - s||y||^2 + c e1'y
///   f2 = (delta/4) x'A2 y + s||x||^2 - s||y||^2
///   f3 = s||x||^2 - s||y||^2
/// with s = 16 p mu / M and c = delta^2 / (128 mu).
template <typename Scalar>
struct HardInstance {
  Index M = 0;
  Scalar mu = 0;
  Scalar delta = 0;
  Index d = 0;
  Index p = 0;
  Index l = 0;  ///< hop distance between B and B-bar on the line
  std::vector<HardRole> roles;
  SparseMatrix<Scalar> A1;
  SparseMatrix<Scalar> A2;
  Scalar linear_coeff = 0;  ///< delta^2 / (128 mu)
  Topology line;
  NetworkProblem<Scalar> problem;

  /// A = (A1 + A2) / 2: unit diagonal, -1 superdiagonal.
  SparseMatrix<Scalar> A() const { return SparseMatrix<Scalar>((A1 + A2) * Scalar(0.5)); }
};

/// Upper-bidiagonal pattern with unit diagonal and -2 on the superdiagonal of
/// rows whose 1-based index has the given parity (A1: even rows, A2: odd rows).
template <typename Scalar>
SparseMatrix<Scalar> hard_instance_pattern(Index d, bool minus_two_on_even_rows) {
  std::vector<Eigen::Triplet<Scalar>> t;
  for (Index i = 0; i < d; ++i) {
    t.emplace_back(i, i, Scalar(1));
    const bool even_row = ((i + 1) % 2) == 0;
    if (i + 1 < d && even_row == minus_two_on_even_rows) t.emplace_back(i, i + 1, Scalar(-2));
  }
  SparseMatrix<Scalar> A(d, d);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

template <typename Scalar>
HardInstance<Scalar> build_hard_instance(Index M, Scalar mu, Scalar delta, Index d) {
  if (M < 3) throw std::invalid_argument("build_hard_instance: M must be >= 3");
  if (!(mu > 0 && delta > 0)) throw std::invalid_argument("build_hard_instance: mu and delta must be positive");
  if (d < 2) throw std::invalid_argument("build_hard_instance: d must be >= 2");
  const Index p = (M + 31) / 32;
  const Scalar s = Scalar(16) * Scalar(p) * mu / Scalar(M);
  const Scalar c = delta * delta / (Scalar(128) * mu);

  SparseMatrix<Scalar> A1 = hard_instance_pattern<Scalar>(d, true);
  SparseMatrix<Scalar> A2 = hard_instance_pattern<Scalar>(d, false);
  SparseMatrix<Scalar> I(d, d);
  I.setIdentity();
  const SparseMatrix<Scalar> quad = I * (Scalar(2) * s);
  const SparseMatrix<Scalar> zero(d, d);
  Vector<Scalar> e1 = Vector<Scalar>::Zero(d);
  e1(0) = c;

  auto f1 = std::make_shared<QuadraticSaddle<Scalar>>(quad, SparseMatrix<Scalar>(A1 * (delta / 4)), quad,
                                                      Vector<Scalar>::Zero(d), e1);
  auto f2 = std::make_shared<QuadraticSaddle<Scalar>>(quad, SparseMatrix<Scalar>(A2 * (delta / 4)), quad,
                                                      Vector<Scalar>::Zero(d), Vector<Scalar>::Zero(d));
  auto f3 = std::make_shared<QuadraticSaddle<Scalar>>(quad, zero, quad, Vector<Scalar>::Zero(d),
                                                      Vector<Scalar>::Zero(d));

  std::vector<HardRole> roles(static_cast<std::size_t>(M), HardRole::F3);
  std::vector<typename NetworkProblem<Scalar>::AgentPtr> agents;
  for (Index m = 0; m < M; ++m) {
    if (m < p) {
      roles[static_cast<std::size_t>(m)] = HardRole::F2;
      agents.push_back(f2);
    } else if (m >= M - p) {
      roles[static_cast<std::size_t>(m)] = HardRole::F1;
      agents.push_back(f1);
    } else {
      agents.push_back(f3);
    }
  }

  Topology line = build_topology(TopologyKind::Line, M);
  Index l = std::numeric_limits<Index>::max();
  for (Index i = 0; i < p; ++i) {
    const auto dist = line.distances_from(i);
    for (Index j = M - p; j < M; ++j) l = std::min(l, dist[static_cast<std::size_t>(j)]);
  }

  return HardInstance<Scalar>{M,
                              mu,
                              delta,
                              d,
                              p,
                              l,
                              std::move(roles),
                              std::move(A1),
                              std::move(A2),
                              c,
                              std::move(line),
                              NetworkProblem<Scalar>(std::move(agents), SplitConstraints<Scalar>::whole_space())};
}

/// alpha = (64 mu / delta)^2 and q, the smaller root of q^2 - (2 + alpha) q + 1 = 0.
template <typename Scalar>
struct LowerBoundRates {
  Scalar alpha = 0;
  Scalar q = 0;
};

template <typename Scalar>
LowerBoundRates<Scalar> lower_bound_rates_from_alpha(Scalar alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("lower_bound_rates: alpha must be positive");
  // 2 / (2 + alpha + sqrt(alpha^2 + 4 alpha)) is the same root without cancellation.
  const Scalar q = Scalar(2) / (Scalar(2) + alpha + std::sqrt(alpha * alpha + Scalar(4) * alpha));
  return {alpha, q};
}

template <typename Scalar>
LowerBoundRates<Scalar> lower_bound_rates(Scalar mu, Scalar delta) {
  const Scalar ratio = Scalar(64) * mu / delta;
  return lower_bound_rates_from_alpha(ratio * ratio);
}

/// Smallest d with d >= 2 log_q(alpha / (4 sqrt 2)) and d >= 2K.
template <typename Scalar>
Index hard_instance_min_dimension(Index K, Scalar mu, Scalar delta) {
  if (K < 1) throw std::invalid_argument("hard_instance_min_dimension: K must be >= 1");
  const auto [alpha, q] = lower_bound_rates(mu, delta);
  const Scalar log_term = Scalar(2) * std::log(alpha / (Scalar(4) * std::sqrt(Scalar(2)))) / std::log(q);
  const Index from_log = static_cast<Index>(std::ceil(log_term));
  return std::max({from_log, Index(2) * K, Index(1)});
}

template <typename Scalar>
struct ApproxDualSolution {
  Vector<Scalar> ybar;
  Scalar error_bound = 0;  ///< q^{d+1} / (alpha (1 - q))
  Scalar alpha = 0;
  Scalar q = 0;
};

/// q^{d+1} / (alpha (1 - q)).
template <typename Scalar>
Scalar ybar_error_bound(Scalar q, Scalar alpha, Index d) {
  return std::pow(q, Scalar(d + 1)) / (alpha * (Scalar(1) - q));
}

/// ybar_i = q^i / (1 - q), i = 1..d.
template <typename Scalar>
ApproxDualSolution<Scalar> approx_solution_ybar(Scalar alpha, Index d) {
  const auto rates = lower_bound_rates_from_alpha(alpha);
  ApproxDualSolution<Scalar> out;
  out.alpha = rates.alpha;
  out.q = rates.q;
  out.ybar.resize(d);
  Scalar qi = rates.q;
  for (Index i = 0; i < d; ++i) {
    out.ybar(i) = qi / (Scalar(1) - rates.q);
    qi *= rates.q;
  }
  out.error_bound = ybar_error_bound(rates.q, rates.alpha, d);
  return out;
}

template <typename Scalar>
ApproxDualSolution<Scalar> approx_solution_ybar(const HardInstance<Scalar>& inst) {
  return approx_solution_ybar(lower_bound_rates(inst.mu, inst.delta).alpha, inst.d);
}

/// Exact saddle point of the mean hard-instance objective: y* solves
/// (A'A + alpha I) y = e1 and x* = -(delta / (64 mu)) A y*.
template <typename Scalar>
Vector<Scalar> hard_instance_solution(const HardInstance<Scalar>& inst) {
  const Scalar alpha = lower_bound_rates(inst.mu, inst.delta).alpha;
  const SparseMatrix<Scalar> A = inst.A();
  SparseMatrix<Scalar> I(inst.d, inst.d);
  I.setIdentity();
  const SparseMatrix<Scalar> system = SparseMatrix<Scalar>(A.transpose() * A) + alpha * I;
  Eigen::SimplicialLDLT<SparseMatrix<Scalar>> ldlt(system);
  Vector<Scalar> e1 = Vector<Scalar>::Zero(inst.d);
  e1(0) = 1;
  const Vector<Scalar> y = ldlt.solve(e1);
  Vector<Scalar> z(2 * inst.d);
  z.head(inst.d) = -(inst.delta / (Scalar(64) * inst.mu)) * (A * y);
  z.tail(inst.d) = y;
  return z;
}

}  // namespace saddlesim

#endif  // SADDLESIM_PROBLEMS_HPP
