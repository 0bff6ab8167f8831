// Independent reference computations for the tests. Nothing here calls into
// the library's numerical routines.
#ifndef SADDLESIM_TESTS_ORACLES_HPP
#define SADDLESIM_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Central-difference Jacobian of a vector field.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& F, const Vec& z, double h = 1e-6) {
  const Eigen::Index n = z.size();
  Mat J(F(z).size(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec p = z, m = z;
    p(j) += h;
    m(j) -= h;
    J.col(j) = (F(p) - F(m)) / (2 * h);
  }
  return J;
}

/// Central-difference gradient of a scalar function.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h = 1e-6) {
  Vec g(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    Vec p = z, m = z;
    p(j) += h;
    m(j) -= h;
    g(j) = (f(p) - f(m)) / (2 * h);
  }
  return g;
}

/// Largest singular value by power iteration on A'A.
inline double power_norm(const Mat& A, int iters = 5000) {
  if (A.size() == 0 || A.norm() == 0) return 0;
  Vec v = Vec::Ones(A.cols()).normalized();
  double s = 0;
  for (int k = 0; k < iters; ++k) {
    Vec w = A.transpose() * (A * v);
    const double nw = w.norm();
    if (nw == 0) return 0;
    v = w / nw;
    s = std::sqrt(nw);
  }
  return s;
}

/// All-pairs shortest paths by Floyd-Warshall; -1 for unreachable.
inline std::vector<std::vector<long>> floyd(long n, const std::vector<std::pair<long, long>>& edges) {
  const long inf = std::numeric_limits<long>::max() / 4;
  std::vector<std::vector<long>> d(n, std::vector<long>(n, inf));
  for (long i = 0; i < n; ++i) d[i][i] = 0;
  for (auto [a, b] : edges) d[a][b] = d[b][a] = 1;
  for (long k = 0; k < n; ++k)
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto& row : d)
    for (auto& x : row)
      if (x >= inf) x = -1;
  return d;
}

/// Eigenvalues of a real circulant matrix with first row c.
inline std::vector<double> circulant_eigenvalues(const std::vector<double>& c) {
  const std::size_t n = c.size();
  std::vector<double> ev(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += c[j] * std::cos(2 * M_PI * double(j * k) / double(n));
    ev[k] = s;
  }
  return ev;
}

/// Two-term recurrence written out node by node with plain loops.
inline Mat chebyshev_gossip(const Mat& W, const Mat& X, double eta, int H) {
  const Eigen::Index M = X.rows(), n = X.cols();
  Mat prev = X, cur = X;
  for (int t = 0; t <= H; ++t) {
    Mat next(M, n);
    for (Eigen::Index i = 0; i < M; ++i)
      for (Eigen::Index c = 0; c < n; ++c) {
        double s = 0;
        for (Eigen::Index j = 0; j < M; ++j) s += W(i, j) * cur(j, c);
        next(i, c) = (1 + eta) * s - eta * prev(i, c);
      }
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Solution of the affine variational equation J z + b = 0 by full-pivot LU.
inline Vec affine_root(const Mat& J, const Vec& b) { return J.fullPivLu().solve(-b); }

inline Mat gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Mat A(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) A(i, j) = N(rng);
  return A;
}

/// Robust-regression loss g(w, r) evaluated from its definition.
inline double regression_loss(const Mat& X, const Vec& y, double lambda, double beta, const Vec& w, const Vec& r) {
  const double N = double(X.rows());
  double s = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double e = (X.row(i).transpose() + r).dot(w) - y(i);
    s += e * e;
  }
  return s / (2 * N) + lambda / 2 * w.squaredNorm() - beta / 2 * r.squaredNorm();
}

}  // namespace oracle

#endif  // SADDLESIM_TESTS_ORACLES_HPP
