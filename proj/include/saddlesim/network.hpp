#ifndef SADDLESIM_NETWORK_HPP
#define SADDLESIM_NETWORK_HPP

#include "saddlesim/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace saddlesim {

enum class TopologyKind { Line, Ring, Star, Grid, Complete, Custom };

inline std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::Line: return "line";
    case TopologyKind::Ring: return "ring";
    case TopologyKind::Star: return "star";
    case TopologyKind::Grid: return "grid";
    case TopologyKind::Complete: return "complete";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

inline TopologyKind topology_kind_from_string(const std::string& s) {
  if (s == "line") return TopologyKind::Line;
  if (s == "ring") return TopologyKind::Ring;
  if (s == "star") return TopologyKind::Star;
  if (s == "grid") return TopologyKind::Grid;
  if (s == "complete") return TopologyKind::Complete;
  if (s == "custom") return TopologyKind::Custom;
  throw std::invalid_argument("unknown topology kind '" + s + "'");
}

using Edge = std::pair<Index, Index>;

/// Connected undirected graph on nodes 0..M-1. Edges are stored with i < j.
class Topology {
 public:
  Topology(Index num_nodes, std::vector<Edge> edges, TopologyKind kind = TopologyKind::Custom)
      : num_nodes_(num_nodes), kind_(kind) {
    if (num_nodes_ < 1) throw std::invalid_argument("Topology: need at least one node");
    std::set<Edge> unique;
    for (auto [i, j] : edges) {
      if (i < 0 || j < 0 || i >= num_nodes_ || j >= num_nodes_) {
        throw std::invalid_argument("Topology: edge endpoint out of range");
      }
      if (i == j) throw std::invalid_argument("Topology: self-loop");
      unique.insert({std::min(i, j), std::max(i, j)});
    }
    edges_.assign(unique.begin(), unique.end());
    adjacency_.assign(static_cast<std::size_t>(num_nodes_), {});
    for (auto [i, j] : edges_) {
      adjacency_[static_cast<std::size_t>(i)].push_back(j);
      adjacency_[static_cast<std::size_t>(j)].push_back(i);
    }
  }

  Index size() const { return num_nodes_; }
  TopologyKind kind() const { return kind_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Index>& neighbors(Index i) const { return adjacency_.at(static_cast<std::size_t>(i)); }
  Index degree(Index i) const { return static_cast<Index>(neighbors(i).size()); }

  /// BFS hop counts from `source`; unreachable nodes get -1.
  std::vector<Index> distances_from(Index source) const {
    std::vector<Index> dist(static_cast<std::size_t>(num_nodes_), -1);
    std::queue<Index> frontier;
    dist[static_cast<std::size_t>(source)] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (Index v : neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          frontier.push(v);
        }
      }
    }
    return dist;
  }

  bool is_connected() const {
    const auto d = distances_from(0);
    return std::none_of(d.begin(), d.end(), [](Index v) { return v < 0; });
  }

 private:
  Index num_nodes_;
  TopologyKind kind_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
};

/// Builds one of the standard shapes. `grid_rows` applies to grids only and
/// must divide M; 0 picks the largest divisor not exceeding sqrt(M).
inline Topology build_topology(TopologyKind kind, Index M, Index grid_rows = 0) {
  if (M < 1) throw std::invalid_argument("build_topology: M must be >= 1");
  std::vector<Edge> edges;
  switch (kind) {
    case TopologyKind::Line:
      for (Index i = 0; i + 1 < M; ++i) edges.push_back({i, i + 1});
      break;
    case TopologyKind::Ring:
      if (M < 3) throw std::invalid_argument("build_topology: ring needs M >= 3");
      for (Index i = 0; i < M; ++i) edges.push_back({i, (i + 1) % M});
      break;
    case TopologyKind::Star:
      for (Index i = 1; i < M; ++i) edges.push_back({0, i});
      break;
    case TopologyKind::Grid: {
      Index rows = grid_rows;
      if (rows == 0) {
        rows = static_cast<Index>(std::sqrt(static_cast<double>(M)));
        while (rows > 1 && M % rows != 0) --rows;
      }
      if (rows < 1 || M % rows != 0) throw std::invalid_argument("build_topology: grid rows must divide M");
      const Index cols = M / rows;
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
          const Index i = r * cols + c;
          if (c + 1 < cols) edges.push_back({i, i + 1});
          if (r + 1 < rows) edges.push_back({i, i + cols});
        }
      }
      break;
    }
    case TopologyKind::Complete:
      for (Index i = 0; i < M; ++i)
        for (Index j = i + 1; j < M; ++j) edges.push_back({i, j});
      break;
    case TopologyKind::Custom:
      throw std::invalid_argument("build_topology: custom graphs are built from an edge list");
  }
  return Topology(M, std::move(edges), kind);
}

/// Max over pairs of the shortest-path length.
inline Index diameter(const Topology& t) {
  Index best = 0;
  for (Index s = 0; s < t.size(); ++s) {
    for (Index d : t.distances_from(s)) {
      if (d < 0) throw std::invalid_argument("diameter: graph is disconnected");
      best = std::max(best, d);
    }
  }
  return best;
}

/// Edge list text format: one "i j" pair per line, 0-based. Lines starting
/// with '#' are comments. The node count is 1 + the largest index unless given.
inline void write_edge_list(const Topology& t, std::ostream& out) {
  out << "# nodes " << t.size() << '\n';
  for (auto [i, j] : t.edges()) out << i << ' ' << j << '\n';
}

inline Topology read_edge_list(std::istream& in, Index num_nodes = 0) {
  std::vector<Edge> edges;
  std::string line;
  Index max_index = -1;
  Index declared = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hdr(line.substr(1));
      std::string word;
      Index n = 0;
      if (hdr >> word >> n && word == "nodes") declared = n;
      continue;
    }
    std::istringstream ls(line);
    Index i = 0;
    Index j = 0;
    std::string extra;
    if (!(ls >> i >> j) || (ls >> extra)) {
      throw std::invalid_argument("edge list: malformed line " + std::to_string(lineno));
    }
    edges.push_back({i, j});
    max_index = std::max({max_index, i, j});
  }
  Index n = num_nodes > 0 ? num_nodes : std::max(declared, max_index + 1);
  Topology t(n, std::move(edges), TopologyKind::Custom);
  if (!t.is_connected()) throw std::invalid_argument("edge list: graph is disconnected");
  return t;
}

/// Symmetric stochastic mixing matrix compliant with a topology, with its spectrum.
template <typename Scalar>
struct GossipMatrix {
  Matrix<Scalar> W;
  Scalar lambda2 = Scalar(0);
  Scalar lambda_min = Scalar(0);
  Scalar rho = Scalar(1);

  Index size() const { return W.rows(); }
};

/// Spectrum of a symmetric W with W 1 = 1. For M = 1 there is no second
/// eigenvalue; lambda2 = lambda_min = 0 and rho = 1.
template <typename Scalar>
GossipMatrix<Scalar> gossip_from_matrix(Matrix<Scalar> W) {
  GossipMatrix<Scalar> g;
  const Index M = W.rows();
  if (W.cols() != M) throw std::invalid_argument("gossip matrix must be square");
  g.W = std::move(W);
  if (M == 1) return g;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(g.W, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();  // ascending
  g.lambda2 = ev(M - 2);
  g.lambda_min = ev(0);
  g.rho = Scalar(1) - std::max(g.lambda2, std::abs(g.lambda_min));
  return g;
}

/// Metropolis weights w_ij = 1 / (1 + max(deg_i, deg_j)) on edges, residual on
/// the diagonal. `lazy` returns (W + I) / 2, which has a nonnegative spectrum.
template <typename Scalar = double>
GossipMatrix<Scalar> build_gossip_matrix(const Topology& t, bool lazy = false) {
  if (!t.is_connected()) throw std::invalid_argument("build_gossip_matrix: graph is disconnected");
  const Index M = t.size();
  Matrix<Scalar> W = Matrix<Scalar>::Zero(M, M);
  for (auto [i, j] : t.edges()) {
    const Scalar w = Scalar(1) / Scalar(1 + std::max(t.degree(i), t.degree(j)));
    W(i, j) = w;
    W(j, i) = w;
  }
  for (Index i = 0; i < M; ++i) W(i, i) = Scalar(1) - W.row(i).sum();
  if (lazy) W = (W + Matrix<Scalar>::Identity(M, M)) / Scalar(2);
  return gossip_from_matrix<Scalar>(std::move(W));
}

/// Momentum coefficient of the Chebyshev-accelerated gossip recursion.
template <typename Scalar>
Scalar acceleration_eta(Scalar lambda2) {
  if (std::abs(lambda2) > Scalar(1)) throw std::invalid_argument("acceleration_eta: |lambda2| must be <= 1");
  const Scalar s = std::sqrt(Scalar(1) - lambda2 * lambda2);
  return (Scalar(1) - s) / (Scalar(1) + s);
}

/// Accelerated gossip over the rows of `rows` (one row per node):
///   Z^{t+1} = (1 + eta) W Z^t - eta Z^{t-1},  Z^{-1} = Z^0 = rows,  t = 0..H,
/// returning Z^{H+1}. H = 0 still performs one step, so the call costs H + 1
/// communication rounds.
template <typename Scalar, typename Derived>
Matrix<Scalar> acc_gossip(const Eigen::MatrixBase<Derived>& rows, const GossipMatrix<Scalar>& gossip, Index H) {
  if (H < 0) throw std::invalid_argument("acc_gossip: H must be >= 0");
  if (rows.rows() != gossip.size()) throw std::invalid_argument("acc_gossip: row count does not match gossip matrix");
  const Scalar eta = acceleration_eta(gossip.lambda2);
  Matrix<Scalar> prev = rows;
  Matrix<Scalar> cur = rows;
  Matrix<Scalar> next(rows.rows(), rows.cols());
  for (Index t = 0; t <= H; ++t) {
    next.noalias() = (Scalar(1) + eta) * (gossip.W * cur);
    next -= eta * prev;
    prev.swap(cur);
    cur.swap(next);
  }
  return cur;
}

/// Number of counted communication rounds of one acc_gossip call.
inline Index acc_gossip_rounds(Index H) { return H + 1; }

}  // namespace saddlesim

#endif  // SADDLESIM_NETWORK_HPP
