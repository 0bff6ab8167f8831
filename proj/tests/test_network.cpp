#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "saddlesim/metrics.hpp"
#include "saddlesim/network.hpp"

#include <sstream>

using namespace saddlesim;
using Mat = Eigen::MatrixXd;

namespace {

std::vector<std::pair<long, long>> as_pairs(const Topology& t) {
  std::vector<std::pair<long, long>> e;
  for (auto [i, j] : t.edges()) e.push_back({long(i), long(j)});
  return e;
}

long oracle_diameter(const Topology& t) {
  long best = 0;
  for (const auto& row : oracle::floyd(t.size(), as_pairs(t)))
    for (long d : row) best = std::max(best, d);
  return best;
}

}  // namespace

TEST_CASE("standard topologies") {
  const auto line = build_topology(TopologyKind::Line, 4);
  CHECK(line.edges() == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(diameter(line) == 3);
  const auto complete = build_topology(TopologyKind::Complete, 4);
  CHECK(complete.edges().size() == 6);
  CHECK(diameter(complete) == 1);
  const auto star = build_topology(TopologyKind::Star, 5);
  CHECK(star.edges().size() == 4);
  CHECK(diameter(star) == 2);
  const auto grid = build_topology(TopologyKind::Grid, 9, 3);
  CHECK(diameter(grid) == 4);
  CHECK(diameter(grid) == oracle_diameter(grid));
  CHECK(diameter(build_topology(TopologyKind::Line, 17)) == 16);
  CHECK_THROWS_AS(build_topology(TopologyKind::Ring, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_topology(TopologyKind::Grid, 10, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_topology(TopologyKind::Line, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_topology(TopologyKind::Custom, 4), std::invalid_argument);
}

TEST_CASE("diameter agrees with Floyd-Warshall on every shape") {
  for (auto kind : {TopologyKind::Line, TopologyKind::Ring, TopologyKind::Star, TopologyKind::Grid,
                    TopologyKind::Complete}) {
    for (Index M : {3, 8, 12, 16}) {
      const auto t = build_topology(kind, M);
      CHECK(diameter(t) == oracle_diameter(t));
    }
  }
}

TEST_CASE("topology rejects self-loops and disconnected graphs are detected") {
  CHECK_THROWS_AS(Topology(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Topology(3, {{0, 5}}), std::invalid_argument);
  const Topology split(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(split.is_connected());
  CHECK_THROWS_AS(diameter(split), std::invalid_argument);
  CHECK_THROWS_AS(build_gossip_matrix(split), std::invalid_argument);
}

TEST_CASE("edge list round trip and errors") {
  const auto grid = build_topology(TopologyKind::Grid, 6, 2);
  std::stringstream s;
  write_edge_list(grid, s);
  const auto back = read_edge_list(s);
  CHECK(back.size() == 6);
  CHECK(back.edges() == grid.edges());

  std::stringstream bad("0 1\n1 x\n");
  CHECK_THROWS_WITH_AS(read_edge_list(bad), doctest::Contains("line 2"), std::invalid_argument);
  std::stringstream disconnected("0 1\n2 3\n");
  CHECK_THROWS_AS(read_edge_list(disconnected), std::invalid_argument);
  std::stringstream isolated("# nodes 4\n0 1\n1 2\n");
  CHECK_THROWS_AS(read_edge_list(isolated), std::invalid_argument);
}

TEST_CASE("complete graph Metropolis matrix is J/4") {
  const auto g = build_gossip_matrix<double>(build_topology(TopologyKind::Complete, 4));
  CHECK((g.W - Mat::Constant(4, 4, 0.25)).norm() < 1e-15);
  CHECK(std::abs(g.lambda2) < 1e-12);
  CHECK(g.rho == doctest::Approx(1.0));
}

TEST_CASE("ring of four matches the circulant spectrum") {
  const auto g = build_gossip_matrix<double>(build_topology(TopologyKind::Ring, 4));
  Mat expected(4, 4);
  expected << 1. / 3, 1. / 3, 0, 1. / 3, 1. / 3, 1. / 3, 1. / 3, 0, 0, 1. / 3, 1. / 3, 1. / 3, 1. / 3, 0, 1. / 3, 1. / 3;
  CHECK((g.W - expected).norm() < 1e-15);
  auto ev = oracle::circulant_eigenvalues({1. / 3, 1. / 3, 0, 1. / 3});
  std::sort(ev.begin(), ev.end());
  CHECK(g.lambda_min == doctest::Approx(ev.front()));
  CHECK(g.lambda2 == doctest::Approx(ev[2]));
  CHECK(g.lambda2 == doctest::Approx(1. / 3));
  CHECK(g.rho == doctest::Approx(2. / 3));
}

TEST_CASE("gossip matrices satisfy the mixing assumptions") {
  for (bool lazy : {false, true}) {
    for (auto kind : {TopologyKind::Line, TopologyKind::Ring, TopologyKind::Star, TopologyKind::Grid,
                      TopologyKind::Complete}) {
      for (Index M : {3, 8, 16, 64}) {
        const auto t = build_topology(kind, M);
        const auto g = build_gossip_matrix<double>(t, lazy);
        CHECK((g.W - g.W.transpose()).norm() == 0.0);
        CHECK((g.W.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
        CHECK((g.W.diagonal().array() > 0).all());
        Mat adj = Mat::Zero(M, M);
        for (auto [i, j] : t.edges()) adj(i, j) = adj(j, i) = 1;
        for (Index i = 0; i < M; ++i)
          for (Index j = 0; j < M; ++j)
            if (i != j) CHECK((g.W(i, j) > 0) == (adj(i, j) == 1));
        CHECK(g.rho > 0);
        CHECK(g.rho <= 1);
        if (lazy) CHECK(g.lambda_min >= -1e-12);
      }
    }
  }
}

TEST_CASE("acceleration eta") {
  CHECK(acceleration_eta(0.0) == 0.0);
  CHECK(acceleration_eta(1.0 / 3) == doctest::Approx(17 - 12 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(acceleration_eta(1.0 / 3) == doctest::Approx(0.029437).epsilon(1e-4));
  double prev = -1;
  for (double l : {0.0, 0.2, 0.5, 0.9, 0.99, 0.999999}) {
    const double e = acceleration_eta(l);
    CHECK(e >= 0);
    CHECK(e < 1);
    CHECK(e > prev);
    prev = e;
  }
  CHECK_THROWS_AS(acceleration_eta(1.5), std::invalid_argument);
}

TEST_CASE("accelerated gossip matches the written-out recursion") {
  std::mt19937_64 rng(6);
  const auto g = build_gossip_matrix<double>(build_topology(TopologyKind::Grid, 12));
  const Mat X = oracle::gaussian(12, 3, rng);
  for (int H : {0, 1, 4, 9}) {
    const Mat Y = acc_gossip(X, g, H);
    CHECK((Y - oracle::chebyshev_gossip(g.W, X, acceleration_eta(g.lambda2), H)).norm() <= 1e-12);
  }
  CHECK(acc_gossip_rounds(0) == 1);
  CHECK(acc_gossip_rounds(7) == 8);
  CHECK_THROWS_AS(acc_gossip(X, g, -1), std::invalid_argument);
  CHECK_THROWS_AS(acc_gossip(Mat(X.topRows(5)), g, 2), std::invalid_argument);
}

TEST_CASE("zero gossip budget performs exactly one step") {
  const auto g = build_gossip_matrix<double>(build_topology(TopologyKind::Ring, 6));
  Mat X = Mat::Zero(6, 1);
  X(0, 0) = 1;
  const double eta = acceleration_eta(g.lambda2);
  const Mat expected = (1 + eta) * g.W * X - eta * X;
  CHECK((acc_gossip(X, g, 0) - expected).norm() <= 1e-15);
}

TEST_CASE("consensus is a fixed point and the mean is preserved") {
  const auto g = build_gossip_matrix<double>(build_topology(TopologyKind::Line, 3));
  Mat X(3, 1);
  X << 1, 3, 5;
  for (int H : {0, 3, 20}) CHECK(acc_gossip(X, g, H).mean() == doctest::Approx(3.0).epsilon(1e-12));
  const Mat same = Mat::Constant(3, 2, 1.5);
  CHECK((acc_gossip(same, g, 10) - same).norm() <= 1e-12);
}

TEST_CASE("ring of eight contracts at the accelerated rate") {
  std::mt19937_64 rng(12);
  const auto g = build_gossip_matrix<double>(build_topology(TopologyKind::Ring, 8));
  const Mat X = oracle::gaussian(8, 5, rng);
  const Mat Y = acc_gossip(X, g, 20);
  const double bound = std::pow(1 - std::sqrt(g.rho), 40);
  CHECK(consensus_error(Y) <= 1.05 * bound * consensus_error(X));
}
