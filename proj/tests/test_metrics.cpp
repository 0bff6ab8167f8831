#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "saddlesim/metrics.hpp"
#include "saddlesim/problems.hpp"

using namespace saddlesim;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("distance and consensus") {
  CHECK(distance_sq(vec({1, 2}), vec({1, 2})) == 0.0);
  CHECK(distance_sq(vec({1, 2}), vec({4, 6})) == 25.0);
  CHECK_THROWS_AS(distance_sq(vec({1}), vec({1, 2})), std::invalid_argument);

  Mat rows(2, 2);
  rows << 1, 0, -1, 0;
  CHECK(consensus_error(rows) == 2.0);
  CHECK(consensus_error(Mat(Mat::Ones(5, 3))) == 0.0);
  CHECK(consensus_error(std::vector<Vec>{vec({1, 0}), vec({-1, 0})}) == 2.0);
  CHECK(consensus_error(std::vector<Vec>{}) == 0.0);
}

TEST_CASE("support size") {
  const SplitDims dims{3, 3};
  CHECK(support_size<double>(Vec::Zero(6), dims) == 0);
  CHECK(support_size<double>(vec({1, 0, 0, 0, 1e-20, 0}), dims) == 1);
  CHECK(support_size<double>(vec({0, 0, 1e-3, 0, 0, 0}), dims) == 3);
  CHECK(support_size<double>(vec({0, 0, 0, 0, 2, 0}), dims) == 2);
  CHECK(support_size<double>(vec({0, 0, 0, 0, 1e-3, 0}), dims, 1e-2) == 0);
  CHECK_THROWS_AS(support_size<double>(Vec::Zero(5), dims), std::invalid_argument);
}

TEST_CASE("saddle gap of the bilinear on the unit interval") {
  auto f = make_bilinear<double>(Mat::Identity(1, 1));
  NetworkProblem<double> net({f}, {ConstraintSet<double>::ball(1, 1.0), ConstraintSet<double>::ball(1, 1.0)});
  GapOptions<double> opts;
  opts.L = 1.0;
  opts.iters = 50;
  opts.convex_concave = true;
  CHECK(saddle_gap(net, vec({1, 0}), opts) == doctest::Approx(1.0));
  CHECK(saddle_gap(net, vec({0, 0}), opts) == doctest::Approx(0.0));
  CHECK(saddle_gap(net, vec({0.5, -0.5}), opts) == doctest::Approx(1.0));
  NetworkProblem<double> open({f}, SplitConstraints<double>::whole_space());
  CHECK_THROWS_AS(saddle_gap(open, vec({1, 0}), opts), std::invalid_argument);
}

TEST_CASE("saddle gap vanishes at the solution and is nonnegative") {
  auto net = random_quadratic_network<double>(3, 3, 1.0, 0.3, 2);
  const auto k = exact_affine_constants(net);
  const auto ref = reference_solution(net, 1e-13);
  GapOptions<double> opts;
  opts.L = k.L;
  opts.iters = default_gap_iterations(k.L, k.mu);
  CHECK(std::abs(saddle_gap(net, ref.z_star, opts)) < 1e-10);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 5; ++t) CHECK(saddle_gap(net, Vec(oracle::gaussian(6, 1, rng).col(0)), opts) > 0);
  CHECK(default_gap_iterations(10.0, 1.0) == 100);
}

TEST_CASE("reference solutions") {
  auto net = random_quadratic_network<double>(4, 4, 1.0, 0.3, 3);
  const auto direct = reference_solution(net, 1e-12);
  CHECK(direct.method == "direct");
  CHECK(direct.achieved_residual < 1e-12);

  // a ball that cuts off the unconstrained solution forces extragradient
  const double r = 0.5 * direct.z_star.head(4).norm();
  NetworkProblem<double> boxed(net.agents(), {ConstraintSet<double>::ball(4, r), ConstraintSet<double>::ball(4, 1e3)});
  const auto k = exact_affine_constants(net);
  ReferenceOptions<double> opts;
  opts.L = k.L;
  const auto coarse = reference_solution(boxed, 1e-8, opts);
  const auto fine = reference_solution(boxed, 1e-12, opts);
  CHECK(coarse.method == "extragradient");
  CHECK(fine.z_star.head(4).norm() <= r + 1e-12);
  // linear convergence: ||z - z*|| <= step / (1 - rate), bounded by a constant times tol
  CHECK((coarse.z_star - fine.z_star).norm() < 1e-8 * 4 * k.L / k.mu);

  opts.max_iters = 3;
  CHECK_THROWS_AS(reference_solution(boxed, 1e-14, opts), std::runtime_error);
}

TEST_CASE("reference cache computes once per key") {
  ReferenceCache<double> cache;
  int calls = 0;
  auto compute = [&] {
    ++calls;
    return ReferenceSolution<double>{vec({1}), 0.0, "direct"};
  };
  cache.get("a", compute);
  cache.get("a", compute);
  cache.get("b", compute);
  CHECK(calls == 2);
  CHECK(cache.size() == 2);
}
