#ifndef SADDLESIM_HARNESS_CHECKS_HPP
#define SADDLESIM_HARNESS_CHECKS_HPP

#include "saddlesim/network.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace saddlesim::harness {

struct GossipCheckRow {
  TopologyKind kind = TopologyKind::Line;
  Index M = 0;
  Index H = 0;
  double rho = 0;
  /// Output consensus error over (1 - sqrt(rho))^{2H} times input error, max over trials.
  double ratio = 0;
  /// Max over nodes of ||y_i - ybar||^2 relative to the same bound.
  double node_ratio = 0;
  double mean_drift = 0;
  bool pass = false;
};

struct GossipCheckOptions {
  std::vector<TopologyKind> kinds{TopologyKind::Ring, TopologyKind::Star, TopologyKind::Grid, TopologyKind::Line};
  std::vector<Index> sizes{8, 16, 64};
  std::vector<Index> budgets{1, 5, 10, 20};
  Index dim = 4;
  Index trials = 5;
  bool lazy = false;
  double slack = 1.05;
  double mean_tol = 1e-10;
  std::uint64_t seed = 0;
};

/// Empirical accelerated-gossip contraction against (1 - sqrt(rho))^{2H}.
std::vector<GossipCheckRow> gossip_check(const GossipCheckOptions& opts);

struct LowerBoundRow {
  Index K = 0;               ///< communication rounds performed
  Index support = 0;         ///< max over nodes of support_size
  Index allowed = 0;         ///< floor(K / l)
  double dist_sq = 0;        ///< ||zbar - z*||^2
  double min_node_dist_sq = 0;
  double floor = 0;          ///< q^{2K/l} ||y0 - y*||^2 / 16
  bool support_ok = false;
  bool floor_ok = false;
};

struct LowerBoundCheck {
  Index M = 0;
  Index d = 0;
  Index l = 0;
  double mu = 0;
  double delta = 0;
  double q = 0;
  std::vector<LowerBoundRow> rows;
};

struct LowerBoundOptions {
  Index M = 33;
  double mu = 1.0;
  double delta = 10.0;
  /// 0 picks hard_instance_min_dimension for the largest K.
  Index d = 0;
  /// K values as multiples of l.
  std::vector<Index> multiples{1, 2, 3};
  double tol = 1e-14;
};

/// Decentralized EGD from zero on the line-graph hard instance, sampled after
/// K = j l communication rounds for each requested multiple j.
LowerBoundCheck lower_bound_check(const LowerBoundOptions& opts);

}  // namespace saddlesim::harness

#endif  // SADDLESIM_HARNESS_CHECKS_HPP
