#ifndef SADDLESIM_TRACE_HPP
#define SADDLESIM_TRACE_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace saddlesim {

/// One sampled outer round. Missing metrics are NaN.
struct TraceRow {
  std::int64_t round = 0;
  std::int64_t comm_rounds = 0;
  std::int64_t local_iters = 0;
  double dist_sq = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double consensus_err = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = std::numeric_limits<double>::quiet_NaN();

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct RunTrace {
  std::string method;
  std::vector<TraceRow> rows;

  bool empty() const { return rows.empty(); }
  const TraceRow& back() const { return rows.back(); }

  /// round strictly increasing, comm_rounds and local_iters nondecreasing.
  void validate() const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].round <= rows[i - 1].round) {
        throw std::invalid_argument("trace: round not strictly increasing at row " + std::to_string(i));
      }
      if (rows[i].comm_rounds < rows[i - 1].comm_rounds) {
        throw std::invalid_argument("trace: comm_rounds decreasing at row " + std::to_string(i));
      }
      if (rows[i].local_iters < rows[i - 1].local_iters) {
        throw std::invalid_argument("trace: local_iters decreasing at row " + std::to_string(i));
      }
    }
  }
};

}  // namespace saddlesim

#endif  // SADDLESIM_TRACE_HPP
