#ifndef SADDLESIM_HARNESS_TRACE_IO_HPP
#define SADDLESIM_HARNESS_TRACE_IO_HPP

#include "saddlesim/trace.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace saddlesim::harness {

inline constexpr const char* kTraceHeader = "round,comm_rounds,local_iters,dist_sq,gap,consensus_err,wall_seconds";

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(const std::string& what, std::string column)
      : std::runtime_error(what), column_(std::move(column)) {}
  /// Name of the offending column, empty if the error is not column-specific.
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

/// Reals use 17 significant digits; NaN is written as an empty field.
void write_trace(const RunTrace& trace, std::ostream& out);
void write_trace(const RunTrace& trace, const std::string& path);

RunTrace load_trace(std::istream& in);
RunTrace load_trace(const std::string& path);

}  // namespace saddlesim::harness

#endif  // SADDLESIM_HARNESS_TRACE_IO_HPP
