#include "saddlesim/harness/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace saddlesim::harness {

namespace {

const std::vector<std::string>& columns() {
  static const std::vector<std::string> c{"round", "comm_rounds", "local_iters", "dist_sq",
                                          "gap", "consensus_err", "wall_seconds"};
  return c;
}

void put_real(std::ostream& out, double v) {
  if (std::isnan(v)) return;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, res.ptr - buf);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double get_real(const std::string& field, const std::string& column, std::size_t lineno) {
  if (field.empty()) return std::nan("");
  double v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw TraceFormatError("trace: bad value '" + field + "' in column " + column + " on line " +
                               std::to_string(lineno),
                           column);
  }
  return v;
}

std::int64_t get_int(const std::string& field, const std::string& column, std::size_t lineno) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw TraceFormatError("trace: bad integer '" + field + "' in column " + column + " on line " +
                               std::to_string(lineno),
                           column);
  }
  return v;
}

}  // namespace

void write_trace(const RunTrace& trace, std::ostream& out) {
  if (trace.empty()) throw std::invalid_argument("write_trace: empty trace");
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.round << ',' << r.comm_rounds << ',' << r.local_iters << ',';
    put_real(out, r.dist_sq);
    out << ',';
    put_real(out, r.gap);
    out << ',';
    put_real(out, r.consensus_err);
    out << ',';
    put_real(out, r.wall_seconds);
    out << '\n';
  }
}

void write_trace(const RunTrace& trace, const std::string& path) {
  std::ostringstream buf;
  write_trace(trace, buf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_trace: cannot open '" + path + "'");
  out << buf.str();
  if (!out) throw std::runtime_error("write_trace: write failed for '" + path + "'");
}

RunTrace load_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceFormatError("trace: missing header", "");
  const auto header = split(line);
  const auto& expected = columns();
  for (std::size_t i = 0; i < std::max(header.size(), expected.size()); ++i) {
    if (i >= header.size()) throw TraceFormatError("trace: missing column " + expected[i], expected[i]);
    if (i >= expected.size()) throw TraceFormatError("trace: unexpected column " + header[i], header[i]);
    if (header[i] != expected[i]) {
      throw TraceFormatError("trace: header column " + std::to_string(i + 1) + " is '" + header[i] + "', expected '" +
                                 expected[i] + "'",
                             expected[i]);
    }
  }
  RunTrace trace;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != expected.size()) {
      throw TraceFormatError("trace: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                                 " fields, expected " + std::to_string(expected.size()),
                             "");
    }
    TraceRow r;
    r.round = get_int(f[0], expected[0], lineno);
    r.comm_rounds = get_int(f[1], expected[1], lineno);
    r.local_iters = get_int(f[2], expected[2], lineno);
    r.dist_sq = get_real(f[3], expected[3], lineno);
    r.gap = get_real(f[4], expected[4], lineno);
    r.consensus_err = get_real(f[5], expected[5], lineno);
    r.wall_seconds = get_real(f[6], expected[6], lineno);
    trace.rows.push_back(r);
  }
  if (trace.empty()) throw TraceFormatError("trace: no data rows", "");
  trace.validate();
  return trace;
}

RunTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_trace: cannot open '" + path + "'");
  return load_trace(in);
}

}  // namespace saddlesim::harness
