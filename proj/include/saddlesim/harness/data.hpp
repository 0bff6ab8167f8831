#ifndef SADDLESIM_HARNESS_DATA_HPP
#define SADDLESIM_HARNESS_DATA_HPP

#include "saddlesim/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace saddlesim::harness {

/// One regression dataset: dense features and real labels.
struct Dataset {
  Matrix<double> X;
  Vector<double> y;

  Index rows() const { return X.rows(); }
  Index dim() const { return X.cols(); }
};

struct SparseDataset {
  SparseMatrix<double> X;
  Vector<double> y;
};

/// Parse error with the offending 1-based line number (0 when not line-specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// LIBSVM text: "label idx:val idx:val ..." with 1-based feature indices.
/// d is the largest index seen unless `num_features` is positive.
SparseDataset parse_libsvm(const std::string& path, Index num_features = 0);
SparseDataset parse_libsvm_stream(std::istream& in, Index num_features = 0);

/// Master data with standard normal features and labels; worker m >= 1 gets
/// the master features plus i.i.d. N(0, amplitude^2) noise, labels unchanged.
std::vector<Dataset> generate_synthetic(Index n_local, Index d, Index M, double amplitude, std::uint64_t seed);

enum class PartitionScheme { Contiguous, Shuffled };

PartitionScheme partition_scheme_from_string(const std::string& s);

/// Near-equal shards; the first N mod M shards carry one extra row.
std::vector<Dataset> partition_data(const Dataset& data, Index M, PartitionScheme scheme, std::uint64_t seed = 0);

Dataset to_dense(const SparseDataset& data);

}  // namespace saddlesim::harness

#endif  // SADDLESIM_HARNESS_DATA_HPP
