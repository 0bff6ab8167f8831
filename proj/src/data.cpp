#include "saddlesim/harness/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace saddlesim::harness {

namespace {

double parse_real(const std::string& tok, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("libsvm: malformed number '" + tok + "' on line " + std::to_string(lineno), lineno);
  }
}

}  // namespace

SparseDataset parse_libsvm_stream(std::istream& in, Index num_features) {
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> labels;
  Index max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(parse_real(tok, lineno));
    Index prev = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError("libsvm: malformed token '" + tok + "' on line " + std::to_string(lineno), lineno);
      }
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc() || ptr != tok.data() + colon || idx < 1) {
        throw ParseError("libsvm: bad feature index in '" + tok + "' on line " + std::to_string(lineno), lineno);
      }
      if (idx <= prev) {
        throw ParseError("libsvm: feature indices not increasing on line " + std::to_string(lineno), lineno);
      }
      prev = static_cast<Index>(idx);
      const double value = parse_real(tok.substr(colon + 1), lineno);
      if (num_features > 0 && idx > num_features) {
        throw ParseError("libsvm: feature index " + std::to_string(idx) + " exceeds d on line " +
                             std::to_string(lineno),
                         lineno);
      }
      entries.emplace_back(row, static_cast<Index>(idx - 1), value);
      max_index = std::max<Index>(max_index, idx);
    }
  }
  if (labels.empty()) throw ParseError("libsvm: empty file", 0);
  SparseDataset out;
  const Index d = num_features > 0 ? num_features : std::max<Index>(max_index, 1);
  out.X.resize(static_cast<Index>(labels.size()), d);
  out.X.setFromTriplets(entries.begin(), entries.end());
  out.X.makeCompressed();
  out.y = Eigen::Map<const Vector<double>>(labels.data(), static_cast<Index>(labels.size()));
  return out;
}

SparseDataset parse_libsvm(const std::string& path, Index num_features) {
  std::ifstream in(path);
  if (!in) throw ParseError("libsvm: cannot open '" + path + "'", 0);
  return parse_libsvm_stream(in, num_features);
}

Dataset to_dense(const SparseDataset& data) { return {Matrix<double>(data.X), data.y}; }

std::vector<Dataset> generate_synthetic(Index n_local, Index d, Index M, double amplitude, std::uint64_t seed) {
  if (n_local < 1 || d < 1 || M < 1) throw std::invalid_argument("generate_synthetic: n_local, d, M must be >= 1");
  if (!(amplitude >= 0)) throw std::invalid_argument("generate_synthetic: amplitude must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Index r, Index c) {
    Matrix<double> A(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) A(i, j) = normal(rng);
    return A;
  };
  Dataset master{draw(n_local, d), draw(n_local, 1).col(0)};
  std::vector<Dataset> out;
  out.reserve(static_cast<std::size_t>(M));
  out.push_back(master);
  for (Index m = 1; m < M; ++m) {
    Matrix<double> noise = draw(n_local, d);
    out.push_back({master.X + amplitude * noise, master.y});
  }
  return out;
}

PartitionScheme partition_scheme_from_string(const std::string& s) {
  if (s == "contiguous") return PartitionScheme::Contiguous;
  if (s == "shuffled") return PartitionScheme::Shuffled;
  throw std::invalid_argument("unknown partition scheme '" + s + "'");
}

std::vector<Dataset> partition_data(const Dataset& data, Index M, PartitionScheme scheme, std::uint64_t seed) {
  const Index N = data.rows();
  if (M < 1) throw std::invalid_argument("partition_data: M must be >= 1");
  if (M > N) throw std::invalid_argument("partition_data: more shards than rows");
  std::vector<Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Index(0));
  if (scheme == PartitionScheme::Shuffled) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<Dataset> shards;
  Index at = 0;
  for (Index m = 0; m < M; ++m) {
    const Index size = N / M + (m < N % M ? 1 : 0);
    Dataset s{Matrix<double>(size, data.dim()), Vector<double>(size)};
    for (Index i = 0; i < size; ++i) {
      const Index src = order[static_cast<std::size_t>(at + i)];
      s.X.row(i) = data.X.row(src);
      s.y(i) = data.y(src);
    }
    at += size;
    shards.push_back(std::move(s));
  }
  return shards;
}

}  // namespace saddlesim::harness
