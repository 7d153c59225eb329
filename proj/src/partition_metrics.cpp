#include "star/partition_metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "star/ensemble.hpp"

namespace star {
namespace {

void check_lengths(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("partition lengths differ (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

constexpr std::uint64_t choose2(std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }

}  // namespace

Contingency contingency(const Partition& a, const Partition& b) {
  check_lengths(a, b);
  Contingency c;
  c.rows = a.num_communities();
  c.cols = b.num_communities();
  c.table.assign(c.rows * c.cols, 0);
  c.row_sums.assign(c.rows, 0);
  c.col_sums.assign(c.cols, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++c.table[a[i] * c.cols + b[i]];
    ++c.row_sums[a[i]];
    ++c.col_sums[b[i]];
  }
  return c;
}

PairCounts pair_counts(const Partition& a, const Partition& b) {
  check_lengths(a, b);
  const std::size_t n = a.size();
  const std::size_t ka = a.num_communities();
  const std::size_t kb = b.num_communities();
  std::vector<std::uint64_t> row(ka, 0);
  std::vector<std::uint64_t> col(kb, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++row[a[i]];
    ++col[b[i]];
  }
  PairCounts pc;
  if (ka * kb <= (std::size_t{1} << 16)) {
    std::vector<std::uint64_t> cells(ka * kb, 0);
    for (std::size_t i = 0; i < n; ++i) ++cells[a[i] * kb + b[i]];
    for (auto x : cells) pc.together_both += choose2(x);
  } else {
    // Fine partitions: count cells by sorting the (a, b) keys.
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = static_cast<std::uint64_t>(a[i]) * kb + b[i];
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && keys[j] == keys[i]) ++j;
      pc.together_both += choose2(j - i);
      i = j;
    }
  }
  for (auto x : row) pc.together_a += choose2(x);
  for (auto x : col) pc.together_b += choose2(x);
  pc.total = choose2(n);
  return pc;
}

double ari(const Partition& a, const Partition& b) {
  check_lengths(a, b);
  if (a.size() < 2) throw std::invalid_argument("ari: need at least two nodes");
  const PairCounts pc = pair_counts(a, b);
  using Wide = __int128;
  const Wide z = pc.together_both;
  const Wide bb = pc.together_a;
  const Wide cc = pc.together_b;
  const Wide m = pc.total;
  // Multiply through by 2M: (2zM - 2bc) / ((b + c)M - 2bc).
  const Wide numerator = 2 * z * m - 2 * bb * cc;
  const Wide denominator = (bb + cc) * m - 2 * bb * cc;
  if (denominator == 0) return 1.0;
  return static_cast<double>(static_cast<long double>(numerator) / static_cast<long double>(denominator));
}

AriMatrix ari_matrix(std::span<const Partition> partitions) {
  const std::size_t t = partitions.size();
  if (t < 2) throw std::invalid_argument("ari_matrix: need at least two partitions");
  AriMatrix m;
  m.t = t;
  m.values.assign(t * t, 0.0);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = i + 1; j < t; ++j) {
      const double r = ari(partitions[i], partitions[j]);
      m(i, j) = r;
      m(j, i) = r;
    }
  }
  return m;
}

AriMatrix ari_matrix(const Ensemble& ens) {
  const auto parts = ens.partitions();
  return ari_matrix(parts);
}

}  // namespace star
