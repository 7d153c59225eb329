#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "star/partition.hpp"

namespace star {

struct Ensemble;

// n_uv = |C1_u ∩ C2_v| with marginals n_u. and n_.v.
struct Contingency {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> table;  // row-major, rows x cols
  std::vector<std::uint64_t> row_sums;
  std::vector<std::uint64_t> col_sums;

  std::uint64_t at(std::size_t u, std::size_t v) const { return table[u * cols + v]; }
};

Contingency contingency(const Partition& a, const Partition& b);

// Pair counts behind the ARI: z pairs together in both partitions, b pairs
// together in `a`, c pairs together in `b`, M = C(n, 2).
struct PairCounts {
  std::uint64_t together_both = 0;
  std::uint64_t together_a = 0;
  std::uint64_t together_b = 0;
  std::uint64_t total = 0;
};

PairCounts pair_counts(const Partition& a, const Partition& b);

// Adjusted Rand Index, (z - bc/M) / ((b + c)/2 - bc/M). Evaluated in exact
// 128-bit integer arithmetic with one final division. Returns 1 when the
// denominator vanishes (both partitions all-singletons or both all-in-one).
// Throws std::invalid_argument for n < 2 or mismatched lengths.
double ari(const Partition& a, const Partition& b);

// Pairwise ARI over an ensemble with a zero diagonal (the similarity network).
struct AriMatrix {
  std::size_t t = 0;
  std::vector<double> values;  // row-major t x t

  double operator()(std::size_t i, std::size_t j) const { return values[i * t + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * t + j]; }
};

AriMatrix ari_matrix(std::span<const Partition> partitions);
AriMatrix ari_matrix(const Ensemble& ens);

}  // namespace star
