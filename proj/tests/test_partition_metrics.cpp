#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "star/partition_metrics.hpp"

using namespace star;

namespace {

Partition P(std::vector<std::int64_t> a) { return Partition(a); }

}  // namespace

TEST(Partition, Canonicalize) {
  EXPECT_EQ(P({5, 5, 2, 2}).assignment(), (std::vector<CommunityId>{0, 0, 1, 1}));
  EXPECT_EQ(P({-3, 7, -3, 0}).assignment(), (std::vector<CommunityId>{0, 1, 0, 2}));
  EXPECT_EQ(P({5, 5, 2, 2}).num_communities(), 2u);
  const Partition once = P({9, 1, 9, 4});
  std::vector<std::int64_t> again(once.assignment().begin(), once.assignment().end());
  EXPECT_EQ(Partition(again), once);
  EXPECT_THROW(P({}), std::invalid_argument);
  EXPECT_EQ(P({3, 1, 3}).community_sizes(), (std::vector<std::size_t>{2, 1}));
}

TEST(Ari, ContingencyExample) {
  const Contingency c = contingency(P({0, 0, 0, 1, 1, 1}), P({0, 0, 1, 1, 2, 2}));
  ASSERT_EQ(c.rows, 2u);
  ASSERT_EQ(c.cols, 3u);
  EXPECT_EQ(c.table, (std::vector<std::uint64_t>{2, 1, 0, 0, 1, 2}));
  EXPECT_EQ(c.row_sums, (std::vector<std::uint64_t>{3, 3}));
  EXPECT_EQ(c.col_sums, (std::vector<std::uint64_t>{2, 2, 2}));
  const PairCounts pc = pair_counts(P({0, 0, 0, 1, 1, 1}), P({0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(pc.together_both, 2u);
  EXPECT_EQ(pc.together_a, 6u);
  EXPECT_EQ(pc.together_b, 3u);
  EXPECT_EQ(pc.total, 15u);
}

TEST(Ari, WorkedExamples) {
  EXPECT_NEAR(ari(P({0, 0, 0, 1, 1, 1}), P({0, 0, 1, 1, 2, 2})), 8.0 / 33.0, 1e-15);
  EXPECT_NEAR(ari(P({0, 0, 0, 1, 1, 1}), P({0, 0, 1, 1, 2, 2})), 0.242424, 1e-6);
  EXPECT_EQ(ari(P({0, 1, 1, 2}), P({4, 0, 0, 9})), 1.0);
  EXPECT_EQ(ari(Partition::singletons(5), Partition::all_in_one(5)), 0.0);
  EXPECT_EQ(ari(Partition::singletons(5), Partition::singletons(5)), 1.0);
  EXPECT_EQ(ari(Partition::all_in_one(5), Partition::all_in_one(5)), 1.0);
  EXPECT_THROW(ari(P({0}), P({0})), std::invalid_argument);
  EXPECT_THROW(ari(P({0, 1}), P({0, 1, 1})), std::invalid_argument);
}

TEST(Ari, MatchesPairLoopOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> size(2, 60);
  std::uniform_int_distribution<std::int64_t> groups(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = size(rng);
    const auto a = oracle::random_assignment(n, groups(rng), rng);
    const auto b = oracle::random_assignment(n, groups(rng), rng);
    EXPECT_NEAR(ari(Partition(a), Partition(b)), oracle::ari_pairs(a, b), 1e-12) << "trial " << trial;
  }
}

TEST(Ari, SymmetricAndRelabelInvariant) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_assignment(40, 5, rng);
    const auto b = oracle::random_assignment(40, 3, rng);
    auto relabeled = a;
    for (auto& x : relabeled) x = 100 - 3 * x;
    const double v = ari(Partition(a), Partition(b));
    EXPECT_EQ(v, ari(Partition(b), Partition(a)));
    EXPECT_EQ(v, ari(Partition(relabeled), Partition(b)));
    EXPECT_LE(v, 1.0);
  }
}

TEST(Ari, LargePartitionsStayExact) {
  // C(n, 2) products exceed 64 bits here.
  const std::size_t n = 200000;
  std::vector<std::int64_t> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<std::int64_t>(i % 7);
    b[i] = static_cast<std::int64_t>(i % 7);
  }
  EXPECT_EQ(ari(Partition(a), Partition(b)), 1.0);
  b[0] = 1;
  const double v = ari(Partition(a), Partition(b));
  EXPECT_LT(v, 1.0);
  EXPECT_GT(v, 0.9999);
}

TEST(AriMatrix, ZeroDiagonalAndSymmetric) {
  const std::vector<Partition> ps{P({0, 0, 1, 1}), P({0, 0, 1, 1}), P({0, 1, 0, 1})};
  const AriMatrix m = ari_matrix(ps);
  ASSERT_EQ(m.t, 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m(i, i), 0.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), m(j, i));
  }
  EXPECT_EQ(m(0, 1), 1.0);
  EXPECT_EQ(m(0, 2), ari(ps[0], ps[2]));
  EXPECT_THROW(ari_matrix(std::span<const Partition>(ps.data(), 1)), std::invalid_argument);
}
