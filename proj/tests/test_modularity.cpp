#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "oracles.hpp"
#include "star/ensemble.hpp"
#include "star/modularity.hpp"

using namespace star;

namespace {

const Partition kPlanted(std::vector<std::int64_t>{0, 0, 0, 1, 1, 1});

Graph two_triangles() { return Graph::from_edges(6, false, oracle::two_triangles()); }

}  // namespace

TEST(Modularity, ExpectedWeightExamples) {
  const Graph g = two_triangles();
  EXPECT_NEAR(expected_weight(node_marginals(g), NullModel::configuration_binary, 2, 3).positive, 9.0 / 14.0, 1e-15);

  const std::vector<Edge> e{{0, 1, 2.0}, {1, 0, 3.0}};
  const Graph d = Graph::from_edges(2, true, e);
  EXPECT_NEAR(expected_weight(node_marginals(d), NullModel::configuration_weighted, 0, 1).positive, 1.8, 1e-15);

  // No negative weights: the negative channel is empty and contributes 0.
  const ExpectedWeight s = expected_weight(node_marginals(g), NullModel::signed_configuration, 2, 3);
  EXPECT_EQ(s.negative, 0.0);
  EXPECT_NEAR(s.positive, 9.0 / 14.0, 1e-15);
}

TEST(Modularity, TwoTrianglePlanted) {
  const Graph g = two_triangles();
  const auto w = oracle::dense_weights(6, false, oracle::two_triangles());
  const double oracle_q = oracle::modularity(w, {0, 0, 0, 1, 1, 1}, NullModel::configuration_binary);
  EXPECT_NEAR(oracle_q, 5.0 / 14.0, 1e-15);
  const ModularityScore s = modularity(g, kPlanted, NullModel::configuration_binary);
  EXPECT_NEAR(s.q, 5.0 / 14.0, 1e-15);
  EXPECT_EQ(s.model, NullModel::configuration_binary);
  EXPECT_EQ(s.graph_fingerprint, g.fingerprint());
}

TEST(Modularity, AllInOneIsZero) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto edges = oracle::random_edges(30, 0.15, true, false, rng);
    const Graph g = Graph::from_edges(30, true, edges);
    EXPECT_NEAR(modularity(g, Partition::all_in_one(30), NullModel::configuration_weighted).q, 0.0, 1e-12);
    EXPECT_NEAR(modularity(g, Partition::all_in_one(30), NullModel::signed_configuration).q, 0.0, 1e-12);
  }
}

TEST(Modularity, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(2);
  const NullModel models[] = {NullModel::configuration_binary, NullModel::configuration_weighted,
                              NullModel::signed_configuration, NullModel::precomputed};
  for (int trial = 0; trial < 80; ++trial) {
    const NullModel model = models[trial % 4];
    const bool directed = (trial / 4) % 2 == 0;
    const bool negative = model == NullModel::signed_configuration || model == NullModel::precomputed;
    auto edges = oracle::random_edges(20, 0.25, directed, negative, rng);
    if (model == NullModel::configuration_binary)
      for (auto& e : edges) e.weight = 1.0;
    const Graph g = Graph::from_edges(20, directed, edges);
    const auto a = oracle::random_assignment(20, 1 + trial % 5, rng);
    const double expected = oracle::modularity(oracle::dense_weights(20, directed, edges), a, model);
    EXPECT_NEAR(modularity(g, Partition(a), model).q, expected, 1e-12) << "trial " << trial;
  }
}

TEST(Modularity, SignedReducesToWeighted) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto edges = oracle::random_edges(25, 0.2, trial % 2 == 0, false, rng);
    const Graph g = Graph::from_edges(25, trial % 2 == 0, edges);
    const Partition p(oracle::random_assignment(25, 3, rng));
    EXPECT_NEAR(modularity(g, p, NullModel::signed_configuration).q,
                modularity(g, p, NullModel::configuration_weighted).q, 1e-12);
  }
}

TEST(Modularity, LabelInvarianceAndUpperBound) {
  std::mt19937_64 rng(4);
  const auto edges = oracle::random_edges(30, 0.2, false, false, rng);
  const Graph g = Graph::from_edges(30, false, edges);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = oracle::random_assignment(30, 4, rng);
    auto relabeled = a;
    for (auto& c : relabeled) c = 7 - c * 2;
    const double q = modularity(g, Partition(a), NullModel::configuration_weighted).q;
    EXPECT_DOUBLE_EQ(q, modularity(g, Partition(relabeled), NullModel::configuration_weighted).q);
    EXPECT_LE(q, 1.0);
  }
}

TEST(Modularity, IncompatibleModelsRejected) {
  std::vector<Edge> e{{0, 1, 2.0}, {1, 2, 1.0}};
  EXPECT_THROW(modularity(Graph::from_edges(3, false, e), Partition::singletons(3), NullModel::configuration_binary),
               std::invalid_argument);
  e[0].weight = -1.0;
  EXPECT_THROW(modularity(Graph::from_edges(3, false, e), Partition::singletons(3), NullModel::configuration_weighted),
               std::invalid_argument);
  EXPECT_NO_THROW(modularity(Graph::from_edges(3, false, e), Partition::singletons(3), NullModel::signed_configuration));
  EXPECT_THROW(modularity(Graph::from_edges(3, false, {}), Partition::singletons(3), NullModel::configuration_weighted),
               std::invalid_argument);
}

TEST(Modularity, ScoresFromDifferentModelsDoNotCompare) {
  const Graph g = two_triangles();
  const auto a = modularity(g, kPlanted, NullModel::configuration_binary);
  const auto b = modularity(g, kPlanted, NullModel::configuration_weighted);
  EXPECT_THROW(q_difference(a, b), std::invalid_argument);
  EXPECT_EQ(q_difference(a, a), 0.0);
}

TEST(Modularity, DeltaMoveExamples) {
  const Graph g = two_triangles();
  ModularityState state(g, NullModel::configuration_binary);
  EXPECT_EQ(delta_modularity_move(g, state, 1, 1, 1), 0.0);
  const double expected = 2.0 * (1.0 - 2.0 * 2.0 / 14.0) / 14.0;
  EXPECT_NEAR(delta_modularity_move(g, state, 1, 1, 0), expected, 1e-15);
  EXPECT_NEAR(expected, 0.102041, 1e-6);
  EXPECT_THROW(delta_modularity_move(g, state, 1, 0, 2), std::invalid_argument);
  const Graph other = Graph::from_edges(6, false, std::vector<Edge>{{0, 1, 1.0}});
  EXPECT_THROW(delta_modularity_move(other, state, 1, 1, 0), std::invalid_argument);
}

TEST(Modularity, DeltaMoveMatchesFullEvaluation) {
  std::mt19937_64 rng(6);
  const NullModel models[] = {NullModel::configuration_binary, NullModel::configuration_weighted,
                              NullModel::signed_configuration, NullModel::precomputed};
  int checked = 0;
  for (int g_trial = 0; g_trial < 20; ++g_trial) {
    const NullModel model = models[g_trial % 4];
    const bool directed = g_trial % 3 == 0;
    const bool negative = model == NullModel::signed_configuration || model == NullModel::precomputed;
    auto edges = oracle::random_edges(30, 0.15, directed, negative, rng);
    if (model == NullModel::configuration_binary)
      for (auto& e : edges) e.weight = 1.0;
    const Graph g = Graph::from_edges(30, directed, edges);
    auto a = oracle::random_assignment(30, 5, rng);
    ModularityState state(g, model, Partition(a));
    std::vector<CommunityId> current = state.membership();
    std::uniform_int_distribution<NodeId> node(0, 29);
    std::uniform_int_distribution<CommunityId> comm(0, 29);
    for (int move = 0; move < 50; ++move) {
      const NodeId v = node(rng);
      const CommunityId from = current[v];
      const CommunityId to = comm(rng);
      const double before = modularity(g, canonicalize_ids<CommunityId>(current), model).q;
      const double delta = delta_modularity_move(g, state, v, from, to);
      state.move(v, to);
      current[v] = to;
      const double after = modularity(g, canonicalize_ids<CommunityId>(current), model).q;
      EXPECT_NEAR(delta, after - before, 1e-10);
      EXPECT_NEAR(state.q(g), after, 1e-10);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1000);
}

TEST(Modularity, EpsilonOptimalSet) {
  Ensemble ens;
  for (double q : {0.30, 0.29, 0.10}) ens.members.push_back({Partition::singletons(2), {q, NullModel::configuration_weighted, 0}});
  EXPECT_EQ(epsilon_optimal_set(ens, 0.02), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(epsilon_optimal_set(ens, 0.0), (std::vector<std::size_t>{0}));
  EXPECT_EQ(epsilon_optimal_set(ens, std::numeric_limits<double>::infinity()), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(epsilon_optimal_set(ens, -0.1), std::invalid_argument);
}
