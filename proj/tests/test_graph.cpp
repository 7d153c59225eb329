#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "star/errors.hpp"
#include "star/graph.hpp"
#include "star/io.hpp"
#include "star/modularity.hpp"

using namespace star;

TEST(Graph, DirectedEdgeListTranscribed) {
  const Graph g = parse_edge_list("a b 2.0\nb a 3.0\n", true);
  ASSERT_EQ(g.num_nodes(), 2u);
  ASSERT_EQ(g.num_entries(), 2u);
  EXPECT_EQ(g.labels(), (std::vector<std::string>{"a", "b"}));
  const auto edges = g.stored_edges();
  EXPECT_EQ(edges[0].source, 0u);
  EXPECT_EQ(edges[0].target, 1u);
  EXPECT_DOUBLE_EQ(edges[0].weight, 2.0);
  EXPECT_DOUBLE_EQ(edges[1].weight, 3.0);
}

TEST(Graph, DuplicatesAreSummed) {
  const Graph g = parse_edge_list("a b 1.0\na b 2.0\n", true);
  ASSERT_EQ(g.num_entries(), 1u);
  EXPECT_DOUBLE_EQ(g.stored_edges()[0].weight, 3.0);
}

TEST(Graph, DelimitersAndComments) {
  const Graph tabs = parse_edge_list("# header comment\nx\ty\t1.5\ny\tz\t2\n", false);
  const Graph commas = parse_edge_list("x,y,1.5\n\ny,z,2\n", false);
  const Graph blanks = parse_edge_list("x  y 1.5\ny z   2\n", false);
  EXPECT_EQ(tabs.fingerprint(), commas.fingerprint());
  EXPECT_EQ(tabs.fingerprint(), blanks.fingerprint());
  EXPECT_EQ(parse_edge_list("p q\nq r\n", false).num_entries(), 4u);
}

TEST(Graph, BadLinesReportLineNumbers) {
  try {
    parse_edge_list("a b 1\n# c\nb c nan\n", false);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_edge_list("a b 1\nb c 0\n", false), DataError);
  EXPECT_THROW(parse_edge_list("a b 1\nb c inf\n", false), DataError);
  EXPECT_THROW(parse_edge_list("a b 1\nb\n", false), DataError);
  EXPECT_THROW(parse_edge_list("a b 1\nb c 1 2\n", false), DataError);
  EXPECT_THROW(parse_edge_list("a b 1\nb c x\n", false), DataError);
}

TEST(Graph, DenseMatrix) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const Graph g = Graph::from_dense_matrix(m, false);
  EXPECT_EQ(g.num_entries(), 2u);  // one undirected edge, stored both ways
  EXPECT_EQ(g.sign_profile(), SignProfile::nonnegative);

  m << 0, -0.5, -0.5, 0;
  EXPECT_EQ(Graph::from_dense_matrix(m, false).sign_profile(), SignProfile::signed_weights);

  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  EXPECT_THROW(Graph::from_dense_matrix(rect, false), std::invalid_argument);
  m << 0, 1, 0.5, 0;
  EXPECT_THROW(Graph::from_dense_matrix(m, false), std::invalid_argument);
  EXPECT_NO_THROW(Graph::from_dense_matrix(m, true));
  m << 0, std::nan(""), 1, 0;
  EXPECT_THROW(Graph::from_dense_matrix(m, true), std::invalid_argument);
}

TEST(Graph, TwoTriangleMarginalsAndTotals) {
  const Graph g = Graph::from_edges(6, false, oracle::two_triangles());
  const NodeMarginals m = node_marginals(g);
  EXPECT_EQ(m.k_out, (std::vector<std::uint64_t>{2, 2, 3, 3, 2, 2}));
  EXPECT_EQ(m.k_in, m.k_out);
  const Totals t = totals(g);
  EXPECT_EQ(t.links, 14u);
  EXPECT_DOUBLE_EQ(t.w_tot, 14.0);
}

TEST(Graph, DirectedStrengths) {
  const std::vector<Edge> e{{0, 1, 2.0}, {1, 0, 3.0}};
  const NodeMarginals m = node_marginals(Graph::from_edges(2, true, e));
  EXPECT_EQ(m.s_out, (std::vector<double>{2, 3}));
  EXPECT_EQ(m.s_in, (std::vector<double>{3, 2}));
}

TEST(Graph, EmptyAndSignedTotals) {
  const Totals empty = totals(Graph::from_edges(3, false, {}));
  EXPECT_EQ(empty.links, 0u);
  EXPECT_EQ(empty.w_tot, 0.0);
  EXPECT_EQ(empty.w_plus, 0.0);
  EXPECT_EQ(empty.w_minus, 0.0);

  const std::vector<Edge> e{{0, 1, 1.0}, {1, 0, -0.5}};
  const Totals t = totals(Graph::from_edges(2, true, e));
  EXPECT_EQ(t.links, 2u);
  EXPECT_DOUBLE_EQ(t.w_tot, 0.5);
  EXPECT_DOUBLE_EQ(t.w_plus, 1.0);
  EXPECT_DOUBLE_EQ(t.w_minus, 0.5);
}

TEST(Graph, MarginalSumsMatchTotals) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto edges = oracle::random_edges(50, 0.1, true, trial % 2 == 1, rng);
    const Graph g = Graph::from_edges(50, true, edges);
    const NodeMarginals m = node_marginals(g);
    const Totals t = totals(g);
    std::uint64_t kin = 0, kout = 0;
    double sin = 0, sout = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      kin += m.k_in[i];
      kout += m.k_out[i];
      sin += m.s_in[i];
      sout += m.s_out[i];
      EXPECT_NEAR(m.s_out[i], m.s_out_plus[i] - m.s_out_minus[i], 1e-12);
      EXPECT_NEAR(m.s_in[i], m.s_in_plus[i] - m.s_in_minus[i], 1e-12);
    }
    EXPECT_EQ(kin, t.links);
    EXPECT_EQ(kout, t.links);
    EXPECT_NEAR(sin, t.w_tot, 1e-9);
    EXPECT_NEAR(sout, t.w_tot, 1e-9);
    EXPECT_NEAR(t.w_tot, t.w_plus - t.w_minus, 1e-9);
  }
}

TEST(Graph, UndirectedSelfLoopStoredOnce) {
  const std::vector<Edge> e{{0, 0, 2.5}, {0, 1, 1.0}};
  const Graph g = Graph::from_edges(2, false, e);
  EXPECT_EQ(g.num_entries(), 3u);
  EXPECT_DOUBLE_EQ(node_marginals(g).s_out[0], 3.5);
}

TEST(Graph, AggregateTwoTriangles) {
  const Graph g = Graph::from_edges(6, false, oracle::two_triangles());
  const Graph h = aggregate_by_partition(g, Partition(std::vector<std::int64_t>{0, 0, 0, 1, 1, 1}));
  ASSERT_EQ(h.num_nodes(), 2u);
  double self0 = 0, cross = 0;
  for (const Entry& e : h.out(0)) {
    if (e.neighbor == 0) self0 = e.weight();
    else cross = e.weight();
  }
  EXPECT_DOUBLE_EQ(self0, 6.0);
  EXPECT_DOUBLE_EQ(cross, 1.0);
  EXPECT_THROW(aggregate_by_partition(g, Partition::singletons(5)), std::invalid_argument);
}

TEST(Graph, AggregateSingletonsIsIdentity) {
  const Graph g = Graph::from_edges(6, false, oracle::two_triangles());
  const Graph h = aggregate_by_partition(g, Partition::singletons(6));
  EXPECT_EQ(h.num_entries(), g.num_entries());
  EXPECT_EQ(h.fingerprint(), Graph::from_edges(6, false, oracle::two_triangles()).fingerprint());
}

TEST(Graph, AggregationPreservesModularity) {
  std::mt19937_64 rng(9);
  const NullModel models[] = {NullModel::configuration_binary, NullModel::configuration_weighted,
                              NullModel::signed_configuration};
  for (int trial = 0; trial < 30; ++trial) {
    const bool directed = trial % 2 == 0;
    const NullModel model = models[trial % 3];
    auto edges = oracle::random_edges(25, 0.2, directed, model == NullModel::signed_configuration, rng);
    if (model == NullModel::configuration_binary)
      for (auto& e : edges) e.weight = 1.0;
    const Graph g = Graph::from_edges(25, directed, edges);
    const Partition p(oracle::random_assignment(25, 4, rng));
    const Graph h = aggregate_by_partition(g, p);
    const double direct = modularity(g, p, model).q;
    const double coarse = modularity(h, Partition::singletons(h.num_nodes()), model).q;
    EXPECT_NEAR(direct, coarse, 1e-9) << "trial " << trial;
  }
}

TEST(Graph, EdgeListRoundTrip) {
  const std::string text = "u v 0.1\nv w 123456.789012\nw u -2.5\nu u 3e-7\n";
  for (bool directed : {false, true}) {
    const Graph g = parse_edge_list(text, directed);
    const Graph back = parse_edge_list(format_edge_list(g), directed);
    EXPECT_EQ(g.fingerprint(), back.fingerprint());
    EXPECT_EQ(format_edge_list(g), format_edge_list(back));
  }
}
