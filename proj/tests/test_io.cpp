#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "star/errors.hpp"
#include "star/io.hpp"
#include "star/louvain.hpp"

using namespace star;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("star_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST(Io, FormatReal) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(std::stod(format_real(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_fixed6(0.2424242), "0.242424");
}

TEST(Io, EdgeListHeaderLineIsSkipped) {
  const Graph g = parse_edge_list("source,target,weight\na,b,2\n", false);
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.labels(), (std::vector<std::string>{"a", "b"}));
}

TEST(Io, PartitionRoundTrip) {
  TempDir tmp;
  const Graph g = parse_edge_list("x y\ny z\nz w\n", false);
  const Partition p(std::vector<std::int64_t>{0, 0, 1, 1});
  save_partition(tmp.path() / "p.txt", p, g.labels());
  EXPECT_EQ(load_partition(tmp.path() / "p.txt", g.labels()), p);

  // Order in the file does not matter when labels are given.
  write_text(tmp.path() / "q.txt", "w 4\nz 4\ny 9\nx 9\n");
  EXPECT_EQ(load_partition(tmp.path() / "q.txt", g.labels()), p);
  write_text(tmp.path() / "bad.txt", "x 1\nv 2\n");
  EXPECT_THROW(load_partition(tmp.path() / "bad.txt", g.labels()), DataError);
  write_text(tmp.path() / "short.txt", "x 1\ny 1\n");
  EXPECT_THROW(load_partition(tmp.path() / "short.txt", g.labels()), DataError);
}

TEST(Io, EnsembleRoundTripRevalidatesQ) {
  TempDir tmp;
  const Graph g = Graph::from_edges(6, false, oracle::two_triangles());
  const Ensemble ens = run_ensemble(g, NullModel::configuration_binary, 5, 11, 1);
  save_ensemble(tmp.path() / "ens", ens, g);
  const Ensemble back = load_ensemble(tmp.path() / "ens", g);
  ASSERT_EQ(back.size(), 5u);
  EXPECT_EQ(back.model, ens.model);
  EXPECT_EQ(back.seeds, ens.seeds);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.members[i].partition, ens.members[i].partition);
    EXPECT_EQ(back.members[i].score.q, ens.members[i].score.q);
  }

  // Another graph: fingerprint mismatch.
  const Graph other = Graph::from_edges(6, false, std::vector<Edge>{{0, 1, 1.0}, {2, 3, 1.0}});
  EXPECT_THROW(load_ensemble(tmp.path() / "ens", other), DataError);

  // Tampered member: stored Q no longer matches.
  write_text(tmp.path() / "ens" / "member_0002.txt", "0 0\n1 1\n2 0\n3 1\n4 0\n5 1\n");
  EXPECT_THROW(load_ensemble(tmp.path() / "ens", g), DataError);
}

TEST(Io, DenseCsvRoundTrip) {
  TempDir tmp;
  Eigen::MatrixXd m(3, 3);
  m << 0, 0.25, -1e-9, 0.25, 0, 3, -1e-9, 3, 0;
  save_dense_csv(tmp.path() / "m.csv", m, {"a", "b", "c"});
  const LabeledMatrix back = load_dense_csv(tmp.path() / "m.csv");
  EXPECT_EQ(back.values, m);
  EXPECT_EQ(back.row_labels, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(back.col_labels, back.row_labels);
  save_dense_csv(tmp.path() / "plain.csv", m);
  EXPECT_EQ(load_dense_csv(tmp.path() / "plain.csv").values, m);
  EXPECT_EQ(Graph::from_dense_matrix(back.values, false).fingerprint(),
            Graph::from_dense_matrix(m, false).fingerprint());
  write_text(tmp.path() / "ragged.csv", "1,2\n3\n");
  EXPECT_THROW(load_dense_csv(tmp.path() / "ragged.csv"), DataError);
}

TEST(Io, PricesCsv) {
  TempDir tmp;
  write_text(tmp.path() / "prices.csv", "date,AAA,BBB\n2020-01-02,10,20\n2020-01-03,,21\n2020-01-06,11,22\n");
  const LabeledMatrix p = load_prices_csv(tmp.path() / "prices.csv");
  EXPECT_EQ(p.row_labels, (std::vector<std::string>{"AAA", "BBB"}));
  ASSERT_EQ(p.values.rows(), 2);
  ASSERT_EQ(p.values.cols(), 3);
  EXPECT_TRUE(std::isnan(p.values(0, 1)));
  EXPECT_EQ(p.values(1, 2), 22.0);
  write_text(tmp.path() / "bad.csv", "AAA\n1\nx\n");
  EXPECT_THROW(load_prices_csv(tmp.path() / "bad.csv"), DataError);
}
