#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "star/harness.hpp"
#include "star/io.hpp"
#include "star/rng.hpp"

using namespace star;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("star_harness_" + name);
  fs::remove_all(p);
  return p;
}

SweepConfig small_sweep() {
  SweepConfig cfg;
  cfg.lfr.n = 200;
  cfg.lfr.max_deg = 30;
  cfg.lfr.avg_deg = 12;
  cfg.lfr.cmax = 40;
  cfg.mu_grid = {0.2, 0.6};
  cfg.instances_per_mu = 2;
  cfg.t_runs = 6;
  cfg.extra_star_t = {10};
  cfg.consensus.max_iters = 5;
  return cfg;
}

}  // namespace

TEST(Harness, SeedDerivation) {
  EXPECT_EQ(sweep_instance_seed(1, 2, 3), split_seed(split_seed(1, 2), 3));
  EXPECT_NE(sweep_instance_seed(1, 0, 1), sweep_instance_seed(1, 1, 0));
}

TEST(Harness, ConfigValidation) {
  SweepConfig cfg = small_sweep();
  cfg.t_runs = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = small_sweep();
  cfg.mu_grid = {1.5};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Harness, SweepRowsAndAggregates) {
  const SweepResult r = run_sweep(small_sweep());
  // 4 methods plus the extra STAR size, per cell.
  ASSERT_EQ(r.instances.size(), 2u * 2u * 5u);
  ASSERT_EQ(r.rows.size(), 2u * 5u);
  for (const SweepRow& row : r.rows) {
    EXPECT_EQ(row.instances, 2u);
    double sum = 0, sq = 0;
    std::vector<double> xs;
    for (const InstanceRow& i : r.instances)
      if (i.mu == row.mu && i.method == row.method && i.t_runs == row.t_runs) xs.push_back(i.ari_truth);
    ASSERT_EQ(xs.size(), 2u);
    for (double x : xs) sum += x;
    const double mean = sum / 2;
    for (double x : xs) sq += (x - mean) * (x - mean);
    EXPECT_NEAR(row.mean_ari_truth, mean, 1e-12);
    EXPECT_NEAR(row.std_ari_truth, std::sqrt(sq), 1e-12);
  }
  EXPECT_EQ(parse_instance_rows(format_instance_rows(r.instances)).size(), r.instances.size());
  EXPECT_EQ(format_instance_rows(parse_instance_rows(format_instance_rows(r.instances))),
            format_instance_rows(r.instances));
}

TEST(Harness, SweepFilesDeterministicAndResumable) {
  SweepConfig cfg = small_sweep();
  cfg.output_dir = fresh_dir("a");
  run_sweep(cfg);
  const std::string first = read_file(cfg.output_dir / "sweep.csv");
  const std::string instances = read_file(cfg.output_dir / "instances.csv");
  EXPECT_EQ(first.rfind(kSweepHeader, 0), 0u);

  SweepConfig threaded = cfg;
  threaded.output_dir = fresh_dir("b");
  threaded.threads = 3;
  run_sweep(threaded);
  EXPECT_EQ(read_file(threaded.output_dir / "sweep.csv"), first);
  EXPECT_EQ(read_file(threaded.output_dir / "instances.csv"), instances);

  // Resume: drop one cell and rerun; everything else is read back.
  fs::remove(cfg.output_dir / "cells" / "mu0.6000_i00001.csv");
  run_sweep(cfg);
  EXPECT_TRUE(fs::exists(cfg.output_dir / "cells" / "mu0.6000_i00001.csv"));
  EXPECT_EQ(read_file(cfg.output_dir / "sweep.csv"), first);

  // A different base seed invalidates stored cells.
  SweepConfig reseeded = cfg;
  reseeded.base_seed = 2;
  EXPECT_NE(format_sweep_rows(run_sweep(reseeded).rows), first);
  fs::remove_all(cfg.output_dir);
  fs::remove_all(threaded.output_dir);
}

TEST(Harness, PipelineWritesOutputs) {
  const Graph g = Graph::from_edges(6, false, oracle::two_triangles());
  PipelineConfig cfg;
  cfg.model = NullModel::configuration_binary;
  cfg.t_runs = 8;
  cfg.methods = {SelectionMethod::star, SelectionMethod::consensus, SelectionMethod::max_mod,
                 SelectionMethod::most_frequent};
  cfg.output_dir = fresh_dir("pipeline");
  const PipelineResult r = run_select_pipeline(g, cfg);
  ASSERT_EQ(r.report.selections.size(), 4u);
  for (const SelectionResult& s : r.report.selections) {
    EXPECT_EQ(s.partition, Partition(std::vector<std::int64_t>{0, 0, 0, 1, 1, 1}));
    EXPECT_TRUE(fs::exists(cfg.output_dir / ("partition_" + std::string(to_string(s.method)) + ".txt")));
  }
  EXPECT_TRUE(fs::exists(cfg.output_dir / "diagnostics.json"));
  EXPECT_TRUE(fs::exists(cfg.output_dir / "q_histogram.csv"));
  EXPECT_EQ(load_ensemble(cfg.output_dir / "ensemble", g).size(), 8u);
  fs::remove_all(cfg.output_dir);
}

TEST(Harness, ConsensusSkippedOnPrecomputedInput) {
  Eigen::MatrixXd m(4, 4);
  m << 0, 0.5, -0.2, -0.1, 0.5, 0, -0.1, -0.3, -0.2, -0.1, 0, 0.6, -0.1, -0.3, 0.6, 0;
  const Graph g = Graph::from_dense_matrix(m, false);
  PipelineConfig cfg;
  cfg.model = NullModel::precomputed;
  cfg.t_runs = 4;
  const PipelineResult r = run_select_pipeline(g, cfg);
  ASSERT_EQ(r.report.skipped.size(), 1u);
  EXPECT_EQ(r.report.skipped[0].method, SelectionMethod::consensus);
  EXPECT_EQ(r.report.selections.size(), 2u);
  EXPECT_EQ(r.report.selections[0].partition, Partition(std::vector<std::int64_t>{0, 0, 1, 1}));
}

TEST(Harness, QHistogram) {
  Ensemble ens;
  for (double q : {0.1, 0.2, 0.2, 0.3})
    ens.members.push_back({Partition::singletons(2), {q, NullModel::configuration_weighted, 0}});
  EXPECT_EQ(q_histogram_csv(ens, 1), "bin_lo,bin_hi,count\n0.100000,0.300000,4\n");
  EXPECT_THROW(q_histogram_csv(ens, 0), std::invalid_argument);
}
