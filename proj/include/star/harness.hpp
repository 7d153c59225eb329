#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "star/benchgen.hpp"
#include "star/ensemble.hpp"
#include "star/graph.hpp"
#include "star/louvain.hpp"
#include "star/selection.hpp"

namespace star {

namespace fs = std::filesystem;

inline constexpr const char* kSweepHeader = "# star-sweep v1";

struct SweepConfig {
  LfrParams lfr;
  std::vector<double> mu_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t instances_per_mu = 10;
  std::size_t t_runs = 50;
  // STAR is also evaluated on the first t members for each t listed here;
  // the ensemble is grown to the largest t so smaller ones are prefixes.
  std::vector<std::size_t> extra_star_t;
  std::vector<SelectionMethod> methods{SelectionMethod::star, SelectionMethod::consensus, SelectionMethod::max_mod,
                                       SelectionMethod::most_frequent};
  std::uint64_t base_seed = 1;
  NullModel model = NullModel::configuration_weighted;
  LouvainParams louvain;
  ConsensusParams consensus;
  // Cells (mu, instance) run concurrently on this many threads.
  unsigned threads = 1;
  // Empty: nothing is written. Otherwise per-cell CSVs under cells/, plus
  // instances.csv and sweep.csv.
  fs::path output_dir;
  bool resume = true;
  // Also persist each instance's graph, truth and ensemble.
  bool keep_artifacts = false;

  void validate() const;
};

struct InstanceRow {
  double mu = 0.0;
  std::size_t instance = 0;
  std::uint64_t instance_seed = 0;
  SelectionMethod method = SelectionMethod::star;
  std::size_t t_runs = 0;
  double ari_truth = 0.0;
  double q = 0.0;
  std::size_t communities = 0;
  bool converged = true;
};

struct SweepRow {
  double mu = 0.0;
  SelectionMethod method = SelectionMethod::star;
  std::size_t t_runs = 0;
  double mean_ari_truth = 0.0;
  double std_ari_truth = 0.0;
  double mean_q = 0.0;
  double std_q = 0.0;
  std::size_t instances = 0;
};

struct SweepResult {
  std::vector<InstanceRow> instances;
  std::vector<SweepRow> rows;
};

// Seed of instance `i` at grid position `mu_index`.
std::uint64_t sweep_instance_seed(std::uint64_t base_seed, std::size_t mu_index, std::size_t instance);

// Runs every (mu, instance) cell: LFR instance, Louvain ensemble, each
// selector, ARI to the planted partition and Q. Deterministic given the
// config; thread count does not change any output.
SweepResult run_sweep(const SweepConfig& cfg);

// Mean and sample standard deviation per (mu, method, t), in first-seen order.
std::vector<SweepRow> aggregate_rows(const std::vector<InstanceRow>& rows);

std::string format_instance_rows(const std::vector<InstanceRow>& rows);
std::vector<InstanceRow> parse_instance_rows(const std::string& text);
std::string format_sweep_rows(const std::vector<SweepRow>& rows);

struct SkippedMethod {
  SelectionMethod method;
  std::string reason;
};

struct SelectionReport {
  std::vector<SelectionResult> selections;
  std::vector<SkippedMethod> skipped;
};

// Applies the requested selectors to a stored ensemble. Consensus on a
// signed graph or a signed/precomputed model is skipped with a reason.
SelectionReport select_all(const Graph& g, const Ensemble& ens, const std::vector<SelectionMethod>& methods,
                           const ConsensusParams& consensus);

struct PipelineConfig {
  NullModel model = NullModel::configuration_weighted;
  std::size_t t_runs = 150;
  std::vector<SelectionMethod> methods{SelectionMethod::star, SelectionMethod::consensus, SelectionMethod::max_mod};
  std::uint64_t seed = 1;
  unsigned threads = 1;
  LouvainParams louvain;
  ConsensusParams consensus;
  std::size_t histogram_bins = 20;
  fs::path output_dir;  // empty: nothing written
};

struct PipelineResult {
  Ensemble ensemble;
  SelectionReport report;
};

// Ensemble, selections, and (with an output_dir) ensemble/, one partition
// file per method, diagnostics.json and q_histogram.csv.
PipelineResult run_select_pipeline(const Graph& g, const PipelineConfig& cfg);

// Writes the per-method partitions, diagnostics.json and q_histogram.csv.
void write_selection_outputs(const fs::path& dir, const Graph& g, const Ensemble& ens, const SelectionReport& report,
                             std::size_t histogram_bins);

std::string diagnostics_json(const Graph& g, const Ensemble& ens, const SelectionReport& report);
std::string q_histogram_csv(const Ensemble& ens, std::size_t bins);

}  // namespace star
