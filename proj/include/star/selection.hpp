#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "star/ensemble.hpp"
#include "star/graph.hpp"
#include "star/louvain.hpp"
#include "star/partition_metrics.hpp"

namespace star {

enum class SelectionMethod { star, consensus, max_mod, most_frequent };

std::string_view to_string(SelectionMethod method);
SelectionMethod parse_selection_method(std::string_view text);

struct SelectionDiagnostics {
  std::vector<double> strengths;  // star
  std::size_t iterations = 0;     // consensus
  bool converged = true;          // consensus
  std::size_t multiplicity = 0;   // most_frequent
};

struct SelectionResult {
  SelectionMethod method = SelectionMethod::star;
  Partition partition;
  ModularityScore q;
  std::optional<std::size_t> source_index;  // absent for consensus
  SelectionDiagnostics diagnostics;
};

// Strength s_i = sum_j m(i, j) over the zero-diagonal ARI matrix; the winner
// has maximal strength, then highest Q, then lowest index.
// Throws std::invalid_argument when m does not match the ensemble.
SelectionResult star_select(const Ensemble& ens, const AriMatrix& m);

// Row sums of the similarity matrix. Each row is summed in sorted order so the
// value does not depend on the order of the ensemble members.
std::vector<double> star_strengths(const AriMatrix& m);

SelectionResult max_modularity_select(const Ensemble& ens);

// Frequency over canonical forms; ties by higher Q, then lowest index.
SelectionResult most_frequent_select(const Ensemble& ens);

// D_ij = fraction of partitions placing i and j together; D_ii = 1.
Eigen::MatrixXd consensus_matrix(std::span<const Partition> partitions);
Eigen::MatrixXd consensus_matrix(const Ensemble& ens);

struct ConsensusParams {
  double tau = 0.5;
  // 0: the size of the supplied ensemble (50 when there is none).
  std::size_t runs_per_iter = 0;
  int max_iters = 20;
  std::uint64_t seed = 0;
  // Use the supplied ensemble as the first iteration's partitions instead of fresh runs.
  bool reuse_ensemble = false;
  unsigned threads = 1;
  LouvainParams louvain;
};

// Iterated consensus clustering: run Louvain, build the consensus matrix, drop
// entries below tau, re-cluster the thresholded matrix, until every run of an
// iteration yields the same canonical partition. The returned Q is evaluated
// on `g` under `model`. Without convergence after max_iters the best-Q
// partition of the last iteration is returned with diagnostics.converged = false.
// Throws std::invalid_argument for graphs with negative weights.
SelectionResult consensus_cluster(const Graph& g, NullModel model, const ConsensusParams& params,
                                  const Ensemble* initial = nullptr);

}  // namespace star
