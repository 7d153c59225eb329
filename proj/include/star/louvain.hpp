#pragma once

#include <cstdint>
#include <vector>

#include "star/ensemble.hpp"
#include "star/graph.hpp"
#include "star/modularity.hpp"
#include "star/partition.hpp"

namespace star {

enum class NodeOrder { shuffled, fixed };

struct LouvainParams {
  std::uint64_t seed = 0;
  // A level stops sweeping once a whole sweep gains less than this.
  double min_gain = 1e-7;
  int max_levels = 64;
  NodeOrder node_order = NodeOrder::shuffled;
  // Finish with single-node moves on the original graph until no move to any
  // community (or to a new one) gains more than min_gain.
  bool refine = true;
};

struct LouvainResult {
  Partition partition;
  ModularityScore score;
  // Modularity of the flat partition after each level, then after refinement.
  std::vector<double> level_q;
};

// One seeded Louvain run. Deterministic in (g, model, params).
// Throws std::invalid_argument for an incompatible model or an empty graph.
LouvainResult louvain_once(const Graph& g, NullModel model, const LouvainParams& params = {});

// Member i runs with seed split_seed(base_seed, i). Members are independent and
// may run on `threads` workers (0 = hardware concurrency); the result does not
// depend on the thread count.
Ensemble run_ensemble(const Graph& g, NullModel model, std::size_t t, std::uint64_t base_seed,
                      unsigned threads = 0, LouvainParams params = {});

}  // namespace star
