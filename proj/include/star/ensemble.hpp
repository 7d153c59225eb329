#pragma once

#include <cstdint>
#include <vector>

#include "star/modularity.hpp"
#include "star/partition.hpp"

namespace star {

struct EnsembleMember {
  Partition partition;
  ModularityScore score;
};

// T optimizer outputs on one graph under one null model, ordered by member index.
struct Ensemble {
  std::uint64_t graph_fingerprint = 0;
  NullModel model = NullModel::configuration_weighted;
  std::vector<EnsembleMember> members;
  std::vector<std::uint64_t> seeds;

  std::size_t size() const noexcept { return members.size(); }
  // First `t` members, as if the ensemble had been generated with t runs.
  Ensemble prefix(std::size_t t) const;
  std::vector<Partition> partitions() const;
};

}  // namespace star
