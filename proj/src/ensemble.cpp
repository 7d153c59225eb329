#include "star/ensemble.hpp"

#include <stdexcept>

namespace star {

Ensemble Ensemble::prefix(std::size_t t) const {
  if (t == 0 || t > members.size()) throw std::invalid_argument("ensemble prefix: size out of range");
  Ensemble e;
  e.graph_fingerprint = graph_fingerprint;
  e.model = model;
  e.members.assign(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(t));
  e.seeds.assign(seeds.begin(), seeds.begin() + static_cast<std::ptrdiff_t>(std::min(t, seeds.size())));
  return e;
}

std::vector<Partition> Ensemble::partitions() const {
  std::vector<Partition> result;
  result.reserve(members.size());
  for (const auto& m : members) result.push_back(m.partition);
  return result;
}

}  // namespace star
