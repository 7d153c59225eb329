#include "star/partition.hpp"

#include <stdexcept>
#include <unordered_map>

namespace star {

Partition::Partition(std::span<const std::int64_t> raw) {
  if (raw.empty()) throw std::invalid_argument("partition: empty assignment");
  assignment_.resize(raw.size());
  std::unordered_map<std::int64_t, CommunityId> relabel;
  relabel.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(raw[i], static_cast<CommunityId>(relabel.size()));
    assignment_[i] = it->second;
  }
  k_ = relabel.size();
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::int64_t> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = static_cast<std::int64_t>(i);
  return Partition(raw);
}

Partition Partition::all_in_one(std::size_t n) {
  std::vector<std::int64_t> raw(n, 0);
  return Partition(raw);
}

std::vector<std::size_t> Partition::community_sizes() const {
  std::vector<std::size_t> sizes(k_, 0);
  for (CommunityId c : assignment_) ++sizes[c];
  return sizes;
}

Partition canonicalize(std::span<const std::int64_t> raw) { return Partition(raw); }

}  // namespace star
