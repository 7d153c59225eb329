#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace star {

using CommunityId = std::uint32_t;

// Assignment of every node to a community. Always held in canonical form:
// ids are 0..k-1, numbered by first appearance in node order.
class Partition {
 public:
  Partition() = default;

  // Canonicalizes `raw`. Throws std::invalid_argument on an empty assignment.
  explicit Partition(std::span<const std::int64_t> raw);
  static Partition singletons(std::size_t n);
  static Partition all_in_one(std::size_t n);

  std::size_t size() const noexcept { return assignment_.size(); }
  std::size_t num_communities() const noexcept { return k_; }
  CommunityId operator[](std::size_t node) const { return assignment_[node]; }
  const std::vector<CommunityId>& assignment() const noexcept { return assignment_; }

  // Node count per community, indexed by community id.
  std::vector<std::size_t> community_sizes() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) {
    return a.assignment_ <=> b.assignment_;
  }

 private:
  std::vector<CommunityId> assignment_;
  std::size_t k_ = 0;
};

// Relabels by first appearance. Idempotent.
Partition canonicalize(std::span<const std::int64_t> raw);

template <typename Int>
Partition canonicalize_ids(std::span<const Int> raw) {
  std::vector<std::int64_t> wide(raw.begin(), raw.end());
  return Partition(wide);
}

}  // namespace star
