#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "star/partition.hpp"

namespace star {

using NodeId = std::uint32_t;

// Input edge as read from a file or built by a generator.
struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  double weight = 1.0;
};

// One stored (ordered) adjacency entry. The positive and negative parts and
// the number of merged unit entries are kept separately so that aggregated
// graphs keep the per-sign strengths and the binary edge counts of the graph
// they came from. On a directly constructed graph one of pos/neg is zero and
// count is 1.
struct Entry {
  NodeId neighbor = 0;
  double pos = 0.0;
  double neg = 0.0;
  std::uint64_t count = 1;

  double weight() const noexcept { return pos - neg; }
};

enum class SignProfile { nonnegative, signed_weights };

struct NodeMarginals {
  std::vector<std::uint64_t> k_out, k_in;
  std::vector<double> s_out, s_in;
  std::vector<double> s_out_plus, s_out_minus, s_in_plus, s_in_minus;
};

struct Totals {
  std::uint64_t links = 0;  // L, ordered pairs
  double w_tot = 0.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
};

// Immutable weighted graph in CSR form. Undirected graphs are stored
// symmetrically: every (i, j, w) has its (j, i, w) twin and a self-loop is a
// single diagonal entry carrying its full weight.
class Graph {
 public:
  Graph() = default;

  // Sums duplicate (source, target) pairs; pairs summing to zero are dropped.
  // Throws std::invalid_argument for out-of-range endpoints, non-finite or
  // zero weights, or a label list whose length is not n.
  static Graph from_edges(std::size_t n, bool directed, std::span<const Edge> edges,
                          std::vector<std::string> labels = {});

  // One edge per nonzero entry. When undirected the matrix must be symmetric
  // within 1e-9 and is symmetrized by averaging.
  static Graph from_dense_matrix(const Eigen::MatrixXd& m, bool directed,
                                 std::vector<std::string> labels = {});

  std::size_t num_nodes() const noexcept { return n_; }
  bool directed() const noexcept { return directed_; }
  SignProfile sign_profile() const noexcept { return sign_profile_; }
  bool empty() const noexcept { return out_entries_.empty(); }
  std::size_t num_entries() const noexcept { return out_entries_.size(); }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::string label(NodeId v) const;

  std::span<const Entry> out(NodeId v) const {
    return {out_entries_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
  }
  std::span<const Entry> in(NodeId v) const {
    if (!directed_) return out(v);
    return {in_entries_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }

  // All stored entries as (source, target, net weight), sorted.
  std::vector<Edge> stored_edges() const;

 private:
  struct Arc {
    NodeId source;
    NodeId target;
    double pos;
    double neg;
    std::uint64_t count;
  };
  // Sorts and merges arcs channel-wise; arcs must already be symmetric when undirected.
  static Graph from_arcs(std::size_t n, bool directed, std::vector<Arc> arcs,
                         std::vector<std::string> labels);

  friend Graph aggregate_by_partition(const Graph& g, const Partition& p);

  std::size_t n_ = 0;
  bool directed_ = false;
  SignProfile sign_profile_ = SignProfile::nonnegative;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Entry> out_entries_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Entry> in_entries_;
  std::vector<std::string> labels_;
  std::uint64_t fingerprint_ = 0;
};

NodeMarginals node_marginals(const Graph& g);
Totals totals(const Graph& g);

// Supergraph with one node per community of `p`; intra-community weight
// becomes a self-loop. Throws std::invalid_argument if p.size() != n.
Graph aggregate_by_partition(const Graph& g, const Partition& p);

}  // namespace star
