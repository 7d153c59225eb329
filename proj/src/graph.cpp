#include "star/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace star {
namespace {

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (v >> (8 * i)) & 0xffU;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

Graph Graph::from_edges(std::size_t n, bool directed, std::span<const Edge> edges,
                        std::vector<std::string> labels) {
  std::vector<Edge> arcs;
  arcs.reserve(directed ? edges.size() : 2 * edges.size());
  for (const Edge& e : edges) {
    if (e.source >= n || e.target >= n) {
      throw std::invalid_argument("graph: edge endpoint out of range (" + std::to_string(e.source) +
                                  ", " + std::to_string(e.target) + ") for n = " + std::to_string(n));
    }
    if (!std::isfinite(e.weight)) throw std::invalid_argument("graph: non-finite edge weight");
    if (e.weight == 0.0) throw std::invalid_argument("graph: zero-weight edge (zero encodes absence)");
    arcs.push_back(e);
    if (!directed && e.source != e.target) arcs.push_back({e.target, e.source, e.weight});
  }
  std::sort(arcs.begin(), arcs.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });

  // Duplicates are merged on the net weight; only the result is split by sign.
  std::vector<Arc> merged;
  merged.reserve(arcs.size());
  for (std::size_t i = 0; i < arcs.size();) {
    std::size_t j = i;
    double w = 0.0;
    while (j < arcs.size() && arcs[j].source == arcs[i].source && arcs[j].target == arcs[i].target) {
      w += arcs[j].weight;
      ++j;
    }
    if (w != 0.0) {
      merged.push_back({arcs[i].source, arcs[i].target, std::max(w, 0.0), std::max(-w, 0.0), 1});
    }
    i = j;
  }
  return from_arcs(n, directed, std::move(merged), std::move(labels));
}

Graph Graph::from_dense_matrix(const Eigen::MatrixXd& m, bool directed,
                               std::vector<std::string> labels) {
  if (m.rows() != m.cols()) throw std::invalid_argument("graph: matrix is not square");
  if (m.hasNaN()) throw std::invalid_argument("graph: matrix contains NaN");
  if (!m.allFinite()) throw std::invalid_argument("graph: matrix contains infinite entries");
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double w = m(i, j);
      if (!directed) {
        if (j < i) continue;
        if (std::abs(m(i, j) - m(j, i)) > 1e-9) {
          throw std::invalid_argument("graph: matrix not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");
        }
        w = 0.5 * (m(i, j) + m(j, i));
      }
      if (w != 0.0) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), w});
    }
  }
  return from_edges(n, directed, edges, std::move(labels));
}

Graph Graph::from_arcs(std::size_t n, bool directed, std::vector<Arc> arcs,
                       std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != n) {
    throw std::invalid_argument("graph: label count does not match node count");
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });

  Graph g;
  g.n_ = n;
  g.directed_ = directed;
  g.labels_ = std::move(labels);
  g.out_offsets_.assign(n + 1, 0);
  g.out_entries_.reserve(arcs.size());

  std::vector<std::size_t> out_counts(n, 0);
  for (std::size_t i = 0; i < arcs.size();) {
    Arc sum = arcs[i];
    std::size_t j = i + 1;
    while (j < arcs.size() && arcs[j].source == sum.source && arcs[j].target == sum.target) {
      sum.pos += arcs[j].pos;
      sum.neg += arcs[j].neg;
      sum.count += arcs[j].count;
      ++j;
    }
    i = j;
    if (sum.pos == 0.0 && sum.neg == 0.0) continue;
    if (sum.neg > 0.0) g.sign_profile_ = SignProfile::signed_weights;
    g.out_entries_.push_back({sum.target, sum.pos, sum.neg, sum.count});
    ++out_counts[sum.source];
  }
  for (std::size_t v = 0; v < n; ++v) g.out_offsets_[v + 1] = g.out_offsets_[v] + out_counts[v];

  if (directed) {
    std::vector<std::size_t> in_counts(n, 0);
    for (const Entry& e : g.out_entries_) ++in_counts[e.neighbor];
    g.in_offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) g.in_offsets_[v + 1] = g.in_offsets_[v] + in_counts[v];
    g.in_entries_.resize(g.out_entries_.size());
    std::vector<std::size_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t k = g.out_offsets_[u]; k < g.out_offsets_[u + 1]; ++k) {
        const Entry& e = g.out_entries_[k];
        g.in_entries_[cursor[e.neighbor]++] = {static_cast<NodeId>(u), e.pos, e.neg, e.count};
      }
    }
  }

  Fnv1a h;
  h.add(static_cast<std::uint64_t>(n));
  h.add(static_cast<std::uint64_t>(directed));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t k = g.out_offsets_[u]; k < g.out_offsets_[u + 1]; ++k) {
      const Entry& e = g.out_entries_[k];
      h.add(static_cast<std::uint64_t>(u));
      h.add(static_cast<std::uint64_t>(e.neighbor));
      h.add(e.pos);
      h.add(e.neg);
      h.add(e.count);
    }
  }
  g.fingerprint_ = h.value();
  return g;
}

std::string Graph::label(NodeId v) const {
  return labels_.empty() ? std::to_string(v) : labels_[v];
}

std::vector<Edge> Graph::stored_edges() const {
  std::vector<Edge> result;
  result.reserve(out_entries_.size());
  for (std::size_t u = 0; u < n_; ++u) {
    for (const Entry& e : out(static_cast<NodeId>(u))) {
      result.push_back({static_cast<NodeId>(u), e.neighbor, e.weight()});
    }
  }
  return result;
}

NodeMarginals node_marginals(const Graph& g) {
  const std::size_t n = g.num_nodes();
  NodeMarginals m;
  m.k_out.assign(n, 0);
  m.k_in.assign(n, 0);
  m.s_out_plus.assign(n, 0.0);
  m.s_out_minus.assign(n, 0.0);
  m.s_in_plus.assign(n, 0.0);
  m.s_in_minus.assign(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const Entry& e : g.out(static_cast<NodeId>(u))) {
      m.k_out[u] += e.count;
      m.k_in[e.neighbor] += e.count;
      m.s_out_plus[u] += e.pos;
      m.s_out_minus[u] += e.neg;
      m.s_in_plus[e.neighbor] += e.pos;
      m.s_in_minus[e.neighbor] += e.neg;
    }
  }
  m.s_out.resize(n);
  m.s_in.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.s_out[i] = m.s_out_plus[i] - m.s_out_minus[i];
    m.s_in[i] = m.s_in_plus[i] - m.s_in_minus[i];
  }
  return m;
}

Totals totals(const Graph& g) {
  Totals t;
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (const Entry& e : g.out(static_cast<NodeId>(u))) {
      t.links += e.count;
      t.w_plus += e.pos;
      t.w_minus += e.neg;
    }
  }
  t.w_tot = t.w_plus - t.w_minus;
  return t;
}

Graph aggregate_by_partition(const Graph& g, const Partition& p) {
  if (p.size() != g.num_nodes()) {
    throw std::invalid_argument("aggregate_by_partition: partition length " + std::to_string(p.size()) +
                                " does not match node count " + std::to_string(g.num_nodes()));
  }
  std::vector<Graph::Arc> arcs;
  arcs.reserve(g.num_entries());
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    for (const Entry& e : g.out(static_cast<NodeId>(u))) {
      arcs.push_back({p[u], p[e.neighbor], e.pos, e.neg, e.count});
    }
  }
  return Graph::from_arcs(p.num_communities(), g.directed(), std::move(arcs), {});
}

}  // namespace star
