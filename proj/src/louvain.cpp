#include "star/louvain.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "star/parallel.hpp"
#include "star/rng.hpp"

namespace star {
namespace {

constexpr int kMaxSweeps = 1000;

// Scratch accumulator of link weight from one node to neighboring communities.
class NeighborLinks {
 public:
  explicit NeighborLinks(std::size_t n) : weight_(n, 0.0), seen_(n, false) {}

  void collect(const Graph& g, const ModularityState& state, NodeId v) {
    auto add = [&](std::span<const Entry> entries) {
      for (const Entry& e : entries) {
        if (e.neighbor == v) continue;
        const CommunityId c = state.community_of(e.neighbor);
        if (!seen_[c]) {
          seen_[c] = true;
          touched_.push_back(c);
        }
        weight_[c] += state.terms().edge_value(e);
      }
    };
    add(g.out(v));
    add(g.in(v));
  }

  const std::vector<CommunityId>& touched() const { return touched_; }
  double weight(CommunityId c) const { return weight_[c]; }

  void clear() {
    for (CommunityId c : touched_) {
      weight_[c] = 0.0;
      seen_[c] = false;
    }
    touched_.clear();
  }

 private:
  std::vector<double> weight_;
  std::vector<bool> seen_;
  std::vector<CommunityId> touched_;
};

// Local moving over neighbor communities. Returns true if any node moved.
bool local_moving(const Graph& h, ModularityState& state, const LouvainParams& params, Rng& rng) {
  const std::size_t n = h.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  NeighborLinks links(n);
  const double norm = state.terms().norm;
  bool any_move = false;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (params.node_order == NodeOrder::shuffled) rng.shuffle(std::span<NodeId>(order));
    double sweep_gain = 0.0;
    std::size_t moves = 0;
    for (NodeId v : order) {
      links.collect(h, state, v);
      if (links.touched().empty()) continue;
      const CommunityId current = state.community_of(v);
      const double stay = state.removal_gain(v, links.weight(current));
      CommunityId best = current;
      double best_gain = stay;
      for (CommunityId c : links.touched()) {
        if (c == current) continue;
        const double gain = state.insertion_gain(v, c, links.weight(c));
        if (gain > best_gain || (gain == best_gain && best != current && c < best)) {
          best = c;
          best_gain = gain;
        }
      }
      links.clear();
      if (best != current) {
        state.move(v, best);
        sweep_gain += (best_gain - stay) / norm;
        ++moves;
      }
    }
    if (moves > 0) any_move = true;
    if (moves == 0 || sweep_gain < params.min_gain) break;
  }
  return any_move;
}

// Single-node moves on the original graph against every nonempty community
// plus one empty community, accepting only gains above min_gain.
void refine(const Graph& g, ModularityState& state, const LouvainParams& params, Rng& rng) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::vector<std::size_t> members(n, 0);
  CommunityId max_used = 0;
  for (NodeId v = 0; v < n; ++v) {
    ++members[state.community_of(v)];
    max_used = std::max(max_used, state.community_of(v));
  }
  NeighborLinks links(n);
  const double norm = state.terms().norm;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (params.node_order == NodeOrder::shuffled) rng.shuffle(std::span<NodeId>(order));
    std::size_t moves = 0;
    for (NodeId v : order) {
      const CommunityId current = state.community_of(v);
      links.collect(g, state, v);
      const double stay = state.removal_gain(v, links.weight(current));
      std::optional<CommunityId> empty;
      CommunityId best = current;
      double best_gain = stay;
      // Ids above max_used + 1 are empty and interchangeable with max_used + 1.
      const auto upper = static_cast<CommunityId>(std::min<std::size_t>(n, std::size_t{max_used} + 2));
      for (CommunityId c = 0; c < upper; ++c) {
        if (c == current) continue;
        if (members[c] == 0) {
          if (empty || members[current] == 1) continue;  // leaving a singleton for an empty slot is a no-op
          empty = c;
        }
        const double gain = state.insertion_gain(v, c, links.weight(c));
        if (gain > best_gain) {
          best = c;
          best_gain = gain;
        }
      }
      links.clear();
      if (best != current && (best_gain - stay) / norm > params.min_gain) {
        --members[current];
        ++members[best];
        max_used = std::max(max_used, best);
        state.move(v, best);
        ++moves;
      }
    }
    if (moves == 0) break;
  }
}

}  // namespace

LouvainResult louvain_once(const Graph& g, NullModel model, const LouvainParams& params) {
  if (params.min_gain < 0.0) throw std::invalid_argument("louvain: min_gain must be >= 0");
  if (params.max_levels < 1) throw std::invalid_argument("louvain: max_levels must be >= 1");
  check_compatible(g, model);

  Rng rng(params.seed);
  LouvainResult result;
  std::vector<CommunityId> membership(g.num_nodes());
  std::iota(membership.begin(), membership.end(), CommunityId{0});

  std::optional<Graph> coarse;
  for (int level = 0; level < params.max_levels; ++level) {
    const Graph& h = coarse ? *coarse : g;
    ModularityState state(h, model);
    if (!local_moving(h, state, params, rng)) break;
    const Partition level_partition = canonicalize_ids<CommunityId>(state.membership());
    for (auto& c : membership) c = level_partition[c];
    result.level_q.push_back(state.q(h));
    if (level_partition.num_communities() == h.num_nodes()) break;
    coarse = aggregate_by_partition(h, level_partition);
  }

  Partition flat = canonicalize_ids<CommunityId>(membership);
  if (params.refine) {
    ModularityState state(g, model, flat);
    refine(g, state, params, rng);
    flat = canonicalize_ids<CommunityId>(state.membership());
    result.level_q.push_back(state.q(g));
  }
  result.score = modularity(g, flat, model);
  result.partition = std::move(flat);
  return result;
}

Ensemble run_ensemble(const Graph& g, NullModel model, std::size_t t, std::uint64_t base_seed,
                      unsigned threads, LouvainParams params) {
  if (t == 0) throw std::invalid_argument("run_ensemble: t must be >= 1");
  check_compatible(g, model);
  Ensemble ens;
  ens.graph_fingerprint = g.fingerprint();
  ens.model = model;
  ens.members.resize(t);
  ens.seeds.resize(t);
  for (std::size_t i = 0; i < t; ++i) ens.seeds[i] = split_seed(base_seed, i);
  parallel_for(t, threads, [&](std::size_t i) {
    LouvainParams p = params;
    p.seed = ens.seeds[i];
    LouvainResult r = louvain_once(g, model, p);
    ens.members[i] = {std::move(r.partition), r.score};
  });
  return ens;
}

}  // namespace star
