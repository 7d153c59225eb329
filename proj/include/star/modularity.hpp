#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "star/graph.hpp"
#include "star/partition.hpp"

namespace star {

enum class NullModel {
  configuration_binary,    // p_ij = k_in_i k_out_j / L, unit weights only
  configuration_weighted,  // p_ij = s_in_i s_out_j / w_tot, nonnegative weights
  signed_configuration,    // one configuration model per sign channel
  precomputed,             // entries already hold a_ij - p_ij; no null term
};

std::string_view to_string(NullModel model);
// Accepts "binary", "weighted", "signed", "precomputed" and the full names.
NullModel parse_null_model(std::string_view text);

// A modularity value is only meaningful together with the model and the graph
// it was computed on.
struct ModularityScore {
  double q = 0.0;
  NullModel model = NullModel::configuration_weighted;
  std::uint64_t graph_fingerprint = 0;
};

// a.q - b.q; throws std::invalid_argument when model or graph differ.
double q_difference(const ModularityScore& a, const ModularityScore& b);

// Throws std::invalid_argument when `model` cannot be evaluated on `g`
// (non-unit weights under the binary model, negative weights under the
// weighted model) or when the graph has no weight to normalize by.
void check_compatible(const Graph& g, NullModel model);

// Configuration models fill `positive` only; the signed model fills both
// channels, an empty channel yields 0.
struct ExpectedWeight {
  double positive = 0.0;
  double negative = 0.0;
};
ExpectedWeight expected_weight(const NodeMarginals& marginals, NullModel model, NodeId i, NodeId j);

ModularityScore modularity(const Graph& g, const Partition& p, NullModel model);

// Per-model null-term data: Q = (1/norm) sum_C [E(C) - sum_ch sign * In_ch(C) Out_ch(C) / norm_ch].
struct NullChannel {
  double sign = 1.0;
  std::vector<double> in, out;
  double norm = 0.0;
};

struct ModelTerms {
  NullModel model = NullModel::configuration_weighted;
  double norm = 0.0;
  std::vector<NullChannel> channels;

  double edge_value(const Entry& e) const {
    return model == NullModel::configuration_binary ? static_cast<double>(e.count) : e.weight();
  }
};

ModelTerms model_terms(const Graph& g, NullModel model);

// Working state of one optimizer run: community membership plus per-channel
// community strength totals. Community ids range over 0..n-1 and may be empty.
class ModularityState {
 public:
  ModularityState(const Graph& g, NullModel model);
  ModularityState(const Graph& g, NullModel model, const Partition& initial);

  std::uint64_t graph_fingerprint() const noexcept { return fingerprint_; }
  NullModel model() const noexcept { return terms_.model; }
  const ModelTerms& terms() const noexcept { return terms_; }
  std::size_t num_nodes() const noexcept { return community_.size(); }
  CommunityId community_of(NodeId v) const { return community_[v]; }
  const std::vector<CommunityId>& membership() const noexcept { return community_; }

  void move(NodeId v, CommunityId to);

  // Unnormalized gain of inserting an isolated v into c, given the weight
  // `link` of entries between v and c in both directions (self-loop excluded).
  // c's totals must not include v.
  double insertion_gain(NodeId v, CommunityId c, double link) const;
  // Same, with c's totals treated as excluding v although v is still a member.
  double removal_gain(NodeId v, double link) const;

  // Full evaluation from the maintained totals.
  double q(const Graph& g) const;

 private:
  ModelTerms terms_;
  std::uint64_t fingerprint_;
  std::vector<CommunityId> community_;
  // [channel][community]
  std::vector<std::vector<double>> in_tot_, out_tot_;
};

// Q(after) - Q(before) for moving `node` from `from` to `to`, in O(degree).
// Throws std::invalid_argument when the state was built on another graph or
// `node` is not in `from`.
double delta_modularity_move(const Graph& g, const ModularityState& state, NodeId node,
                             CommunityId from, CommunityId to);

struct Ensemble;
// Indices i with max_j Q_j - Q_i <= epsilon, ascending.
std::vector<std::size_t> epsilon_optimal_set(const Ensemble& ens, double epsilon);

}  // namespace star
