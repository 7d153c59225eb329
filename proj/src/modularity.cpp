#include "star/modularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "star/ensemble.hpp"

namespace star {

std::string_view to_string(NullModel model) {
  switch (model) {
    case NullModel::configuration_binary: return "configuration_binary";
    case NullModel::configuration_weighted: return "configuration_weighted";
    case NullModel::signed_configuration: return "signed_configuration";
    case NullModel::precomputed: return "precomputed";
  }
  return "unknown";
}

NullModel parse_null_model(std::string_view text) {
  if (text == "binary" || text == "configuration_binary") return NullModel::configuration_binary;
  if (text == "weighted" || text == "configuration_weighted") return NullModel::configuration_weighted;
  if (text == "signed" || text == "signed_configuration") return NullModel::signed_configuration;
  if (text == "precomputed") return NullModel::precomputed;
  throw std::invalid_argument("unknown null model '" + std::string(text) + "'");
}

double q_difference(const ModularityScore& a, const ModularityScore& b) {
  if (a.model != b.model) {
    throw std::invalid_argument("cannot compare modularity under " + std::string(to_string(a.model)) +
                                " with modularity under " + std::string(to_string(b.model)));
  }
  if (a.graph_fingerprint != b.graph_fingerprint) {
    throw std::invalid_argument("cannot compare modularity values computed on different graphs");
  }
  return a.q - b.q;
}

void check_compatible(const Graph& g, NullModel model) {
  if (g.empty()) throw std::invalid_argument("modularity: graph has no edges");
  switch (model) {
    case NullModel::configuration_binary:
      for (std::size_t u = 0; u < g.num_nodes(); ++u) {
        for (const Entry& e : g.out(static_cast<NodeId>(u))) {
          if (e.neg != 0.0 || e.pos != static_cast<double>(e.count)) {
            throw std::invalid_argument("configuration_binary requires unit edge weights");
          }
        }
      }
      break;
    case NullModel::configuration_weighted:
      if (g.sign_profile() == SignProfile::signed_weights) {
        throw std::invalid_argument("configuration_weighted requires nonnegative weights; use signed_configuration");
      }
      break;
    case NullModel::signed_configuration:
    case NullModel::precomputed:
      break;
  }
}

namespace {

std::vector<double> as_real(const std::vector<std::uint64_t>& v) {
  return {v.begin(), v.end()};
}

double channel_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

ModelTerms model_terms(const Graph& g, NullModel model) {
  check_compatible(g, model);
  NodeMarginals m = node_marginals(g);
  const Totals t = totals(g);
  ModelTerms terms;
  terms.model = model;
  switch (model) {
    case NullModel::configuration_binary: {
      const auto links = static_cast<double>(t.links);
      terms.norm = links;
      terms.channels.push_back({1.0, as_real(m.k_in), as_real(m.k_out), links});
      break;
    }
    case NullModel::configuration_weighted:
      terms.norm = t.w_tot;
      terms.channels.push_back({1.0, std::move(m.s_in), std::move(m.s_out), t.w_tot});
      break;
    case NullModel::signed_configuration:
      terms.norm = t.w_plus + t.w_minus;
      if (t.w_plus > 0.0) {
        terms.channels.push_back({1.0, std::move(m.s_in_plus), std::move(m.s_out_plus), t.w_plus});
      }
      if (t.w_minus > 0.0) {
        terms.channels.push_back({-1.0, std::move(m.s_in_minus), std::move(m.s_out_minus), t.w_minus});
      }
      break;
    case NullModel::precomputed:
      terms.norm = t.w_plus + t.w_minus;
      break;
  }
  if (!(terms.norm > 0.0)) throw std::invalid_argument("modularity: total weight is zero");
  return terms;
}

ExpectedWeight expected_weight(const NodeMarginals& m, NullModel model, NodeId i, NodeId j) {
  ExpectedWeight result;
  switch (model) {
    case NullModel::configuration_binary: {
      std::uint64_t links = 0;
      for (auto k : m.k_out) links += k;
      if (links == 0) throw std::invalid_argument("expected_weight: L = 0");
      result.positive = static_cast<double>(m.k_in[i]) * static_cast<double>(m.k_out[j]) /
                        static_cast<double>(links);
      break;
    }
    case NullModel::configuration_weighted: {
      const double w_tot = channel_sum(m.s_out);
      if (w_tot == 0.0) throw std::invalid_argument("expected_weight: w_tot = 0");
      result.positive = m.s_in[i] * m.s_out[j] / w_tot;
      break;
    }
    case NullModel::signed_configuration: {
      const double w_plus = channel_sum(m.s_out_plus);
      const double w_minus = channel_sum(m.s_out_minus);
      if (w_plus == 0.0 && w_minus == 0.0) throw std::invalid_argument("expected_weight: empty graph");
      if (w_plus > 0.0) result.positive = m.s_in_plus[i] * m.s_out_plus[j] / w_plus;
      if (w_minus > 0.0) result.negative = m.s_in_minus[i] * m.s_out_minus[j] / w_minus;
      break;
    }
    case NullModel::precomputed:
      throw std::invalid_argument("expected_weight: precomputed model has no null term");
  }
  return result;
}

ModularityScore modularity(const Graph& g, const Partition& p, NullModel model) {
  if (p.size() != g.num_nodes()) throw std::invalid_argument("modularity: partition length does not match graph");
  const ModelTerms terms = model_terms(g, model);
  const std::size_t k = p.num_communities();

  std::vector<double> internal(k, 0.0);
  for (std::size_t u = 0; u < g.num_nodes(); ++u) {
    const CommunityId cu = p[u];
    for (const Entry& e : g.out(static_cast<NodeId>(u))) {
      if (p[e.neighbor] == cu) internal[cu] += terms.edge_value(e);
    }
  }
  std::vector<double> expected(k, 0.0);
  for (const NullChannel& ch : terms.channels) {
    std::vector<double> in_tot(k, 0.0);
    std::vector<double> out_tot(k, 0.0);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      in_tot[p[v]] += ch.in[v];
      out_tot[p[v]] += ch.out[v];
    }
    for (std::size_t c = 0; c < k; ++c) expected[c] += ch.sign * in_tot[c] * out_tot[c] / ch.norm;
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) sum += internal[c] - expected[c];
  return {sum / terms.norm, model, g.fingerprint()};
}

ModularityState::ModularityState(const Graph& g, NullModel model)
    : ModularityState(g, model, Partition::singletons(g.num_nodes())) {}

ModularityState::ModularityState(const Graph& g, NullModel model, const Partition& initial)
    : terms_(model_terms(g, model)), fingerprint_(g.fingerprint()), community_(initial.assignment()) {
  const std::size_t n = g.num_nodes();
  if (initial.size() != n) throw std::invalid_argument("modularity state: partition length does not match graph");
  in_tot_.assign(terms_.channels.size(), std::vector<double>(n, 0.0));
  out_tot_.assign(terms_.channels.size(), std::vector<double>(n, 0.0));
  for (std::size_t ch = 0; ch < terms_.channels.size(); ++ch) {
    for (std::size_t v = 0; v < n; ++v) {
      in_tot_[ch][community_[v]] += terms_.channels[ch].in[v];
      out_tot_[ch][community_[v]] += terms_.channels[ch].out[v];
    }
  }
}

void ModularityState::move(NodeId v, CommunityId to) {
  const CommunityId from = community_[v];
  if (from == to) return;
  for (std::size_t ch = 0; ch < terms_.channels.size(); ++ch) {
    const NullChannel& c = terms_.channels[ch];
    in_tot_[ch][from] -= c.in[v];
    out_tot_[ch][from] -= c.out[v];
    in_tot_[ch][to] += c.in[v];
    out_tot_[ch][to] += c.out[v];
  }
  community_[v] = to;
}

double ModularityState::insertion_gain(NodeId v, CommunityId c, double link) const {
  double null_term = 0.0;
  for (std::size_t ch = 0; ch < terms_.channels.size(); ++ch) {
    const NullChannel& nc = terms_.channels[ch];
    null_term += nc.sign * (nc.in[v] * out_tot_[ch][c] + nc.out[v] * in_tot_[ch][c]) / nc.norm;
  }
  return link - null_term;
}

double ModularityState::removal_gain(NodeId v, double link) const {
  const CommunityId c = community_[v];
  double null_term = 0.0;
  for (std::size_t ch = 0; ch < terms_.channels.size(); ++ch) {
    const NullChannel& nc = terms_.channels[ch];
    null_term += nc.sign *
                 (nc.in[v] * (out_tot_[ch][c] - nc.out[v]) + nc.out[v] * (in_tot_[ch][c] - nc.in[v])) /
                 nc.norm;
  }
  return link - null_term;
}

double ModularityState::q(const Graph& g) const {
  const std::size_t n = community_.size();
  std::vector<double> internal(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const Entry& e : g.out(static_cast<NodeId>(u))) {
      if (community_[e.neighbor] == community_[u]) internal[community_[u]] += terms_.edge_value(e);
    }
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    double expected = 0.0;
    for (std::size_t ch = 0; ch < terms_.channels.size(); ++ch) {
      expected += terms_.channels[ch].sign * in_tot_[ch][c] * out_tot_[ch][c] / terms_.channels[ch].norm;
    }
    sum += internal[c] - expected;
  }
  return sum / terms_.norm;
}

double delta_modularity_move(const Graph& g, const ModularityState& state, NodeId node,
                             CommunityId from, CommunityId to) {
  if (g.fingerprint() != state.graph_fingerprint()) {
    throw std::invalid_argument("delta_modularity_move: state belongs to a different graph");
  }
  if (node >= state.num_nodes() || to >= state.num_nodes()) {
    throw std::invalid_argument("delta_modularity_move: node or community out of range");
  }
  if (state.community_of(node) != from) {
    throw std::invalid_argument("delta_modularity_move: node is not in the source community");
  }
  if (from == to) return 0.0;
  const ModelTerms& terms = state.terms();
  double link_from = 0.0;
  double link_to = 0.0;
  auto accumulate = [&](std::span<const Entry> entries) {
    for (const Entry& e : entries) {
      if (e.neighbor == node) continue;
      const CommunityId c = state.community_of(e.neighbor);
      if (c == from) link_from += terms.edge_value(e);
      else if (c == to) link_to += terms.edge_value(e);
    }
  };
  accumulate(g.out(node));
  accumulate(g.in(node));
  return (state.insertion_gain(node, to, link_to) - state.removal_gain(node, link_from)) / terms.norm;
}

std::vector<std::size_t> epsilon_optimal_set(const Ensemble& ens, double epsilon) {
  if (std::isnan(epsilon) || epsilon < 0.0) throw std::invalid_argument("epsilon_optimal_set: epsilon must be >= 0");
  if (ens.members.empty()) throw std::invalid_argument("epsilon_optimal_set: empty ensemble");
  double q_max = -std::numeric_limits<double>::infinity();
  for (const auto& m : ens.members) q_max = std::max(q_max, m.score.q);
  std::vector<std::size_t> result;
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    if (q_max - ens.members[i].score.q <= epsilon) result.push_back(i);
  }
  return result;
}

}  // namespace star
