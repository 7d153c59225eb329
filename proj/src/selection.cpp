#include "star/selection.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "star/rng.hpp"

namespace star {

std::string_view to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::star: return "star";
    case SelectionMethod::consensus: return "consensus";
    case SelectionMethod::max_mod: return "max_mod";
    case SelectionMethod::most_frequent: return "most_frequent";
  }
  return "unknown";
}

SelectionMethod parse_selection_method(std::string_view text) {
  if (text == "star") return SelectionMethod::star;
  if (text == "consensus") return SelectionMethod::consensus;
  if (text == "max_mod" || text == "max-mod") return SelectionMethod::max_mod;
  if (text == "most_frequent" || text == "most-frequent") return SelectionMethod::most_frequent;
  throw std::invalid_argument("unknown selection method '" + std::string(text) + "'");
}

namespace {

void require_members(const Ensemble& ens, const char* who) {
  if (ens.members.empty()) throw std::invalid_argument(std::string(who) + ": empty ensemble");
}

SelectionResult from_member(const Ensemble& ens, std::size_t index, SelectionMethod method) {
  SelectionResult r;
  r.method = method;
  r.partition = ens.members[index].partition;
  r.q = ens.members[index].score;
  r.source_index = index;
  return r;
}

}  // namespace

std::vector<double> star_strengths(const AriMatrix& m) {
  std::vector<double> strengths(m.t, 0.0);
  std::vector<double> row(m.t);
  for (std::size_t i = 0; i < m.t; ++i) {
    for (std::size_t j = 0; j < m.t; ++j) row[j] = m(i, j);
    std::sort(row.begin(), row.end());
    double s = 0.0;
    for (double x : row) s += x;
    strengths[i] = s;
  }
  return strengths;
}

SelectionResult star_select(const Ensemble& ens, const AriMatrix& m) {
  if (ens.members.size() < 2) throw std::invalid_argument("star_select: need at least two partitions");
  if (m.t != ens.members.size() || m.values.size() != m.t * m.t) {
    throw std::invalid_argument("star_select: similarity matrix is " + std::to_string(m.t) + "x" +
                                std::to_string(m.t) + " but the ensemble has " +
                                std::to_string(ens.members.size()) + " members");
  }
  std::vector<double> strengths = star_strengths(m);
  std::size_t best = 0;
  for (std::size_t i = 1; i < strengths.size(); ++i) {
    if (strengths[i] > strengths[best] ||
        (strengths[i] == strengths[best] && ens.members[i].score.q > ens.members[best].score.q)) {
      best = i;
    }
  }
  SelectionResult r = from_member(ens, best, SelectionMethod::star);
  r.diagnostics.strengths = std::move(strengths);
  return r;
}

SelectionResult max_modularity_select(const Ensemble& ens) {
  require_members(ens, "max_modularity_select");
  std::size_t best = 0;
  for (std::size_t i = 1; i < ens.members.size(); ++i) {
    if (ens.members[i].score.q > ens.members[best].score.q) best = i;
  }
  return from_member(ens, best, SelectionMethod::max_mod);
}

SelectionResult most_frequent_select(const Ensemble& ens) {
  require_members(ens, "most_frequent_select");
  struct Form {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::map<std::vector<CommunityId>, Form> forms;
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    auto [it, inserted] = forms.try_emplace(ens.members[i].partition.assignment(), Form{0, i});
    ++it->second.count;
  }
  const Form* best = nullptr;
  for (const auto& [key, form] : forms) {
    if (best == nullptr || form.count > best->count) {
      best = &form;
      continue;
    }
    if (form.count < best->count) continue;
    const double q = ens.members[form.first].score.q;
    const double best_q = ens.members[best->first].score.q;
    if (q > best_q || (q == best_q && form.first < best->first)) best = &form;
  }
  SelectionResult r = from_member(ens, best->first, SelectionMethod::most_frequent);
  r.diagnostics.multiplicity = best->count;
  return r;
}

Eigen::MatrixXd consensus_matrix(std::span<const Partition> partitions) {
  if (partitions.empty()) throw std::invalid_argument("consensus_matrix: empty ensemble");
  const std::size_t n = partitions.front().size();
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(ni, ni);
  std::vector<std::vector<Eigen::Index>> groups;
  for (const Partition& p : partitions) {
    if (p.size() != n) throw std::invalid_argument("consensus_matrix: partitions differ in length");
    groups.assign(p.num_communities(), {});
    for (std::size_t v = 0; v < n; ++v) groups[p[v]].push_back(static_cast<Eigen::Index>(v));
    for (const auto& members : groups) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          ++counts(members[a], members[b]);
        }
      }
    }
  }
  const double t = static_cast<double>(partitions.size());
  Eigen::MatrixXd d(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    d(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < ni; ++j) {
      d(i, j) = d(j, i) = counts(i, j) / t;
    }
  }
  return d;
}

Eigen::MatrixXd consensus_matrix(const Ensemble& ens) {
  const auto parts = ens.partitions();
  return consensus_matrix(parts);
}

namespace {

// Thresholded consensus graph. Off-diagonal entries below tau are dropped; a
// node left without links keeps its strongest entries so it is not isolated.
Graph thresholded_consensus_graph(const Eigen::MatrixXd& d, double tau) {
  const Eigen::Index n = d.rows();
  std::vector<Edge> edges;
  std::vector<bool> linked(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (d(i, j) > 0.0 && d(i, j) >= tau) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), d(i, j)});
        linked[static_cast<std::size_t>(i)] = linked[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (linked[static_cast<std::size_t>(i)]) continue;
    double strongest = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) strongest = std::max(strongest, d(i, j));
    }
    if (strongest <= 0.0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && d(i, j) == strongest) {
        edges.push_back({static_cast<NodeId>(std::min(i, j)), static_cast<NodeId>(std::max(i, j)), strongest});
      }
    }
  }
  // Both endpoints may have added the same rescue link; keep one copy.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.source == b.source && a.target == b.target; }),
              edges.end());
  return Graph::from_edges(static_cast<std::size_t>(n), false, edges);
}

bool all_identical(std::span<const Partition> parts) {
  return std::all_of(parts.begin(), parts.end(), [&](const Partition& p) { return p == parts.front(); });
}

}  // namespace

SelectionResult consensus_cluster(const Graph& g, NullModel model, const ConsensusParams& params,
                                  const Ensemble* initial) {
  if (g.sign_profile() == SignProfile::signed_weights || model == NullModel::signed_configuration ||
      model == NullModel::precomputed) {
    throw std::invalid_argument("consensus requires nonnegative weights");
  }
  if (params.tau < 0.0 || params.tau > 1.0) throw std::invalid_argument("consensus: tau must lie in [0, 1]");
  if (params.max_iters < 1) throw std::invalid_argument("consensus: max_iters must be >= 1");
  if (params.reuse_ensemble && initial == nullptr) {
    throw std::invalid_argument("consensus: reuse_ensemble needs an ensemble");
  }
  if (initial != nullptr && initial->graph_fingerprint != g.fingerprint()) {
    throw std::invalid_argument("consensus: ensemble was built on a different graph");
  }
  check_compatible(g, model);
  std::size_t runs = params.runs_per_iter;
  if (runs == 0) runs = initial != nullptr ? initial->size() : 50;

  std::optional<Graph> consensus_graph;
  std::vector<Partition> parts;
  SelectionResult result;
  result.method = SelectionMethod::consensus;
  result.diagnostics.converged = false;

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    if (iter == 1 && params.reuse_ensemble) {
      parts = initial->partitions();
    } else {
      const Graph& current = consensus_graph ? *consensus_graph : g;
      const NullModel current_model = consensus_graph ? NullModel::configuration_weighted : model;
      const Ensemble batch = run_ensemble(current, current_model, runs,
                                         split_seed(params.seed, static_cast<std::uint64_t>(iter)),
                                         params.threads, params.louvain);
      parts = batch.partitions();
    }
    result.diagnostics.iterations = static_cast<std::size_t>(iter);
    if (all_identical(parts)) {
      result.diagnostics.converged = true;
      break;
    }
    if (iter == params.max_iters) break;
    consensus_graph = thresholded_consensus_graph(consensus_matrix(parts), params.tau);
    if (consensus_graph->empty()) break;
  }

  std::size_t best = 0;
  std::vector<ModularityScore> scores;
  scores.reserve(parts.size());
  for (const Partition& p : parts) scores.push_back(modularity(g, p, model));
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (scores[i].q > scores[best].q) best = i;
  }
  result.partition = parts[best];
  result.q = scores[best];
  return result;
}

}  // namespace star
