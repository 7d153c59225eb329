#include "star/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "star/rng.hpp"

namespace star {
namespace {

double powerlaw_sample(Rng& rng, double lo, double hi, double exponent) {
  const double u = rng.uniform();
  if (std::abs(exponent - 1.0) < 1e-12) return lo * std::pow(hi / lo, u);
  const double e = 1.0 - exponent;
  const double a = std::pow(lo, e);
  const double b = std::pow(hi, e);
  return std::pow(a + u * (b - a), 1.0 / e);
}

double powerlaw_mean(double lo, double hi, double exponent) {
  if (std::abs(exponent - 1.0) < 1e-12) return (hi - lo) / std::log(hi / lo);
  if (std::abs(exponent - 2.0) < 1e-12) return std::log(hi / lo) / (1.0 / lo - 1.0 / hi);
  const double num = (std::pow(hi, 2.0 - exponent) - std::pow(lo, 2.0 - exponent)) / (2.0 - exponent);
  const double den = (std::pow(hi, 1.0 - exponent) - std::pow(lo, 1.0 - exponent)) / (1.0 - exponent);
  return num / den;
}

// Lower cutoff of the degree power law whose mean is `target`.
double solve_kmin(double target, double kmax, double exponent) {
  double lo = 1.0;
  double hi = kmax;
  if (powerlaw_mean(lo, hi, exponent) > target) {
    throw std::invalid_argument("lfr: average degree too small for the degree distribution");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (powerlaw_mean(mid, kmax, exponent) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Random pairing of stubs followed by edge-swap repair. `allowed` filters
// node pairs (e.g. no external link inside one community). Returns the
// number of stubs that stayed unmatched.
template <typename Allowed>
std::size_t match_stubs(std::vector<NodeId> stubs, Rng& rng, Allowed allowed,
                        std::vector<std::pair<NodeId, NodeId>>& out) {
  constexpr int kAttemptsPerEdge = 200;
  constexpr int kReshuffles = 20;
  std::size_t unmatched = stubs.size();
  std::vector<std::pair<NodeId, NodeId>> best_edges;

  for (int round = 0; round < kReshuffles && unmatched > 0; ++round) {
    rng.shuffle(std::span<NodeId>(stubs));
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::pair<NodeId, NodeId>> bad;
    std::unordered_set<std::uint64_t> present;
    auto valid = [&](NodeId u, NodeId v) {
      return u != v && allowed(u, v) && !present.contains(pair_key(u, v));
    };
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      const NodeId u = stubs[i];
      const NodeId v = stubs[i + 1];
      if (valid(u, v)) {
        present.insert(pair_key(u, v));
        edges.emplace_back(u, v);
      } else {
        bad.emplace_back(u, v);
      }
    }
    std::size_t left = 0;
    for (auto [u, v] : bad) {
      bool fixed = false;
      for (int attempt = 0; attempt < kAttemptsPerEdge && !edges.empty() && !fixed; ++attempt) {
        const auto j = static_cast<std::size_t>(rng.below(edges.size()));
        auto [x, y] = edges[j];
        if (rng.below(2) == 1) std::swap(x, y);
        // Replace (x, y) + (u, v) by (u, x) + (v, y).
        if (pair_key(u, x) == pair_key(v, y)) continue;
        present.erase(pair_key(x, y));
        if (valid(u, x) && valid(v, y)) {
          present.insert(pair_key(u, x));
          present.insert(pair_key(v, y));
          edges[j] = {u, x};
          edges.emplace_back(v, y);
          fixed = true;
        } else {
          present.insert(pair_key(x, y));
        }
      }
      if (!fixed) left += 2;
    }
    if (left < unmatched || best_edges.empty()) {
      unmatched = left;
      best_edges = std::move(edges);
    }
  }
  out.insert(out.end(), best_edges.begin(), best_edges.end());
  return unmatched;
}

void validate(const LfrParams& p) {
  if (p.n < 2) throw std::invalid_argument("lfr: n must be >= 2");
  if (p.cmin < 1 || p.cmin > p.cmax || static_cast<std::size_t>(p.cmax) > p.n) {
    throw std::invalid_argument("lfr: need 1 <= cmin <= cmax <= n");
  }
  if (p.max_deg < 1 || p.avg_deg <= 0.0 || p.avg_deg > p.max_deg) {
    throw std::invalid_argument("lfr: need 0 < avg_deg <= max_deg");
  }
  if (!(p.mu >= 0.0 && p.mu <= 1.0)) throw std::invalid_argument("lfr: mu must lie in [0, 1]");
  if (p.gamma <= 0.0 || p.beta <= 0.0) throw std::invalid_argument("lfr: exponents must be positive");
  if ((1.0 - p.mu) * p.max_deg > p.cmax) {
    throw std::invalid_argument("lfr: infeasible, (1 - mu) * max_deg exceeds cmax");
  }
  if (std::lround((1.0 - p.mu) * p.max_deg) > p.cmax - 1) {
    throw std::invalid_argument("lfr: infeasible, largest internal degree does not fit in a community of size cmax");
  }
}

std::vector<int> sample_degrees(const LfrParams& p, Rng& rng) {
  const double kmin = solve_kmin(p.avg_deg, p.max_deg, p.gamma);
  const int floor_deg = std::max(1, static_cast<int>(std::floor(kmin)));
  std::vector<int> deg(p.n);
  long long total = 0;
  for (auto& k : deg) {
    k = std::clamp(static_cast<int>(std::lround(powerlaw_sample(rng, kmin, p.max_deg, p.gamma))), floor_deg,
                   p.max_deg);
    total += k;
  }
  const long long target = std::llround(static_cast<double>(p.n) * p.avg_deg);
  for (std::size_t guard = 0; total != target && guard < 1000 * p.n; ++guard) {
    const auto i = static_cast<std::size_t>(rng.below(p.n));
    if (total < target && deg[i] < p.max_deg) {
      ++deg[i];
      ++total;
    } else if (total > target && deg[i] > floor_deg) {
      --deg[i];
      --total;
    }
  }
  return deg;
}

std::vector<int> sample_sizes(const LfrParams& p, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> sizes;
    long long total = 0;
    while (total < static_cast<long long>(p.n)) {
      const int s = std::clamp(static_cast<int>(std::lround(powerlaw_sample(rng, p.cmin, p.cmax, p.beta))),
                               p.cmin, p.cmax);
      sizes.push_back(s);
      total += s;
    }
    long long excess = total - static_cast<long long>(p.n);
    std::vector<std::size_t> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t idx : order) {
      if (excess == 0) break;
      const long long take = std::min<long long>(excess, sizes[idx] - p.cmin);
      sizes[idx] -= static_cast<int>(take);
      excess -= take;
    }
    if (excess == 0) return sizes;
  }
  throw std::invalid_argument("lfr: cannot draw community sizes summing to n");
}

// For every x, the slots in communities of size > x must cover the nodes of
// internal degree >= x. With that nested condition the greedy placement
// below always finds a feasible slot.
bool capacity_ok(const std::vector<int>& sizes, const std::vector<int>& internal) {
  const int max_internal = internal.empty() ? 0 : *std::max_element(internal.begin(), internal.end());
  std::vector<long long> need(static_cast<std::size_t>(max_internal) + 2, 0);
  for (int d : internal) ++need[static_cast<std::size_t>(d)];
  for (int x = max_internal - 1; x >= 0; --x) need[static_cast<std::size_t>(x)] += need[static_cast<std::size_t>(x) + 1];
  for (int x = 1; x <= max_internal; ++x) {
    long long have = 0;
    for (int s : sizes) {
      if (s >= x + 1) have += s;
    }
    if (have < need[static_cast<std::size_t>(x)]) return false;
  }
  return true;
}

// Community sizes are redrawn until they can host the degree sequence.
std::vector<int> sample_feasible_sizes(const LfrParams& p, const std::vector<int>& internal, Rng& rng) {
  constexpr int kDraws = 20000;
  for (int draw = 0; draw < kDraws; ++draw) {
    std::vector<int> sizes = sample_sizes(p, rng);
    if (capacity_ok(sizes, internal)) return sizes;
  }
  throw std::runtime_error("lfr: community sizes cannot host the internal degrees");
}

struct LfrAttempt {
  std::vector<Edge> edges;
  std::vector<std::int64_t> membership;
  std::size_t dropped = 0;
  std::size_t stubs = 0;
};

LfrAttempt lfr_attempt(const LfrParams& p, Rng& rng) {
  std::vector<int> deg = sample_degrees(p, rng);
  std::vector<int> internal(p.n);
  for (std::size_t i = 0; i < p.n; ++i) internal[i] = static_cast<int>(std::lround((1.0 - p.mu) * deg[i]));

  std::vector<int> sizes = sample_feasible_sizes(p, internal, rng);

  // Placement: highest internal degree first, uniform over free feasible slots.
  std::vector<NodeId> order(p.n);
  std::iota(order.begin(), order.end(), NodeId{0});
  rng.shuffle(std::span<NodeId>(order));
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return internal[a] > internal[b]; });
  std::vector<int> free_slots(sizes);
  std::vector<std::int64_t> membership(p.n, -1);
  std::vector<std::vector<NodeId>> members(sizes.size());
  for (NodeId v : order) {
    long long total = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (sizes[c] - 1 >= internal[v]) total += free_slots[c];
    }
    if (total == 0) throw std::runtime_error("lfr: no feasible community slot");
    auto pick = static_cast<long long>(rng.below(static_cast<std::uint64_t>(total)));
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (sizes[c] - 1 < internal[v]) continue;
      if (pick < free_slots[c]) {
        membership[v] = static_cast<std::int64_t>(c);
        members[c].push_back(v);
        --free_slots[c];
        break;
      }
      pick -= free_slots[c];
    }
  }

  // Parity: one extra internal stub (or one fewer) per odd community.
  for (std::size_t c = 0; c < members.size(); ++c) {
    long long sum = 0;
    for (NodeId v : members[c]) sum += internal[v];
    if (sum % 2 == 0) continue;
    std::vector<NodeId> shuffled(members[c]);
    rng.shuffle(std::span<NodeId>(shuffled));
    bool fixed = false;
    for (NodeId v : shuffled) {
      if (internal[v] + 1 <= sizes[c] - 1 && deg[v] < p.max_deg) {
        ++internal[v];
        ++deg[v];
        fixed = true;
        break;
      }
    }
    for (std::size_t i = 0; i < shuffled.size() && !fixed; ++i) {
      const NodeId v = shuffled[i];
      if (internal[v] > 0 && deg[v] > 1) {
        --internal[v];
        --deg[v];
        fixed = true;
      }
    }
    if (!fixed) throw std::runtime_error("lfr: cannot fix internal stub parity");
  }
  long long external_total = 0;
  for (std::size_t i = 0; i < p.n; ++i) external_total += deg[i] - internal[i];
  if (external_total % 2 != 0) {
    std::vector<NodeId> shuffled(p.n);
    std::iota(shuffled.begin(), shuffled.end(), NodeId{0});
    rng.shuffle(std::span<NodeId>(shuffled));
    bool fixed = false;
    for (NodeId v : shuffled) {
      if (deg[v] - internal[v] > 0 && deg[v] > 1) {
        --deg[v];
        fixed = true;
        break;
      }
    }
    if (!fixed) throw std::runtime_error("lfr: cannot fix external stub parity");
  }

  LfrAttempt result;
  std::vector<std::pair<NodeId, NodeId>> links;
  for (const auto& group : members) {
    std::vector<NodeId> stubs;
    for (NodeId v : group) stubs.insert(stubs.end(), static_cast<std::size_t>(internal[v]), v);
    result.stubs += stubs.size();
    result.dropped += match_stubs(std::move(stubs), rng, [](NodeId, NodeId) { return true; }, links);
  }
  std::vector<NodeId> external;
  for (NodeId v = 0; v < p.n; ++v) external.insert(external.end(), static_cast<std::size_t>(deg[v] - internal[v]), v);
  result.stubs += external.size();
  result.dropped += match_stubs(
      std::move(external), rng, [&](NodeId u, NodeId v) { return membership[u] != membership[v]; }, links);

  result.edges.reserve(links.size());
  for (auto [u, v] : links) {
    const double w = p.weight_mode == WeightMode::noisy_unit ? rng.uniform(0.8, 1.2) : 1.0;
    result.edges.push_back({u, v, w});
  }
  result.membership = std::move(membership);
  return result;
}

}  // namespace

BenchmarkInstance generate_planted(std::size_t k, std::size_t size, double p_in, double p_out,
                                   std::uint64_t seed) {
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw std::invalid_argument("planted: need 0 <= p_out < p_in <= 1");
  }
  if (k == 0 || size == 0) throw std::invalid_argument("planted: need k >= 1 and size >= 1");
  const std::size_t n = k * size;
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prob = (i / size == j / size) ? p_in : p_out;
      if (rng.uniform() < prob) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    }
  }
  std::vector<std::int64_t> truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = static_cast<std::int64_t>(i / size);
  BenchmarkInstance inst;
  inst.graph = Graph::from_edges(n, false, edges);
  inst.truth = Partition(truth);
  inst.params_echo = {{"k", static_cast<double>(k)},
                      {"size", static_cast<double>(size)},
                      {"p_in", p_in},
                      {"p_out", p_out}};
  inst.instance_seed = seed;
  return inst;
}

BenchmarkInstance generate_lfr(const LfrParams& p) {
  validate(p);
  constexpr int kRetries = 8;
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? p.seed : split_seed(p.seed, static_cast<std::uint64_t>(attempt));
    Rng rng(seed);
    LfrAttempt a;
    try {
      a = lfr_attempt(p, rng);
    } catch (const std::runtime_error&) {
      if (attempt == kRetries) throw;
      continue;
    }
    // A handful of unmatched stubs is tolerated; more means the sample is too dense to realize.
    if (a.dropped * 100 > a.stubs) continue;
    BenchmarkInstance inst;
    inst.graph = Graph::from_edges(p.n, false, a.edges);
    inst.truth = Partition(a.membership);
    inst.instance_seed = seed;
    inst.dropped_stubs = a.dropped;
    inst.params_echo = {{"n", static_cast<double>(p.n)},     {"avg_deg", p.avg_deg},
                        {"max_deg", static_cast<double>(p.max_deg)}, {"gamma", p.gamma},
                        {"beta", p.beta},                     {"cmin", static_cast<double>(p.cmin)},
                        {"cmax", static_cast<double>(p.cmax)}, {"mu", p.mu},
                        {"noisy_weights", p.weight_mode == WeightMode::noisy_unit ? 1.0 : 0.0}};
    return inst;
  }
  throw std::runtime_error("lfr: stub matching failed after retries");
}

std::string lfr_instance_name(double mu, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "lfr_mu%.2f_seed%llu", mu, static_cast<unsigned long long>(seed));
  return buf;
}

Eigen::MatrixXd generate_factor_returns(std::span<const std::size_t> block_sizes, double intra_loading,
                                        double market_loading, std::size_t t_obs, std::uint64_t seed) {
  if (!(intra_loading >= 0.0 && intra_loading < 1.0) || !(market_loading >= 0.0 && market_loading < 1.0)) {
    throw std::invalid_argument("factor returns: loadings must lie in [0, 1)");
  }
  const std::size_t assets = std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
  if (assets == 0) throw std::invalid_argument("factor returns: no assets");
  if (t_obs <= assets) throw std::invalid_argument("factor returns: t_obs must exceed the number of assets");
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) block_of.insert(block_of.end(), block_sizes[b], b);

  Rng rng(seed);
  Eigen::MatrixXd r(static_cast<Eigen::Index>(assets), static_cast<Eigen::Index>(t_obs));
  std::vector<double> factors(block_sizes.size());
  for (std::size_t t = 0; t < t_obs; ++t) {
    const double market = rng.normal();
    for (auto& f : factors) f = rng.normal();
    for (std::size_t i = 0; i < assets; ++i) {
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          market_loading * market + intra_loading * factors[block_of[i]] + rng.normal();
    }
  }
  return r;
}

}  // namespace star
