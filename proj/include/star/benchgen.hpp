#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "star/graph.hpp"
#include "star/partition.hpp"

namespace star {

enum class WeightMode { unit, noisy_unit };

// LFR benchmark parameters. Defaults are the configuration of the reference
// benchmark sweeps: n = 1000, average degree 20, maximum degree 50, degree
// exponent 2, community sizes 10..50 with exponent 3.
struct LfrParams {
  std::size_t n = 1000;
  double avg_deg = 20.0;
  int max_deg = 50;
  double gamma = 2.0;
  double beta = 3.0;
  int cmin = 10;
  int cmax = 50;
  double mu = 0.1;
  WeightMode weight_mode = WeightMode::noisy_unit;
  std::uint64_t seed = 0;
};

struct BenchmarkInstance {
  Graph graph;
  Partition truth;
  std::vector<std::pair<std::string, double>> params_echo;
  std::uint64_t instance_seed = 0;
  // Stubs that could not be matched without self-loops or multi-edges.
  std::size_t dropped_stubs = 0;
};

// k blocks of `size` nodes; each intra-block pair is linked with probability
// p_in, each inter-block pair with p_out, unit weights. Block b holds nodes
// b*size .. (b+1)*size - 1. Throws std::invalid_argument unless 0 <= p_out < p_in <= 1.
BenchmarkInstance generate_planted(std::size_t k, std::size_t size, double p_in, double p_out, std::uint64_t seed);

// Undirected LFR-style graph with a planted partition:
//  - degrees from a power law with exponent gamma on [kmin, max_deg], kmin
//    solved so the mean matches avg_deg, then nudged so the realized total
//    is round(n * avg_deg);
//  - community sizes from a power law with exponent beta on [cmin, cmax],
//    trimmed to sum to n and redrawn until the communities can host every
//    internal degree;
//  - internal degree round((1 - mu) k); nodes placed highest internal degree
//    first, uniformly over the free slots of communities large enough;
//  - intra- and inter-community stubs matched separately, with edge swaps to
//    remove self-loops, multi-edges and intra-community external links.
// Throws std::invalid_argument for infeasible parameters and
// std::runtime_error when matching keeps failing after retries.
BenchmarkInstance generate_lfr(const LfrParams& p);

// File stem "lfr_mu{mu}_seed{seed}" for persisted instances.
std::string lfr_instance_name(double mu, std::uint64_t seed);

// Assets x observations matrix of one-factor-per-block returns:
// r_it = market_loading * m_t + intra_loading * f_{b(i),t} + e_it with all
// factors and noise i.i.d. standard normal.
// Throws std::invalid_argument unless loadings lie in [0, 1) and t_obs exceeds
// the number of assets.
Eigen::MatrixXd generate_factor_returns(std::span<const std::size_t> block_sizes, double intra_loading,
                                        double market_loading, std::size_t t_obs, std::uint64_t seed);

}  // namespace star
