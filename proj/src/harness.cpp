#include "star/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "star/errors.hpp"
#include "star/io.hpp"
#include "star/parallel.hpp"
#include "star/partition_metrics.hpp"
#include "star/rng.hpp"

namespace star {

void SweepConfig::validate() const {
  if (mu_grid.empty()) throw std::invalid_argument("sweep: mu grid is empty");
  for (double mu : mu_grid) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("sweep: mu values must lie in [0, 1]");
  }
  if (instances_per_mu < 1) throw std::invalid_argument("sweep: instances_per_mu must be >= 1");
  if (t_runs < 2) throw std::invalid_argument("sweep: t_runs must be >= 2");
  for (std::size_t t : extra_star_t) {
    if (t < 2) throw std::invalid_argument("sweep: extra STAR ensemble sizes must be >= 2");
  }
  if (methods.empty()) throw std::invalid_argument("sweep: no selection methods");
}

std::uint64_t sweep_instance_seed(std::uint64_t base_seed, std::size_t mu_index, std::size_t instance) {
  return split_seed(split_seed(base_seed, mu_index), instance);
}

namespace {

// Values are kept at the precision they are written with, so the summary
// rows can be recomputed exactly from the per-instance file.
double rounded6(double x) { return std::stod(format_fixed6(x)); }

std::string cell_name(double mu, std::size_t instance) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "mu%.4f_i%05zu.csv", mu, instance);
  return buf;
}

std::vector<InstanceRow> run_cell(const SweepConfig& cfg, std::size_t mu_index, std::size_t instance) {
  const double mu = cfg.mu_grid[mu_index];
  const std::uint64_t seed = sweep_instance_seed(cfg.base_seed, mu_index, instance);
  LfrParams lp = cfg.lfr;
  lp.mu = mu;
  lp.seed = seed;
  const BenchmarkInstance inst = generate_lfr(lp);

  std::size_t t_max = cfg.t_runs;
  for (std::size_t t : cfg.extra_star_t) t_max = std::max(t_max, t);
  const Ensemble full = run_ensemble(inst.graph, cfg.model, t_max, split_seed(seed, 1), 1, cfg.louvain);
  const Ensemble ens = full.prefix(cfg.t_runs);

  if (cfg.keep_artifacts && !cfg.output_dir.empty()) {
    const fs::path dir = cfg.output_dir / "artifacts" / lfr_instance_name(mu, seed);
    save_edge_list(dir / "graph.txt", inst.graph);
    save_partition(dir / "truth.txt", inst.truth, inst.graph.labels());
    nlohmann::json params;
    for (const auto& [k, v] : inst.params_echo) params[k] = v;
    params["instance_seed"] = inst.instance_seed;
    params["dropped_stubs"] = inst.dropped_stubs;
    char fp[32];
    std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(inst.graph.fingerprint()));
    params["graph_fingerprint"] = fp;
    write_file_atomic(dir / "params.json", params.dump(2) + "\n");
    save_ensemble(dir / "ensemble", full, inst.graph);
  }

  ConsensusParams cp = cfg.consensus;
  cp.seed = split_seed(seed, 2);
  cp.threads = 1;
  const SelectionReport report = select_all(inst.graph, ens, cfg.methods, cp);

  std::vector<InstanceRow> rows;
  auto add = [&](const SelectionResult& r, std::size_t t) {
    InstanceRow row;
    row.mu = mu;
    row.instance = instance;
    row.instance_seed = seed;
    row.method = r.method;
    row.t_runs = t;
    row.ari_truth = rounded6(ari(r.partition, inst.truth));
    row.q = rounded6(r.q.q);
    row.communities = r.partition.num_communities();
    row.converged = r.diagnostics.converged;
    rows.push_back(row);
  };
  for (const SelectionResult& r : report.selections) add(r, cfg.t_runs);
  for (std::size_t t : cfg.extra_star_t) {
    if (t == cfg.t_runs) continue;
    const Ensemble sub = full.prefix(t);
    add(star_select(sub, ari_matrix(sub)), t);
  }
  return rows;
}

std::string csv_header() { return std::string(kSweepHeader) + "\n"; }

}  // namespace

std::string format_instance_rows(const std::vector<InstanceRow>& rows) {
  std::string out = csv_header();
  out += "mu,instance,instance_seed,method,t_runs,ari_truth,q,communities,converged\n";
  for (const InstanceRow& r : rows) {
    out += format_fixed6(r.mu) + ',' + std::to_string(r.instance) + ',' + std::to_string(r.instance_seed) + ',' +
           std::string(to_string(r.method)) + ',' + std::to_string(r.t_runs) + ',' + format_fixed6(r.ari_truth) +
           ',' + format_fixed6(r.q) + ',' + std::to_string(r.communities) + ',' + (r.converged ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<InstanceRow> parse_instance_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<InstanceRow> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw DataError("instance rows: malformed line '" + line + "'");
    InstanceRow r;
    try {
      r.mu = std::stod(f[0]);
      r.instance = std::stoull(f[1]);
      r.instance_seed = std::stoull(f[2]);
      r.method = parse_selection_method(f[3]);
      r.t_runs = std::stoull(f[4]);
      r.ari_truth = std::stod(f[5]);
      r.q = std::stod(f[6]);
      r.communities = std::stoull(f[7]);
      r.converged = f[8] == "1";
    } catch (const std::logic_error&) {
      throw DataError("instance rows: malformed line '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<SweepRow> aggregate_rows(const std::vector<InstanceRow>& rows) {
  using Key = std::tuple<double, SelectionMethod, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<const InstanceRow*>> groups;
  for (const InstanceRow& r : rows) {
    const Key k{r.mu, r.method, r.t_runs};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::vector<SweepRow> out;
  for (const Key& k : order) {
    const auto& g = groups[k];
    const double n = static_cast<double>(g.size());
    SweepRow s;
    std::tie(s.mu, s.method, s.t_runs) = k;
    s.instances = g.size();
    for (const InstanceRow* r : g) {
      s.mean_ari_truth += r->ari_truth;
      s.mean_q += r->q;
    }
    s.mean_ari_truth /= n;
    s.mean_q /= n;
    if (g.size() > 1) {
      for (const InstanceRow* r : g) {
        s.std_ari_truth += (r->ari_truth - s.mean_ari_truth) * (r->ari_truth - s.mean_ari_truth);
        s.std_q += (r->q - s.mean_q) * (r->q - s.mean_q);
      }
      s.std_ari_truth = std::sqrt(s.std_ari_truth / (n - 1.0));
      s.std_q = std::sqrt(s.std_q / (n - 1.0));
    }
    out.push_back(s);
  }
  return out;
}

std::string format_sweep_rows(const std::vector<SweepRow>& rows) {
  std::string out = csv_header();
  out += "mu,method,t_runs,mean_ari_truth,std_ari_truth,mean_q,std_q,instances\n";
  for (const SweepRow& r : rows) {
    out += format_fixed6(r.mu) + ',' + std::string(to_string(r.method)) + ',' + std::to_string(r.t_runs) + ',' +
           format_fixed6(r.mean_ari_truth) + ',' + format_fixed6(r.std_ari_truth) + ',' + format_fixed6(r.mean_q) +
           ',' + format_fixed6(r.std_q) + ',' + std::to_string(r.instances) + '\n';
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::size_t cells = cfg.mu_grid.size() * cfg.instances_per_mu;
  std::vector<std::vector<InstanceRow>> per_cell(cells);
  const fs::path cell_dir = cfg.output_dir.empty() ? fs::path{} : cfg.output_dir / "cells";
  if (!cell_dir.empty()) fs::create_directories(cell_dir);

  parallel_for(cells, cfg.threads, [&](std::size_t c) {
    const std::size_t mu_index = c / cfg.instances_per_mu;
    const std::size_t instance = c % cfg.instances_per_mu;
    fs::path file;
    if (!cell_dir.empty()) {
      file = cell_dir / cell_name(cfg.mu_grid[mu_index], instance);
      if (cfg.resume && fs::exists(file)) {
        per_cell[c] = parse_instance_rows(read_file(file));
        const std::uint64_t seed = sweep_instance_seed(cfg.base_seed, mu_index, instance);
        const bool matches = !per_cell[c].empty() && std::all_of(per_cell[c].begin(), per_cell[c].end(),
                                                                  [&](const InstanceRow& r) { return r.instance_seed == seed; });
        if (matches) return;
      }
    }
    per_cell[c] = run_cell(cfg, mu_index, instance);
    if (!file.empty()) write_file_atomic(file, format_instance_rows(per_cell[c]));
  });

  SweepResult result;
  for (auto& rows : per_cell) result.instances.insert(result.instances.end(), rows.begin(), rows.end());
  result.rows = aggregate_rows(result.instances);
  if (!cfg.output_dir.empty()) {
    write_file_atomic(cfg.output_dir / "instances.csv", format_instance_rows(result.instances));
    write_file_atomic(cfg.output_dir / "sweep.csv", format_sweep_rows(result.rows));
  }
  return result;
}

SelectionReport select_all(const Graph& g, const Ensemble& ens, const std::vector<SelectionMethod>& methods,
                           const ConsensusParams& consensus) {
  SelectionReport report;
  std::optional<AriMatrix> m;
  for (SelectionMethod method : methods) {
    switch (method) {
      case SelectionMethod::star:
        if (!m) m = ari_matrix(ens);
        report.selections.push_back(star_select(ens, *m));
        break;
      case SelectionMethod::max_mod:
        report.selections.push_back(max_modularity_select(ens));
        break;
      case SelectionMethod::most_frequent:
        report.selections.push_back(most_frequent_select(ens));
        break;
      case SelectionMethod::consensus:
        if (g.sign_profile() == SignProfile::signed_weights || ens.model == NullModel::signed_configuration ||
            ens.model == NullModel::precomputed) {
          report.skipped.push_back({method, "consensus requires nonnegative weights"});
          break;
        }
        report.selections.push_back(consensus_cluster(g, ens.model, consensus, &ens));
        break;
    }
  }
  return report;
}

std::string q_histogram_csv(const Ensemble& ens, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram: bins must be >= 1");
  std::string out = "bin_lo,bin_hi,count\n";
  if (ens.members.empty()) return out;
  double lo = ens.members.front().score.q;
  double hi = lo;
  for (const auto& m : ens.members) {
    lo = std::min(lo, m.score.q);
    hi = std::max(hi, m.score.q);
  }
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (const auto& m : ens.members) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((m.score.q - lo) / width) : 0;
    counts[std::min(b, bins - 1)] += 1;
  }
  for (std::size_t b = 0; b < bins; ++b) {
    out += format_fixed6(lo + width * static_cast<double>(b)) + ',' +
           format_fixed6(b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1)) + ',' +
           std::to_string(counts[b]) + '\n';
  }
  return out;
}

std::string diagnostics_json(const Graph& g, const Ensemble& ens, const SelectionReport& report) {
  nlohmann::json d;
  d["nodes"] = g.num_nodes();
  d["links"] = g.num_entries();
  d["directed"] = g.directed();
  d["model"] = std::string(to_string(ens.model));
  d["ensemble_size"] = ens.size();
  nlohmann::json methods = nlohmann::json::array();
  for (const SelectionResult& r : report.selections) {
    nlohmann::json m;
    m["method"] = std::string(to_string(r.method));
    m["q"] = r.q.q;
    m["communities"] = r.partition.num_communities();
    if (r.source_index) m["source_index"] = *r.source_index;
    if (r.method == SelectionMethod::star) m["strengths"] = r.diagnostics.strengths;
    if (r.method == SelectionMethod::consensus) {
      m["iterations"] = r.diagnostics.iterations;
      m["converged"] = r.diagnostics.converged;
    }
    if (r.method == SelectionMethod::most_frequent) m["multiplicity"] = r.diagnostics.multiplicity;
    methods.push_back(std::move(m));
  }
  d["selections"] = std::move(methods);
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t a = 0; a < report.selections.size(); ++a) {
    for (std::size_t b = a + 1; b < report.selections.size(); ++b) {
      const auto& x = report.selections[a];
      const auto& y = report.selections[b];
      pairs.push_back({{"a", std::string(to_string(x.method))},
                       {"b", std::string(to_string(y.method))},
                       {"delta_q", q_difference(x.q, y.q)},
                       {"ari", ari(x.partition, y.partition)},
                       {"identical", x.partition == y.partition}});
    }
  }
  d["pairs"] = std::move(pairs);
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : report.skipped) skipped.push_back({{"method", std::string(to_string(s.method))}, {"reason", s.reason}});
  d["skipped"] = std::move(skipped);
  return d.dump(2) + "\n";
}

void write_selection_outputs(const fs::path& dir, const Graph& g, const Ensemble& ens, const SelectionReport& report,
                             std::size_t histogram_bins) {
  for (const SelectionResult& r : report.selections) {
    save_partition(dir / ("partition_" + std::string(to_string(r.method)) + ".txt"), r.partition, g.labels());
  }
  write_file_atomic(dir / "diagnostics.json", diagnostics_json(g, ens, report));
  write_file_atomic(dir / "q_histogram.csv", q_histogram_csv(ens, histogram_bins));
}

PipelineResult run_select_pipeline(const Graph& g, const PipelineConfig& cfg) {
  if (cfg.t_runs < 2) throw std::invalid_argument("pipeline: t_runs must be >= 2");
  PipelineResult result;
  result.ensemble = run_ensemble(g, cfg.model, cfg.t_runs, cfg.seed, cfg.threads, cfg.louvain);
  ConsensusParams cp = cfg.consensus;
  cp.seed = split_seed(cfg.seed, 0xC0);
  result.report = select_all(g, result.ensemble, cfg.methods, cp);
  if (!cfg.output_dir.empty()) {
    save_ensemble(cfg.output_dir / "ensemble", result.ensemble, g);
    write_selection_outputs(cfg.output_dir, g, result.ensemble, result.report, cfg.histogram_bins);
  }
  return result;
}

}  // namespace star
