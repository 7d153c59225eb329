// star: command-line front end for benchmark generation, Louvain ensembles,
// representative selection and benchmark sweeps.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 consensus did not
// converge and --strict was given.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "star/benchgen.hpp"
#include "star/corrfilter.hpp"
#include "star/errors.hpp"
#include "star/harness.hpp"
#include "star/io.hpp"
#include "star/louvain.hpp"
#include "star/modularity.hpp"
#include "star/partition_metrics.hpp"
#include "star/selection.hpp"

namespace fs = std::filesystem;
using namespace star;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

struct NotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(convert(item));
  }
  return out;
}

double to_double(const std::string& s) { return std::stod(s); }
std::size_t to_size(const std::string& s) { return std::stoull(s); }
SelectionMethod to_method(const std::string& s) { return parse_selection_method(s); }

// Everything a config file can set. Flags are registered with these values
// as defaults, so the command line overrides the file.
struct Settings {
  fs::path output_dir = ".";
  unsigned threads = 1;
  bool strict = false;

  std::string model = "weighted";
  bool directed = false;
  std::uint64_t seed = 1;
  std::size_t runs = 150;
  std::string methods = "star,consensus,max_mod";
  LouvainParams louvain;
  ConsensusParams consensus;

  LfrParams lfr;
  std::string mu_grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::size_t instances = 10;
  std::size_t sweep_runs = 50;
  std::string extra_star_t;
  std::string sweep_methods = "star,consensus,max_mod,most_frequent";
  bool paper_scale = false;
  bool keep_artifacts = false;
  bool no_resume = false;

  std::string filter_mode = "bulk_and_market";
  double max_missing = 0.10;
};

void load_config(const fs::path& path, Settings& s) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path.string(), pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw DataError(e.what());
  }
  try {
    s.output_dir = pt.get<std::string>("output.dir", s.output_dir.string());
    s.threads = pt.get("run.threads", s.threads);
    s.seed = pt.get("run.seed", s.seed);
    s.model = pt.get("run.model", s.model);
    s.directed = pt.get("run.directed", s.directed);
    s.runs = pt.get("run.runs", s.runs);
    s.methods = pt.get("run.methods", s.methods);

    s.louvain.min_gain = pt.get("louvain.min_gain", s.louvain.min_gain);
    s.louvain.max_levels = pt.get("louvain.max_levels", s.louvain.max_levels);
    s.louvain.refine = pt.get("louvain.refine", s.louvain.refine);
    if (pt.get("louvain.fixed_order", false)) s.louvain.node_order = NodeOrder::fixed;

    s.consensus.tau = pt.get("consensus.tau", s.consensus.tau);
    s.consensus.runs_per_iter = pt.get("consensus.runs_per_iter", s.consensus.runs_per_iter);
    s.consensus.max_iters = pt.get("consensus.max_iters", s.consensus.max_iters);
    s.consensus.reuse_ensemble = pt.get("consensus.reuse_ensemble", s.consensus.reuse_ensemble);

    s.lfr.n = pt.get("lfr.n", s.lfr.n);
    s.lfr.avg_deg = pt.get("lfr.avg_deg", s.lfr.avg_deg);
    s.lfr.max_deg = pt.get("lfr.max_deg", s.lfr.max_deg);
    s.lfr.gamma = pt.get("lfr.gamma", s.lfr.gamma);
    s.lfr.beta = pt.get("lfr.beta", s.lfr.beta);
    s.lfr.cmin = pt.get("lfr.cmin", s.lfr.cmin);
    s.lfr.cmax = pt.get("lfr.cmax", s.lfr.cmax);
    s.lfr.mu = pt.get("lfr.mu", s.lfr.mu);
    if (pt.get<std::string>("lfr.weights", "noisy") == "unit") s.lfr.weight_mode = WeightMode::unit;

    s.mu_grid = pt.get("sweep.mu_grid", s.mu_grid);
    s.instances = pt.get("sweep.instances_per_mu", s.instances);
    s.sweep_runs = pt.get("sweep.t_runs", s.sweep_runs);
    s.extra_star_t = pt.get("sweep.extra_star_t", s.extra_star_t);
    s.sweep_methods = pt.get("sweep.methods", s.sweep_methods);
    s.keep_artifacts = pt.get("sweep.keep_artifacts", s.keep_artifacts);

    s.filter_mode = pt.get("filter.mode", s.filter_mode);
    s.max_missing = pt.get("filter.max_missing", s.max_missing);
  } catch (const boost::property_tree::ptree_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// The config file has to be read before the options are declared.
std::optional<fs::path> find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return fs::path(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return fs::path(a.substr(9));
  }
  return std::nullopt;
}

struct GraphInput {
  fs::path edges;
  fs::path matrix;
};

void add_graph_options(CLI::App* cmd, GraphInput& in, Settings& s) {
  auto* e = cmd->add_option("-g,--graph", in.edges, "edge list file");
  auto* m = cmd->add_option("--matrix", in.matrix, "dense matrix CSV (e.g. a filtered correlation matrix)");
  e->excludes(m);
  cmd->add_flag("--directed,!--undirected", s.directed, "treat the input as directed");
}

Graph load_graph(const GraphInput& in, bool directed) {
  if (!in.edges.empty()) {
    EdgeListStats stats;
    Graph g = load_edge_list(in.edges, directed, &stats);
    std::cerr << "loaded " << g.num_nodes() << " nodes, " << g.num_entries() << (directed ? " directed" : " stored")
              << " links";
    std::cerr << "\n";
    return g;
  }
  if (!in.matrix.empty()) {
    LabeledMatrix m = load_dense_csv(in.matrix);
    auto labels = !m.col_labels.empty() ? m.col_labels : m.row_labels;
    return Graph::from_dense_matrix(m.values, directed, std::move(labels));
  }
  throw CLI::ValidationError("--graph or --matrix is required");
}

void print_result(const SelectionResult& r) {
  std::cout << to_string(r.method) << ": Q = " << format_fixed6(r.q.q) << ", " << r.partition.num_communities()
            << " communities";
  if (r.source_index) std::cout << ", member " << *r.source_index;
  if (r.method == SelectionMethod::consensus) {
    std::cout << ", " << r.diagnostics.iterations << " iterations" << (r.diagnostics.converged ? "" : " (not converged)");
  }
  std::cout << "\n";
}

void check_convergence(const SelectionReport& report, bool strict) {
  for (const auto& r : report.selections) {
    if (r.method == SelectionMethod::consensus && !r.diagnostics.converged) {
      std::cerr << "warning: consensus did not converge\n";
      if (strict) throw NotConverged("consensus did not converge");
    }
  }
}

int run(int argc, char** argv) {
  Settings s;
  if (const char* env = std::getenv("STAR_OUTPUT_DIR"); env != nullptr && *env != '\0') s.output_dir = env;
  if (auto cfg = find_config_arg(argc, argv)) load_config(*cfg, s);

  CLI::App app{"Community detection ensembles and representative partition selection"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "INI file with [run] [louvain] [consensus] [lfr] [sweep] [filter] [output]");
  app.add_option("-o,--output-dir", s.output_dir, "output directory (default: $STAR_OUTPUT_DIR or .)");
  app.add_option("-j,--threads", s.threads, "worker threads");
  app.add_flag("--strict", s.strict, "exit with status 3 when consensus does not converge");

  auto add_model = [&](CLI::App* cmd) { cmd->add_option("-m,--model", s.model, "binary | weighted | signed | precomputed"); };
  auto add_louvain = [&](CLI::App* cmd) {
    cmd->add_option("--min-gain", s.louvain.min_gain, "Louvain stopping threshold");
    cmd->add_option("--max-levels", s.louvain.max_levels, "Louvain aggregation levels");
  };
  auto add_consensus = [&](CLI::App* cmd) {
    cmd->add_option("--tau", s.consensus.tau, "consensus threshold");
    cmd->add_option("--cc-runs", s.consensus.runs_per_iter, "Louvain runs per consensus iteration");
    cmd->add_option("--cc-iters", s.consensus.max_iters, "maximum consensus iterations");
    cmd->add_flag("--reuse-ensemble", s.consensus.reuse_ensemble, "seed consensus with the stored ensemble");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "write benchmark instances");
  std::string kind = "lfr";
  std::size_t count = 1;
  std::size_t planted_k = 3, planted_size = 20;
  double p_in = 0.5, p_out = 0.05;
  gen->add_option("--kind", kind, "lfr | planted")->check(CLI::IsMember({"lfr", "planted"}));
  gen->add_option("--mu", s.lfr.mu, "mixing parameter");
  gen->add_option("--n", s.lfr.n, "nodes");
  gen->add_option("--avg-deg", s.lfr.avg_deg, "average degree");
  gen->add_option("--max-deg", s.lfr.max_deg, "maximum degree");
  gen->add_option("--gamma", s.lfr.gamma, "degree exponent");
  gen->add_option("--beta", s.lfr.beta, "community size exponent");
  gen->add_option("--cmin", s.lfr.cmin, "smallest community");
  gen->add_option("--cmax", s.lfr.cmax, "largest community");
  gen->add_option("--seed", s.seed, "first instance seed");
  gen->add_option("--count", count, "instances, seeds seed..seed+count-1");
  gen->add_option("--k", planted_k, "planted: blocks");
  gen->add_option("--size", planted_size, "planted: block size");
  gen->add_option("--p-in", p_in, "planted: intra-block probability");
  gen->add_option("--p-out", p_out, "planted: inter-block probability");

  // detect
  auto* det = app.add_subcommand("detect", "single Louvain run");
  GraphInput det_in;
  fs::path det_out;
  add_graph_options(det, det_in, s);
  add_model(det);
  add_louvain(det);
  det->add_option("--seed", s.seed, "run seed");
  det->add_option("--out", det_out, "partition file (default: stdout)");

  // ensemble
  auto* ens_cmd = app.add_subcommand("ensemble", "T seeded Louvain runs stored as an ensemble directory");
  GraphInput ens_in;
  fs::path ens_dir;
  add_graph_options(ens_cmd, ens_in, s);
  add_model(ens_cmd);
  add_louvain(ens_cmd);
  ens_cmd->add_option("-t,--runs", s.runs, "ensemble size");
  ens_cmd->add_option("--seed", s.seed, "base seed");
  ens_cmd->add_option("--out", ens_dir, "ensemble directory (default: <output-dir>/ensemble)");

  // select
  auto* sel = app.add_subcommand("select", "pick representatives from a stored ensemble, or build one first");
  GraphInput sel_in;
  fs::path sel_ens;
  std::size_t bins = 20;
  add_graph_options(sel, sel_in, s);
  add_model(sel);
  add_louvain(sel);
  add_consensus(sel);
  sel->add_option("--ensemble", sel_ens, "ensemble directory; without it a fresh ensemble is built");
  sel->add_option("-t,--runs", s.runs, "ensemble size when building");
  sel->add_option("--seed", s.seed, "base seed");
  sel->add_option("--methods", s.methods, "comma list of star, consensus, max_mod, most_frequent");
  sel->add_option("--bins", bins, "histogram bins");

  // consensus
  auto* cc = app.add_subcommand("consensus", "iterated consensus clustering");
  GraphInput cc_in;
  fs::path cc_out;
  add_graph_options(cc, cc_in, s);
  add_model(cc);
  add_louvain(cc);
  add_consensus(cc);
  cc->add_option("--seed", s.seed, "seed");
  cc->add_option("--out", cc_out, "partition file (default: stdout)");

  // sweep
  auto* sw = app.add_subcommand("sweep", "LFR benchmark sweep over mu");
  sw->add_option("--mu", s.mu_grid, "comma list of mu values");
  sw->add_option("--instances", s.instances, "instances per mu");
  sw->add_option("-t,--runs", s.sweep_runs, "Louvain runs per instance");
  sw->add_option("--extra-star-t", s.extra_star_t, "comma list of further ensemble sizes for STAR");
  sw->add_option("--methods", s.sweep_methods, "comma list of selectors");
  sw->add_option("--seed", s.seed, "base seed");
  sw->add_flag("--paper-scale", s.paper_scale, "100 instances per mu, 150 runs");
  sw->add_flag("--keep-artifacts", s.keep_artifacts, "store graphs, truths and ensembles per instance");
  sw->add_flag("--no-resume", s.no_resume, "recompute cells that already have results");
  sw->add_option("--n", s.lfr.n, "nodes");
  add_consensus(sw);
  add_louvain(sw);

  // filter-corr
  auto* fc = app.add_subcommand("filter-corr", "prices -> log returns -> correlation -> RMT filtered matrix");
  fs::path prices_path, corr_path, fc_out;
  std::size_t t_obs = 0;
  fc->add_option("--prices", prices_path, "prices CSV (header of tickers, one row per day)");
  fc->add_option("--corr", corr_path, "precomputed correlation CSV (needs --t-obs)");
  fc->add_option("--t-obs", t_obs, "observations behind --corr");
  fc->add_option("--mode", s.filter_mode, "bulk_only | bulk_and_market")
      ->check(CLI::IsMember({"bulk_only", "bulk_and_market"}));
  fc->add_option("--max-missing", s.max_missing, "drop series with a larger missing fraction");
  fc->add_option("--out", fc_out, "filtered matrix CSV (default: <output-dir>/filtered.csv)");

  // ari
  auto* ac = app.add_subcommand("ari", "adjusted Rand index between two partition files");
  fs::path part_a, part_b;
  ac->add_option("a", part_a, "first partition file")->required();
  ac->add_option("b", part_b, "second partition file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const NullModel model = parse_null_model(s.model);
  s.consensus.threads = s.threads;
  s.consensus.louvain = s.louvain;

  if (*gen) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t seed = s.seed + i;
      BenchmarkInstance inst;
      std::string name;
      if (kind == "lfr") {
        LfrParams p = s.lfr;
        p.seed = seed;
        inst = generate_lfr(p);
        name = lfr_instance_name(p.mu, seed);
      } else {
        inst = generate_planted(planted_k, planted_size, p_in, p_out, seed);
        name = "planted_k" + std::to_string(planted_k) + "_seed" + std::to_string(seed);
      }
      save_edge_list(s.output_dir / (name + ".edges"), inst.graph);
      save_partition(s.output_dir / (name + ".truth"), inst.truth, inst.graph.labels());
      std::string manifest = "{\n";
      for (const auto& [k, v] : inst.params_echo) manifest += "  \"" + k + "\": " + format_real(v) + ",\n";
      manifest += "  \"instance_seed\": " + std::to_string(inst.instance_seed) + ",\n";
      manifest += "  \"dropped_stubs\": " + std::to_string(inst.dropped_stubs) + "\n}\n";
      write_file_atomic(s.output_dir / (name + ".json"), manifest);
      std::cout << name << ": " << inst.graph.num_nodes() << " nodes, " << inst.truth.num_communities()
                << " communities\n";
    }
    return 0;
  }

  if (*det) {
    const Graph g = load_graph(det_in, s.directed);
    LouvainParams p = s.louvain;
    p.seed = s.seed;
    const LouvainResult r = louvain_once(g, model, p);
    if (det_out.empty()) std::cout << format_partition(r.partition, g.labels());
    else save_partition(det_out, r.partition, g.labels());
    std::cerr << "Q = " << format_fixed6(r.score.q) << ", " << r.partition.num_communities() << " communities\n";
    return 0;
  }

  if (*ens_cmd) {
    const Graph g = load_graph(ens_in, s.directed);
    const Ensemble ens = run_ensemble(g, model, s.runs, s.seed, s.threads, s.louvain);
    const fs::path dir = ens_dir.empty() ? s.output_dir / "ensemble" : ens_dir;
    save_ensemble(dir, ens, g);
    std::cout << "wrote " << ens.size() << " partitions to " << dir.string() << "\n";
    return 0;
  }

  if (*sel) {
    const Graph g = load_graph(sel_in, s.directed);
    const auto methods = split_list<SelectionMethod>(s.methods, to_method);
    SelectionReport report;
    Ensemble ens;
    if (!sel_ens.empty()) {
      ens = load_ensemble(sel_ens, g);
      ConsensusParams cp = s.consensus;
      cp.seed = s.seed;
      report = select_all(g, ens, methods, cp);
      write_selection_outputs(s.output_dir, g, ens, report, bins);
    } else {
      PipelineConfig pc;
      pc.model = model;
      pc.t_runs = s.runs;
      pc.methods = methods;
      pc.seed = s.seed;
      pc.threads = s.threads;
      pc.louvain = s.louvain;
      pc.consensus = s.consensus;
      pc.histogram_bins = bins;
      pc.output_dir = s.output_dir;
      PipelineResult pr = run_select_pipeline(g, pc);
      report = std::move(pr.report);
    }
    for (const auto& r : report.selections) print_result(r);
    for (const auto& k : report.skipped) std::cout << to_string(k.method) << ": skipped, " << k.reason << "\n";
    check_convergence(report, s.strict);
    return 0;
  }

  if (*cc) {
    const Graph g = load_graph(cc_in, s.directed);
    ConsensusParams cp = s.consensus;
    cp.seed = s.seed;
    const SelectionResult r = consensus_cluster(g, model, cp);
    if (cc_out.empty()) std::cout << format_partition(r.partition, g.labels());
    else save_partition(cc_out, r.partition, g.labels());
    std::cerr << "Q = " << format_fixed6(r.q.q) << ", " << r.partition.num_communities() << " communities, "
              << r.diagnostics.iterations << " iterations\n";
    SelectionReport one;
    one.selections.push_back(r);
    check_convergence(one, s.strict);
    return 0;
  }

  if (*sw) {
    SweepConfig cfg;
    cfg.lfr = s.lfr;
    cfg.mu_grid = split_list<double>(s.mu_grid, to_double);
    cfg.instances_per_mu = s.paper_scale ? 100 : s.instances;
    cfg.t_runs = s.paper_scale ? 150 : s.sweep_runs;
    cfg.extra_star_t = split_list<std::size_t>(s.extra_star_t, to_size);
    cfg.methods = split_list<SelectionMethod>(s.sweep_methods, to_method);
    cfg.base_seed = s.seed;
    cfg.model = model;
    cfg.louvain = s.louvain;
    cfg.consensus = s.consensus;
    cfg.threads = s.threads;
    cfg.output_dir = s.output_dir;
    cfg.resume = !s.no_resume;
    cfg.keep_artifacts = s.keep_artifacts;
    const SweepResult res = run_sweep(cfg);
    std::cout << format_sweep_rows(res.rows);
    return 0;
  }

  if (*fc) {
    Eigen::MatrixXd corr;
    std::vector<std::string> labels;
    std::size_t obs = t_obs;
    if (!prices_path.empty()) {
      LabeledMatrix prices = load_prices_csv(prices_path);
      CleaningReport cleaning;
      ReturnsMatrix r = clean_and_log_returns(prices.values, prices.row_labels, s.max_missing, &cleaning);
      for (const auto& d : cleaning.dropped) std::cerr << "dropped " << d << ": too many missing prices\n";
      for (std::size_t i = 0; i < r.assets(); ++i) {
        if (r.zero_variance[i]) std::cerr << "dropped " << r.asset_labels[i] << ": zero variance\n";
      }
      r = without_zero_variance(r);
      corr = pearson_correlation(r);
      labels = r.asset_labels;
      obs = r.observations();
    } else if (!corr_path.empty()) {
      if (obs == 0) throw CLI::ValidationError("--corr needs --t-obs");
      LabeledMatrix m = load_dense_csv(corr_path);
      corr = m.values;
      labels = !m.col_labels.empty() ? m.col_labels : m.row_labels;
    } else {
      throw CLI::ValidationError("--prices or --corr is required");
    }
    const FilterMode mode = s.filter_mode == "bulk_only" ? FilterMode::bulk_only : FilterMode::bulk_and_market;
    const FilteredCorrelation f = rmt_filter(corr, obs, mode);
    const fs::path out = fc_out.empty() ? s.output_dir / "filtered.csv" : fc_out;
    save_dense_csv(out, f.matrix, labels);
    std::cout << "lambda- = " << format_fixed6(f.lambda_minus) << ", lambda+ = " << format_fixed6(f.lambda_plus)
              << ", noise modes removed = " << f.bulk_removed << ", market mode removed = "
              << (f.market_removed ? "yes" : "no") << "\n";
    return 0;
  }

  if (*ac) {
    const Partition a = load_partition(part_a);
    // Match nodes by label in the order of the first file.
    std::vector<std::string> labels;
    {
      const std::string text = read_file(part_a);
      std::istringstream in(text);
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name;
        if (line.empty() || line[0] == '#' || !(ls >> name)) continue;
        labels.push_back(name);
      }
    }
    const Partition b = load_partition(part_b, labels);
    std::cout << format_real(ari(a, b)) << "\n";
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotConverged& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
