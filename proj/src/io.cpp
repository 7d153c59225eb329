#include "star/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "star/errors.hpp"
#include "star/modularity.hpp"

namespace star {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      if (pos < text.size()) out.push_back(text.substr(pos));
      break;
    }
    out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

// Splits on tab if present, else on comma if present, else on runs of blanks.
std::vector<std::string_view> fields_of(std::string_view line, bool keep_empty) {
  std::vector<std::string_view> out;
  char delim = 0;
  if (line.find('\t') != std::string_view::npos) delim = '\t';
  else if (line.find(',') != std::string_view::npos) delim = ',';
  if (delim != 0) {
    std::size_t pos = 0;
    while (true) {
      const std::size_t end = line.find(delim, pos);
      const std::string_view f = trim(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
      if (keep_empty || !f.empty()) out.push_back(f);
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
    return out;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\r')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\r') ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void data_error(const std::string& where, std::size_t line, const std::string& what) {
  throw DataError(where + ":" + std::to_string(line) + ": " + what);
}

bool is_comment(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string format_fixed6(double x) {
  if (x == 0.0) x = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

Graph parse_edge_list(std::string_view text, bool directed, EdgeListStats* stats) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  EdgeListStats local;
  auto id_of = [&](std::string_view token) {
    auto [it, inserted] = ids.try_emplace(std::string(token), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(token);
    return it->second;
  };

  const auto lines = lines_of(text);
  bool seen_data = false;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (is_comment(lines[ln])) continue;
    ++local.lines;
    const auto f = fields_of(trim(lines[ln]), false);
    if (f.size() < 2 || f.size() > 3) data_error("edge list", ln + 1, "expected '<src> <dst> [<weight>]'");
    double w = 1.0;
    if (f.size() == 3 && !parse_double(f[2], w)) {
      if (!seen_data) {
        seen_data = true;  // header line
        continue;
      }
      data_error("edge list", ln + 1, "weight '" + std::string(f[2]) + "' is not a number");
    }
    seen_data = true;
    if (!std::isfinite(w)) data_error("edge list", ln + 1, "weight is not finite");
    if (w == 0.0) data_error("edge list", ln + 1, "zero weight (absent edges are not listed)");
    const NodeId u = id_of(f[0]);
    const NodeId v = id_of(f[1]);
    edges.push_back({u, v, w});
  }
  if (labels.empty()) throw DataError("edge list: no edges");
  local.edges = edges.size();
  if (stats != nullptr) *stats = local;
  const std::size_t n = labels.size();
  return Graph::from_edges(n, directed, edges, std::move(labels));
}

Graph load_edge_list(const fs::path& path, bool directed, EdgeListStats* stats) {
  try {
    return parse_edge_list(read_file(path), directed, stats);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_edge_list(const Graph& g) {
  std::string out;
  out += g.directed() ? "# directed\n" : "# undirected\n";
  for (const Edge& e : g.stored_edges()) {
    if (!g.directed() && e.source > e.target) continue;
    out += g.label(e.source);
    out += ' ';
    out += g.label(e.target);
    out += ' ';
    out += format_real(e.weight);
    out += '\n';
  }
  return out;
}

void save_edge_list(const fs::path& path, const Graph& g) { write_file_atomic(path, format_edge_list(g)); }

LabeledMatrix parse_dense_csv(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_no;
  const auto lines = lines_of(text);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (is_comment(lines[ln])) continue;
    rows.push_back(fields_of(trim(lines[ln]), true));
    line_no.push_back(ln + 1);
  }
  if (rows.empty()) throw DataError("matrix: empty file");

  LabeledMatrix m;
  double probe = 0.0;
  std::size_t first = 0;
  // Header row: any non-numeric cell other than a leading empty corner.
  bool header = false;
  for (std::size_t j = 0; j < rows[0].size(); ++j) {
    if (j == 0 && rows[0][0].empty()) continue;
    if (!parse_double(rows[0][j], probe)) header = true;
  }
  if (header) first = 1;
  bool label_col = false;
  for (std::size_t i = first; i < rows.size(); ++i) {
    if (!rows[i].empty() && !parse_double(rows[i][0], probe)) label_col = true;
  }
  if (header) {
    for (std::size_t j = label_col ? 1 : 0; j < rows[0].size(); ++j) m.col_labels.emplace_back(rows[0][j]);
  }
  const std::size_t nrows = rows.size() - first;
  const std::size_t ncols = rows[first < rows.size() ? first : 0].size() - (label_col ? 1 : 0);
  if (nrows == 0 || ncols == 0) throw DataError("matrix: no numeric cells");
  m.values.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < nrows; ++i) {
    const auto& r = rows[first + i];
    if (r.size() != ncols + (label_col ? 1 : 0)) {
      data_error("matrix", line_no[first + i], "expected " + std::to_string(ncols) + " values");
    }
    if (label_col) m.row_labels.emplace_back(r[0]);
    for (std::size_t j = 0; j < ncols; ++j) {
      double x = 0.0;
      if (!parse_double(r[j + (label_col ? 1 : 0)], x)) data_error("matrix", line_no[first + i], "non-numeric cell");
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
    }
  }
  if (!m.col_labels.empty() && m.col_labels.size() != ncols) throw DataError("matrix: header width mismatch");
  return m;
}

LabeledMatrix load_dense_csv(const fs::path& path) {
  try {
    return parse_dense_csv(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_dense_csv(const fs::path& path, const Eigen::MatrixXd& m, const std::vector<std::string>& labels) {
  std::string out;
  const bool labeled = !labels.empty();
  if (labeled) {
    for (const auto& l : labels) {
      out += ',';
      out += l;
    }
    out += '\n';
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (labeled) {
      out += labels[static_cast<std::size_t>(i)];
      out += ',';
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_real(m(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

LabeledMatrix load_prices_csv(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_no;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (is_comment(lines[ln])) continue;
    rows.push_back(fields_of(trim(lines[ln]), true));
    line_no.push_back(ln + 1);
  }
  if (rows.size() < 3) throw DataError(path.string() + ": prices need a header and at least two days");
  double probe = 0.0;
  // A date column is non-numeric on every row; a single odd cell is a bad price.
  bool date_col = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty() || rows[i][0].empty() || parse_double(rows[i][0], probe)) date_col = false;
  }
  const std::size_t skip = date_col ? 1 : 0;
  LabeledMatrix m;
  for (std::size_t j = skip; j < rows[0].size(); ++j) m.row_labels.emplace_back(rows[0][j]);
  const std::size_t assets = m.row_labels.size();
  if (assets == 0) throw DataError(path.string() + ": no price columns");
  const std::size_t days = rows.size() - 1;
  m.values.resize(static_cast<Eigen::Index>(assets), static_cast<Eigen::Index>(days));
  for (std::size_t t = 0; t < days; ++t) {
    const auto& r = rows[t + 1];
    if (r.size() != assets + skip) {
      data_error(path.string(), line_no[t + 1], "expected " + std::to_string(assets) + " prices");
    }
    for (std::size_t a = 0; a < assets; ++a) {
      double x = std::numeric_limits<double>::quiet_NaN();
      if (!r[a + skip].empty() && !parse_double(r[a + skip], x)) {
        data_error(path.string(), line_no[t + 1], "price '" + std::string(r[a + skip]) + "' is not a number");
      }
      m.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t)) = x;
    }
  }
  return m;
}

std::string format_partition(const Partition& p, const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t v = 0; v < p.size(); ++v) {
    out += labels.empty() ? std::to_string(v) : labels[v];
    out += ' ';
    out += std::to_string(p[v]);
    out += '\n';
  }
  return out;
}

void save_partition(const fs::path& path, const Partition& p, const std::vector<std::string>& labels) {
  write_file_atomic(path, format_partition(p, labels));
}

Partition load_partition(const fs::path& path, const std::vector<std::string>& labels) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  std::vector<std::string> names;
  std::vector<std::int64_t> ids;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (is_comment(lines[ln])) continue;
    const auto f = fields_of(trim(lines[ln]), false);
    if (f.size() != 2) data_error(path.string(), ln + 1, "expected '<node_label> <community_id>'");
    std::int64_t id = 0;
    const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), id);
    if (ec != std::errc() || ptr != f[1].data() + f[1].size()) {
      data_error(path.string(), ln + 1, "community id '" + std::string(f[1]) + "' is not an integer");
    }
    names.emplace_back(f[0]);
    ids.push_back(id);
  }
  if (ids.empty()) throw DataError(path.string() + ": empty partition file");
  if (labels.empty()) return Partition(ids);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < labels.size(); ++v) index.emplace(labels[v], v);
  std::vector<std::int64_t> ordered(labels.size(), -1);
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it = index.find(names[k]);
    if (it == index.end()) throw DataError(path.string() + ": unknown node '" + names[k] + "'");
    if (ordered[it->second] != -1) throw DataError(path.string() + ": node '" + names[k] + "' listed twice");
    ordered[it->second] = ids[k];
  }
  for (std::size_t v = 0; v < ordered.size(); ++v) {
    if (ordered[v] == -1) throw DataError(path.string() + ": node '" + labels[v] + "' missing");
  }
  return Partition(ordered);
}

namespace {

std::string hex64(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string member_file(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "member_%04zu.txt", i);
  return buf;
}

}  // namespace

void save_ensemble(const fs::path& dir, const Ensemble& ens, const Graph& g) {
  fs::create_directories(dir);
  nlohmann::json manifest;
  manifest["format"] = "star-ensemble v1";
  manifest["model"] = std::string(to_string(ens.model));
  manifest["graph_fingerprint"] = hex64(ens.graph_fingerprint);
  manifest["nodes"] = g.num_nodes();
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t i = 0; i < ens.members.size(); ++i) {
    save_partition(dir / member_file(i), ens.members[i].partition, g.labels());
    members.push_back({{"file", member_file(i)},
                       {"seed", i < ens.seeds.size() ? ens.seeds[i] : 0},
                       {"q", ens.members[i].score.q},
                       {"communities", ens.members[i].partition.num_communities()}});
  }
  manifest["members"] = std::move(members);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

Ensemble load_ensemble(const fs::path& dir, const Graph& g) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError((dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    if (manifest.at("graph_fingerprint").get<std::string>() != hex64(g.fingerprint())) {
      throw DataError(dir.string() + ": ensemble was built on a different graph");
    }
    Ensemble ens;
    ens.graph_fingerprint = g.fingerprint();
    ens.model = parse_null_model(manifest.at("model").get<std::string>());
    for (const auto& m : manifest.at("members")) {
      Partition p = load_partition(dir / m.at("file").get<std::string>(), g.labels());
      ModularityScore score = modularity(g, p, ens.model);
      const double stored = m.at("q").get<double>();
      if (std::abs(score.q - stored) > 1e-9) {
        throw DataError(dir.string() + ": stored Q of " + m.at("file").get<std::string>() +
                        " does not match the graph (" + format_real(stored) + " vs " + format_real(score.q) + ")");
      }
      ens.members.push_back({std::move(p), score});
      ens.seeds.push_back(m.at("seed").get<std::uint64_t>());
    }
    return ens;
  } catch (const nlohmann::json::exception& e) {
    throw DataError((dir / "manifest.json").string() + ": " + e.what());
  }
}

std::string format_ari_matrix(const AriMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.t; ++i) {
    for (std::size_t j = 0; j < m.t; ++j) {
      if (j > 0) out += ',';
      out += format_fixed6(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace star
