#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "star/ensemble.hpp"
#include "star/graph.hpp"
#include "star/partition.hpp"
#include "star/partition_metrics.hpp"

namespace star {

namespace fs = std::filesystem;

// Writes through a temporary sibling and renames, so readers never see a
// half-written file.
void write_file_atomic(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

// Shortest text that parses back to the same double.
std::string format_real(double x);
// Fixed six decimals, used by the tabular outputs.
std::string format_fixed6(double x);

struct EdgeListStats {
  std::size_t lines = 0;
  std::size_t edges = 0;
};

// `<src> <dst> [<weight>]` per line, '#' comments, tab / comma / whitespace
// delimiters. Node labels are arbitrary tokens numbered by first appearance.
// A first line whose weight column is not numeric is taken as a header.
// Duplicate pairs are summed. Throws DataError with the offending line
// number on malformed lines and on NaN, infinite or zero weights.
Graph parse_edge_list(std::string_view text, bool directed, EdgeListStats* stats = nullptr);
Graph load_edge_list(const fs::path& path, bool directed, EdgeListStats* stats = nullptr);
std::string format_edge_list(const Graph& g);
void save_edge_list(const fs::path& path, const Graph& g);

struct LabeledMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

// CSV of reals with an optional header row and an optional label column.
LabeledMatrix parse_dense_csv(std::string_view text);
LabeledMatrix load_dense_csv(const fs::path& path);
void save_dense_csv(const fs::path& path, const Eigen::MatrixXd& m, const std::vector<std::string>& labels = {});

// Header row of tickers, one row per day, empty cell = gap (NaN). A leading
// non-numeric column (dates) is ignored. Result is assets x days.
LabeledMatrix load_prices_csv(const fs::path& path);

// `<node_label> <community_id>` lines in node order.
std::string format_partition(const Partition& p, const std::vector<std::string>& labels = {});
void save_partition(const fs::path& path, const Partition& p, const std::vector<std::string>& labels = {});
// With `labels`, nodes are matched by label and every label must appear;
// without, lines are taken in file order.
Partition load_partition(const fs::path& path, const std::vector<std::string>& labels = {});

// member_XXXX.txt per member plus manifest.json (model, seeds, Q, fingerprint).
void save_ensemble(const fs::path& dir, const Ensemble& ens, const Graph& g);
// Rejects a manifest whose fingerprint differs from g and re-evaluates every
// Q, rejecting a mismatch above 1e-9.
Ensemble load_ensemble(const fs::path& dir, const Graph& g);

std::string format_ari_matrix(const AriMatrix& m);

}  // namespace star
