#include "star/corrfilter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "star/errors.hpp"

namespace star {

ReturnsMatrix clean_and_log_returns(const Eigen::MatrixXd& prices, std::vector<std::string> labels,
                                    double max_missing_fraction, CleaningReport* report) {
  const auto assets = prices.rows();
  const auto days = prices.cols();
  if (days < 2) throw DataError("prices: need at least two days");
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(assets)) {
    throw DataError("prices: label count does not match the number of series");
  }
  auto label = [&](Eigen::Index i) { return labels.empty() ? std::to_string(i) : labels[static_cast<std::size_t>(i)]; };

  std::vector<Eigen::Index> keep;
  CleaningReport local;
  for (Eigen::Index i = 0; i < assets; ++i) {
    Eigen::Index missing = 0;
    for (Eigen::Index t = 0; t < days; ++t) {
      const double p = prices(i, t);
      if (std::isnan(p)) {
        ++missing;
      } else if (!(p > 0.0) || std::isinf(p)) {
        throw DataError("prices: non-positive or infinite price for " + label(i) + " at row " + std::to_string(t));
      }
    }
    if (missing == days) throw DataError("prices: series " + label(i) + " is entirely missing");
    if (static_cast<double>(missing) > max_missing_fraction * static_cast<double>(days)) {
      local.dropped.push_back(label(i));
      continue;
    }
    if (std::isnan(prices(i, 0))) throw DataError("prices: series " + label(i) + " has no first value");
    keep.push_back(i);
  }
  if (keep.empty()) throw DataError("prices: every series exceeds the missing-data threshold");

  ReturnsMatrix r;
  r.values.resize(static_cast<Eigen::Index>(keep.size()), days - 1);
  r.zero_variance.assign(keep.size(), false);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Eigen::Index i = keep[k];
    r.asset_labels.push_back(label(i));
    double last = prices(i, 0);
    for (Eigen::Index t = 1; t < days; ++t) {
      double p = prices(i, t);
      if (std::isnan(p)) {
        p = last;
        ++local.filled;
      }
      r.values(static_cast<Eigen::Index>(k), t - 1) = std::log(p / last);
      last = p;
    }
    const auto row = r.values.row(static_cast<Eigen::Index>(k));
    r.zero_variance[k] = (row.array() - row.mean()).square().sum() == 0.0;
  }
  if (report != nullptr) *report = std::move(local);
  return r;
}

ReturnsMatrix without_zero_variance(const ReturnsMatrix& r) {
  ReturnsMatrix out;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < r.assets(); ++i) {
    if (i < r.zero_variance.size() && r.zero_variance[i]) continue;
    keep.push_back(static_cast<Eigen::Index>(i));
  }
  out.values.resize(static_cast<Eigen::Index>(keep.size()), r.values.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values.row(static_cast<Eigen::Index>(k)) = r.values.row(keep[k]);
    if (!r.asset_labels.empty()) out.asset_labels.push_back(r.asset_labels[static_cast<std::size_t>(keep[k])]);
  }
  out.zero_variance.assign(keep.size(), false);
  return out;
}

Eigen::MatrixXd pearson_correlation(const ReturnsMatrix& r) {
  if (r.observations() < 2) throw DataError("correlation: need at least two observations");
  Eigen::MatrixXd centered = r.values.colwise() - r.values.rowwise().mean();
  Eigen::VectorXd norms = centered.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms(i) == 0.0) {
      const std::string name = r.asset_labels.empty() ? std::to_string(i) : r.asset_labels[static_cast<std::size_t>(i)];
      throw DataError("correlation: asset " + name + " has zero variance");
    }
    centered.row(i) /= norms(i);
  }
  Eigen::MatrixXd c = centered * centered.transpose();
  c = (0.5 * (c + c.transpose())).cwiseMax(-1.0).cwiseMin(1.0);
  c.diagonal().setOnes();
  return c;
}

std::pair<double, double> marchenko_pastur_bounds(std::size_t assets, std::size_t t_obs) {
  const double q = std::sqrt(static_cast<double>(assets) / static_cast<double>(t_obs));
  return {(1.0 - q) * (1.0 - q), (1.0 + q) * (1.0 + q)};
}

namespace {

struct Decomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // matching columns
  std::vector<bool> retained;
  std::size_t bulk = 0;
  bool market = false;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
};

Decomposition decompose(const Eigen::MatrixXd& c, std::size_t t_obs, FilterMode mode) {
  if (c.rows() != c.cols() || c.rows() == 0) throw std::invalid_argument("rmt_filter: matrix must be square");
  const auto n = static_cast<std::size_t>(c.rows());
  if (t_obs <= n) throw std::invalid_argument("rmt_filter: t_obs must exceed the number of assets");
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("rmt_filter: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) throw std::runtime_error("rmt_filter: eigendecomposition failed");

  Decomposition d;
  d.values = solver.eigenvalues().reverse();
  d.vectors = solver.eigenvectors().rowwise().reverse();
  std::tie(d.lambda_minus, d.lambda_plus) = marchenko_pastur_bounds(n, t_obs);
  d.retained.assign(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    if (d.values(static_cast<Eigen::Index>(a)) > d.lambda_plus) d.retained[a] = true;
    else ++d.bulk;
  }
  if (mode == FilterMode::bulk_and_market && d.retained[0]) {
    d.retained[0] = false;
    d.market = true;
  }
  return d;
}

Eigen::MatrixXd reconstruct(const Decomposition& d, bool retained) {
  const Eigen::Index n = d.values.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    if (d.retained[static_cast<std::size_t>(a)] != retained) continue;
    const auto v = d.vectors.col(a);
    m.noalias() += d.values(a) * v * v.transpose();
  }
  return 0.5 * (m + m.transpose());
}

}  // namespace

FilteredCorrelation rmt_filter(const Eigen::MatrixXd& c, std::size_t t_obs, FilterMode mode) {
  const Decomposition d = decompose(c, t_obs, mode);
  FilteredCorrelation f;
  f.matrix = reconstruct(d, true);
  f.matrix.diagonal().setZero();
  f.bulk_removed = d.bulk;
  f.market_removed = d.market;
  f.lambda_minus = d.lambda_minus;
  f.lambda_plus = d.lambda_plus;
  f.eigenvalues = d.values;
  return f;
}

Eigen::MatrixXd rmt_components(const Eigen::MatrixXd& c, std::size_t t_obs, FilterMode mode, bool retained) {
  return reconstruct(decompose(c, t_obs, mode), retained);
}

}  // namespace star
