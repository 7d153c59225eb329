#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace star {

// Log returns, assets x observations.
struct ReturnsMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> asset_labels;
  // Assets whose returns have zero variance (e.g. a constant price series).
  std::vector<bool> zero_variance;

  std::size_t assets() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t observations() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

struct CleaningReport {
  std::vector<std::string> dropped;  // labels of series above the missing threshold
  std::size_t filled = 0;            // cells filled forward
};

// prices: assets x days, NaN marks a gap. Series with more than
// `max_missing_fraction` gaps are dropped, the rest are forward filled and
// turned into r_t = ln(p_t / p_{t-1}).
// Throws DataError on non-positive prices, a missing first value, or when
// nothing survives.
ReturnsMatrix clean_and_log_returns(const Eigen::MatrixXd& prices, std::vector<std::string> labels = {},
                                    double max_missing_fraction = 0.10, CleaningReport* report = nullptr);

// Pearson correlation between asset rows. Throws DataError on a zero-variance asset.
Eigen::MatrixXd pearson_correlation(const ReturnsMatrix& r);

// Drops zero-variance assets before correlating.
ReturnsMatrix without_zero_variance(const ReturnsMatrix& r);

enum class FilterMode { bulk_only, bulk_and_market };

struct FilteredCorrelation {
  Eigen::MatrixXd matrix;
  std::size_t bulk_removed = 0;
  bool market_removed = false;
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  Eigen::VectorXd eigenvalues;  // descending
};

std::pair<double, double> marchenko_pastur_bounds(std::size_t assets, std::size_t t_obs);

// Keeps the eigenmodes above the upper Marchenko-Pastur bound (minus the
// largest one in bulk_and_market mode) and zeroes the diagonal.
// Throws std::invalid_argument when t_obs <= N or c is not symmetric.
FilteredCorrelation rmt_filter(const Eigen::MatrixXd& c, std::size_t t_obs, FilterMode mode);

// The same reconstruction without zeroing the diagonal, for checking the
// decomposition.
Eigen::MatrixXd rmt_components(const Eigen::MatrixXd& c, std::size_t t_obs, FilterMode mode, bool retained);

}  // namespace star
