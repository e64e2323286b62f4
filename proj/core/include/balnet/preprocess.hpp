#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "balnet/panel.hpp"

namespace balnet {

/// Daily log returns. Row t is the return from source date t to t+1 and is
/// labelled with the later date. Absent cells hold NaN.
struct ReturnPanel {
  std::vector<std::string> dates;
  std::vector<std::string> assets;
  std::vector<std::string> sectors;
  Eigen::MatrixXd returns;
  Mask present;

  std::size_t num_dates() const { return dates.size(); }
  std::size_t num_assets() const { return assets.size(); }
  bool complete() const { return present.all(); }
};

using SignMatrix8 = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// ±1 partial-return signs of a complete-case, non-constant asset set.
struct BinaryPanel {
  std::vector<std::string> dates;
  std::vector<std::string> assets;
  std::vector<std::string> sectors;
  SignMatrix8 values;  // dates x assets

  std::size_t num_dates() const { return dates.size(); }
  std::size_t num_assets() const { return assets.size(); }
};

/// Which assets enter the cross-sectional median of each day.
enum class MedianScope {
  kUniverse,  // every asset with a return that day
  kWindow,    // only the window's complete-case assets
};

MedianScope parse_median_scope(std::string_view name);
std::string_view to_string(MedianScope scope);

ReturnPanel log_returns(const PricePanel& panel);

/// Rows `[end - length + 1, end]` of the return panel.
ReturnPanel slice_rows(const ReturnPanel& r, std::size_t end, std::size_t length);
ReturnPanel slice_window(const ReturnPanel& r, std::string_view end_date, std::size_t length);

/// Per-date median over present returns.
std::vector<double> market_mode(const ReturnPanel& r);

/// Keeps only assets observed on every date.
ReturnPanel complete_case(const ReturnPanel& r);

/// Drops assets whose returns are constant over the window.
ReturnPanel drop_constant_columns(const ReturnPanel& r);

/// Complete-case returns minus the daily median (computed per `scope`).
ReturnPanel partial_returns(const ReturnPanel& r, MedianScope scope = MedianScope::kUniverse);

/// sign(r - m) with sign(0) = +1 on the complete-case assets, constant
/// columns dropped. Throws DataError when no asset survives.
BinaryPanel binarize(const ReturnPanel& r, MedianScope scope = MedianScope::kUniverse);

/// Columns of `b` restricted to `assets` (given in the desired order).
BinaryPanel select_assets(const BinaryPanel& b, const std::vector<std::string>& assets);
ReturnPanel select_assets(const ReturnPanel& r, const std::vector<std::string>& assets);

/// Mean absolute return over present entries.
double volatility(const ReturnPanel& r);

}  // namespace balnet
