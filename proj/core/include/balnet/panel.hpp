#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace balnet {

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr std::string_view kUnknownSector = "UNKNOWN";

/// Daily adjusted-close prices, dates x assets.
///
/// `prices(t, i)` is meaningful only where `present(t, i)` is true; absent
/// cells hold NaN. `sectors[i]` is the sector label of `assets[i]`.
struct PricePanel {
  std::vector<std::string> dates;
  std::vector<std::string> assets;
  std::vector<std::string> sectors;
  Eigen::MatrixXd prices;
  Mask present;

  std::size_t num_dates() const { return dates.size(); }
  std::size_t num_assets() const { return assets.size(); }

  /// Throws DataError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const PricePanel& a, const PricePanel& b);
};

enum class PanelFormat { kLong, kWide };

PanelFormat parse_panel_format(std::string_view name);

/// Loads a price CSV (`date,ticker,adj_close` rows, or one `date` column
/// plus one column per ticker) and an optional `ticker,sector` CSV.
PricePanel load_panel(const std::filesystem::path& prices_path,
                      const std::optional<std::filesystem::path>& sectors_path,
                      PanelFormat format);

PricePanel parse_panel(std::string_view prices_csv, std::optional<std::string_view> sectors_csv,
                       PanelFormat format);

/// Long-format serialization, one row per present cell, in (date, asset) order.
/// Prices are written with round-trip precision.
std::string to_long_csv(const PricePanel& panel);
std::string to_sectors_csv(const PricePanel& panel);

/// Position of `date` in `dates`; nullopt when absent. `dates` must be sorted.
std::optional<std::size_t> find_date(const std::vector<std::string>& dates, std::string_view date);

/// The `length` consecutive dates ending at `end_date`, all assets kept.
PricePanel slice_window(const PricePanel& panel, std::string_view end_date, std::size_t length);

}  // namespace balnet
