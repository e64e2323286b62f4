#include "balnet/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "balnet/csv.hpp"
#include "balnet/errors.hpp"

namespace balnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(std::size_t line) { return "line " + std::to_string(line); }

// Parses a price cell. Empty or "NaN" yields nullopt; anything else must be a
// finite positive number.
std::optional<double> parse_price(std::string_view raw, bool allow_missing, std::size_t line) {
  const std::string cell = trim(raw);
  const std::string low = lower(cell);
  if (cell.empty() || low == "nan") {
    if (allow_missing) return std::nullopt;
    throw DataError(where(line) + ": missing price");
  }
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw DataError(where(line) + ": cannot parse price '" + cell + "'");
  }
  if (!std::isfinite(value)) throw DataError(where(line) + ": non-finite price '" + cell + "'");
  if (value <= 0.0) throw DataError(where(line) + ": non-positive price '" + cell + "'");
  return value;
}

std::size_t column_index(const std::vector<std::string>& header, std::string_view name,
                         std::string_view what) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (lower(trim(header[i])) == name) return i;
  }
  throw DataError(std::string(what) + " header lacks a '" + std::string(name) + "' column");
}

const std::string& cell_at(const csv::Row& row, std::size_t col) {
  if (col >= row.cells.size()) throw DataError(where(row.line) + ": too few columns");
  return row.cells[col];
}

PricePanel empty_panel(std::vector<std::string> dates, std::vector<std::string> assets) {
  PricePanel p;
  p.dates = std::move(dates);
  p.assets = std::move(assets);
  const auto nd = static_cast<Eigen::Index>(p.dates.size());
  const auto na = static_cast<Eigen::Index>(p.assets.size());
  p.prices = Eigen::MatrixXd::Constant(nd, na, kNaN);
  p.present = Mask::Constant(nd, na, false);
  p.sectors.assign(p.assets.size(), std::string(kUnknownSector));
  return p;
}

PricePanel parse_long(const csv::Table& t) {
  const auto c_date = column_index(t.header, "date", "long-format prices");
  const auto c_tick = column_index(t.header, "ticker", "long-format prices");
  const auto c_px = column_index(t.header, "adj_close", "long-format prices");

  struct Obs {
    std::string date, ticker;
    double price;
    std::size_t line;
  };
  std::vector<Obs> obs;
  obs.reserve(t.rows.size());
  std::vector<std::string> dates, tickers;
  std::unordered_map<std::string, std::size_t> ticker_pos;
  for (const auto& row : t.rows) {
    Obs o{trim(cell_at(row, c_date)), trim(cell_at(row, c_tick)), 0.0, row.line};
    if (o.date.empty()) throw DataError(where(row.line) + ": empty date");
    if (o.ticker.empty()) throw DataError(where(row.line) + ": empty ticker");
    o.price = *parse_price(cell_at(row, c_px), false, row.line);
    dates.push_back(o.date);
    if (ticker_pos.emplace(o.ticker, 0).second) tickers.push_back(o.ticker);
    obs.push_back(std::move(o));
  }
  // Row order carries no meaning in long files; tickers are kept sorted.
  std::sort(tickers.begin(), tickers.end());
  for (std::size_t i = 0; i < tickers.size(); ++i) ticker_pos[tickers[i]] = i;
  std::sort(dates.begin(), dates.end());
  dates.erase(std::unique(dates.begin(), dates.end()), dates.end());

  PricePanel p = empty_panel(std::move(dates), std::move(tickers));
  for (const auto& o : obs) {
    const auto d = static_cast<Eigen::Index>(*find_date(p.dates, o.date));
    const auto a = static_cast<Eigen::Index>(ticker_pos.at(o.ticker));
    if (p.present(d, a)) {
      throw DataError(where(o.line) + ": duplicate (date,ticker) pair (" + o.date + "," + o.ticker + ")");
    }
    p.present(d, a) = true;
    p.prices(d, a) = o.price;
  }
  return p;
}

PricePanel parse_wide(const csv::Table& t) {
  const auto c_date = column_index(t.header, "date", "wide-format prices");
  std::vector<std::string> tickers;
  std::vector<std::size_t> cols;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == c_date) continue;
    std::string name = trim(t.header[c]);
    if (name.empty()) throw DataError("wide-format prices: empty ticker name in header column " + std::to_string(c + 1));
    if (!seen.emplace(name, c).second) throw DataError("wide-format prices: duplicate ticker column '" + name + "'");
    tickers.push_back(std::move(name));
    cols.push_back(c);
  }

  std::vector<std::size_t> order(t.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> row_dates;
  row_dates.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    row_dates.push_back(trim(cell_at(row, c_date)));
    if (row_dates.back().empty()) throw DataError(where(row.line) + ": empty date");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row_dates[a] < row_dates[b]; });
  std::vector<std::string> dates;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && row_dates[order[k]] == row_dates[order[k - 1]]) {
      throw DataError(where(t.rows[order[k]].line) + ": duplicate date '" + row_dates[order[k]] + "'");
    }
    dates.push_back(row_dates[order[k]]);
  }

  PricePanel p = empty_panel(std::move(dates), std::move(tickers));
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& row = t.rows[order[k]];
    for (std::size_t a = 0; a < cols.size(); ++a) {
      const std::string_view raw = cols[a] < row.cells.size() ? std::string_view(row.cells[cols[a]]) : "";
      if (auto px = parse_price(raw, true, row.line)) {
        p.present(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = true;
        p.prices(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = *px;
      }
    }
  }
  return p;
}

void apply_sectors(PricePanel& p, const csv::Table& t) {
  const auto c_tick = column_index(t.header, "ticker", "sectors");
  const auto c_sec = column_index(t.header, "sector", "sectors");
  std::map<std::string, std::string> sector_of;
  for (const auto& row : t.rows) {
    std::string tick = trim(cell_at(row, c_tick));
    std::string sec = trim(cell_at(row, c_sec));
    if (tick.empty()) throw DataError("sectors " + where(row.line) + ": empty ticker");
    if (sec.empty()) sec = std::string(kUnknownSector);
    auto [it, inserted] = sector_of.emplace(tick, sec);
    if (!inserted && it->second != sec) {
      throw DataError("sectors " + where(row.line) + ": conflicting sector for '" + tick + "'");
    }
  }
  for (std::size_t i = 0; i < p.assets.size(); ++i) {
    if (auto it = sector_of.find(p.assets[i]); it != sector_of.end()) p.sectors[i] = it->second;
  }
}

PricePanel sub_rows(const PricePanel& panel, std::size_t first, std::size_t count) {
  PricePanel out;
  out.dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(first),
                   panel.dates.begin() + static_cast<std::ptrdiff_t>(first + count));
  out.assets = panel.assets;
  out.sectors = panel.sectors;
  out.prices = panel.prices.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  out.present = panel.present.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace

void PricePanel::validate() const {
  const auto nd = static_cast<Eigen::Index>(dates.size());
  const auto na = static_cast<Eigen::Index>(assets.size());
  if (prices.rows() != nd || prices.cols() != na || present.rows() != nd || present.cols() != na) {
    throw DataError("price panel: matrix shape does not match dates x assets");
  }
  if (sectors.size() != assets.size()) throw DataError("price panel: sector labels do not cover every asset");
  for (std::size_t t = 1; t < dates.size(); ++t) {
    if (!(dates[t - 1] < dates[t])) {
      throw DataError("price panel: dates not strictly increasing at '" + dates[t] + "'");
    }
  }
  std::vector<std::string> sorted = assets;
  std::sort(sorted.begin(), sorted.end());
  if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end()) {
    throw DataError("price panel: duplicate asset '" + *it + "'");
  }
  for (Eigen::Index t = 0; t < nd; ++t) {
    for (Eigen::Index i = 0; i < na; ++i) {
      if (present(t, i) && !(std::isfinite(prices(t, i)) && prices(t, i) > 0.0)) {
        throw DataError("price panel: invalid price for " + assets[static_cast<std::size_t>(i)] + " on " +
                        dates[static_cast<std::size_t>(t)]);
      }
    }
  }
}

bool operator==(const PricePanel& a, const PricePanel& b) {
  if (a.dates != b.dates || a.assets != b.assets || a.sectors != b.sectors) return false;
  if ((a.present != b.present).any()) return false;
  for (Eigen::Index t = 0; t < a.prices.rows(); ++t) {
    for (Eigen::Index i = 0; i < a.prices.cols(); ++i) {
      if (a.present(t, i) && a.prices(t, i) != b.prices(t, i)) return false;
    }
  }
  return true;
}

PanelFormat parse_panel_format(std::string_view name) {
  if (name == "long") return PanelFormat::kLong;
  if (name == "wide") return PanelFormat::kWide;
  throw DomainError("unknown panel format '" + std::string(name) + "' (expected long|wide)");
}

PricePanel parse_panel(std::string_view prices_csv, std::optional<std::string_view> sectors_csv,
                       PanelFormat format) {
  const csv::Table t = csv::parse(prices_csv);
  PricePanel p = format == PanelFormat::kLong ? parse_long(t) : parse_wide(t);
  if (sectors_csv) apply_sectors(p, csv::parse(*sectors_csv));
  p.validate();
  return p;
}

PricePanel load_panel(const std::filesystem::path& prices_path,
                      const std::optional<std::filesystem::path>& sectors_path, PanelFormat format) {
  const std::string prices = csv::read_file(prices_path);
  std::optional<std::string> sectors;
  if (sectors_path) sectors = csv::read_file(*sectors_path);
  try {
    return parse_panel(prices, sectors ? std::optional<std::string_view>(*sectors) : std::nullopt, format);
  } catch (const DataError& e) {
    throw DataError(prices_path.string() + ": " + e.what());
  }
}

std::string to_long_csv(const PricePanel& panel) {
  std::string out = "date,ticker,adj_close\n";
  for (std::size_t t = 0; t < panel.dates.size(); ++t) {
    for (std::size_t i = 0; i < panel.assets.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(t);
      const auto c = static_cast<Eigen::Index>(i);
      if (!panel.present(r, c)) continue;
      out += csv::join({panel.dates[t], panel.assets[i], csv::format_exact(panel.prices(r, c))});
      out.push_back('\n');
    }
  }
  return out;
}

std::string to_sectors_csv(const PricePanel& panel) {
  std::string out = "ticker,sector\n";
  for (std::size_t i = 0; i < panel.assets.size(); ++i) {
    out += csv::join({panel.assets[i], panel.sectors[i]});
    out.push_back('\n');
  }
  return out;
}

std::optional<std::size_t> find_date(const std::vector<std::string>& dates, std::string_view date) {
  auto it = std::lower_bound(dates.begin(), dates.end(), date,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == dates.end() || *it != date) return std::nullopt;
  return static_cast<std::size_t>(it - dates.begin());
}

PricePanel slice_window(const PricePanel& panel, std::string_view end_date, std::size_t length) {
  if (length == 0) throw DomainError("window length must be positive");
  const auto end = find_date(panel.dates, end_date);
  if (!end) throw DataError("end date '" + std::string(end_date) + "' not in panel");
  if (*end + 1 < length) {
    throw DataError("insufficient history: window of " + std::to_string(length) + " dates ending at " +
                    std::string(end_date) + " needs " + std::to_string(length - *end - 1) + " more dates");
  }
  return sub_rows(panel, *end + 1 - length, length);
}

}  // namespace balnet
