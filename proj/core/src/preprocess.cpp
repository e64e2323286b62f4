#include "balnet/preprocess.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "balnet/errors.hpp"
#include "balnet/stats.hpp"

namespace balnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ReturnPanel select_columns(const ReturnPanel& r, const std::vector<Eigen::Index>& cols) {
  ReturnPanel out;
  out.dates = r.dates;
  const auto nd = static_cast<Eigen::Index>(r.dates.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  out.returns.resize(nd, nc);
  out.present.resize(nd, nc);
  for (Eigen::Index k = 0; k < nc; ++k) {
    const auto c = cols[static_cast<std::size_t>(k)];
    out.assets.push_back(r.assets[static_cast<std::size_t>(c)]);
    out.sectors.push_back(r.sectors[static_cast<std::size_t>(c)]);
    out.returns.col(k) = r.returns.col(c);
    out.present.col(k) = r.present.col(c);
  }
  return out;
}

std::vector<Eigen::Index> complete_columns(const ReturnPanel& r) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < r.returns.cols(); ++i) {
    if (r.present.col(i).all()) cols.push_back(i);
  }
  return cols;
}

std::vector<Eigen::Index> lookup(const std::vector<std::string>& have, const std::vector<std::string>& want) {
  std::unordered_map<std::string_view, Eigen::Index> pos;
  for (std::size_t i = 0; i < have.size(); ++i) pos.emplace(have[i], static_cast<Eigen::Index>(i));
  std::vector<Eigen::Index> cols;
  cols.reserve(want.size());
  for (const auto& a : want) {
    auto it = pos.find(a);
    if (it == pos.end()) throw DomainError("asset '" + a + "' not in panel");
    cols.push_back(it->second);
  }
  return cols;
}

}  // namespace

MedianScope parse_median_scope(std::string_view name) {
  if (name == "universe") return MedianScope::kUniverse;
  if (name == "window") return MedianScope::kWindow;
  throw DomainError("unknown median scope '" + std::string(name) + "' (expected universe|window)");
}

std::string_view to_string(MedianScope scope) {
  return scope == MedianScope::kUniverse ? "universe" : "window";
}

ReturnPanel log_returns(const PricePanel& panel) {
  if (panel.num_dates() < 2) throw DataError("log returns need at least 2 dates");
  const auto nd = static_cast<Eigen::Index>(panel.num_dates());
  const auto na = static_cast<Eigen::Index>(panel.num_assets());
  ReturnPanel r;
  r.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  r.assets = panel.assets;
  r.sectors = panel.sectors;
  r.returns = Eigen::MatrixXd::Constant(nd - 1, na, kNaN);
  r.present = Mask::Constant(nd - 1, na, false);
  for (Eigen::Index t = 1; t < nd; ++t) {
    for (Eigen::Index i = 0; i < na; ++i) {
      if (panel.present(t, i) && panel.present(t - 1, i)) {
        r.present(t - 1, i) = true;
        r.returns(t - 1, i) = std::log(panel.prices(t, i)) - std::log(panel.prices(t - 1, i));
      }
    }
  }
  return r;
}

ReturnPanel slice_rows(const ReturnPanel& r, std::size_t end, std::size_t length) {
  if (length == 0) throw DomainError("window length must be positive");
  if (end >= r.num_dates()) throw DataError("window end beyond available returns");
  if (end + 1 < length) {
    throw DataError("insufficient history: window of " + std::to_string(length) + " returns ending at " +
                    r.dates[end] + " has only " + std::to_string(end + 1) + " available");
  }
  const std::size_t first = end + 1 - length;
  ReturnPanel out;
  out.dates.assign(r.dates.begin() + static_cast<std::ptrdiff_t>(first),
                   r.dates.begin() + static_cast<std::ptrdiff_t>(end + 1));
  out.assets = r.assets;
  out.sectors = r.sectors;
  out.returns = r.returns.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(length));
  out.present = r.present.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(length));
  return out;
}

ReturnPanel slice_window(const ReturnPanel& r, std::string_view end_date, std::size_t length) {
  const auto end = find_date(r.dates, end_date);
  if (!end) throw DataError("end date '" + std::string(end_date) + "' not among return dates");
  return slice_rows(r, *end, length);
}

std::vector<double> market_mode(const ReturnPanel& r) {
  std::vector<double> m(r.num_dates());
  std::vector<double> day;
  for (Eigen::Index t = 0; t < r.returns.rows(); ++t) {
    day.clear();
    for (Eigen::Index i = 0; i < r.returns.cols(); ++i) {
      if (r.present(t, i)) day.push_back(r.returns(t, i));
    }
    if (day.empty()) throw DataError("no returns present on " + r.dates[static_cast<std::size_t>(t)]);
    m[static_cast<std::size_t>(t)] = stats::median(day);
  }
  return m;
}

ReturnPanel complete_case(const ReturnPanel& r) { return select_columns(r, complete_columns(r)); }

ReturnPanel drop_constant_columns(const ReturnPanel& r) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < r.returns.cols(); ++i) {
    const auto c = r.returns.col(i);
    if (r.returns.rows() > 0 && (c.array() != c(0)).any()) cols.push_back(i);
  }
  return select_columns(r, cols);
}

ReturnPanel partial_returns(const ReturnPanel& r, MedianScope scope) {
  std::vector<double> m;
  ReturnPanel cc = complete_case(r);
  if (scope == MedianScope::kUniverse) {
    m = market_mode(r);
  } else {
    if (cc.num_assets() == 0) throw DataError("no complete-case assets in window");
    m = market_mode(cc);
  }
  for (Eigen::Index t = 0; t < cc.returns.rows(); ++t) {
    cc.returns.row(t).array() -= m[static_cast<std::size_t>(t)];
  }
  return cc;
}

BinaryPanel binarize(const ReturnPanel& r, MedianScope scope) {
  const ReturnPanel partial = partial_returns(r, scope);
  BinaryPanel b;
  b.dates = partial.dates;
  const auto nd = partial.returns.rows();
  SignMatrix8 all(nd, partial.returns.cols());
  for (Eigen::Index i = 0; i < partial.returns.cols(); ++i) {
    for (Eigen::Index t = 0; t < nd; ++t) all(t, i) = partial.returns(t, i) >= 0.0 ? 1 : -1;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < all.cols(); ++i) {
    if (nd > 0 && (all.col(i).array() != all(0, i)).any()) keep.push_back(i);
  }
  if (keep.empty()) throw DataError("binarize: no asset survives complete-case and constant-column filtering");
  b.values.resize(nd, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto c = keep[k];
    b.assets.push_back(partial.assets[static_cast<std::size_t>(c)]);
    b.sectors.push_back(partial.sectors[static_cast<std::size_t>(c)]);
    b.values.col(static_cast<Eigen::Index>(k)) = all.col(c);
  }
  return b;
}

BinaryPanel select_assets(const BinaryPanel& b, const std::vector<std::string>& assets) {
  const auto cols = lookup(b.assets, assets);
  BinaryPanel out;
  out.dates = b.dates;
  out.values.resize(b.values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.assets.push_back(b.assets[static_cast<std::size_t>(cols[k])]);
    out.sectors.push_back(b.sectors[static_cast<std::size_t>(cols[k])]);
    out.values.col(static_cast<Eigen::Index>(k)) = b.values.col(cols[k]);
  }
  return out;
}

ReturnPanel select_assets(const ReturnPanel& r, const std::vector<std::string>& assets) {
  return select_columns(r, lookup(r.assets, assets));
}

double volatility(const ReturnPanel& r) {
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < r.returns.cols(); ++i) {
    for (Eigen::Index t = 0; t < r.returns.rows(); ++t) {
      if (!r.present(t, i)) continue;
      sum += std::abs(r.returns(t, i));
      ++n;
    }
  }
  if (n == 0) throw DataError("volatility of an empty panel");
  return sum / static_cast<double>(n);
}

}  // namespace balnet
