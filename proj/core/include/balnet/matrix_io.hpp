#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "balnet/correlation.hpp"

namespace balnet {

/// Square matrix as CSV: a header row `asset,<labels...>` then one row per
/// label. Values use the fixed 12-digit format.
std::string matrix_to_csv(const std::vector<std::string>& labels, const Eigen::MatrixXd& m);
std::string matrix_to_csv(const std::vector<std::string>& labels, const Eigen::MatrixXi& m);

/// Identity of a cached correlation matrix.
struct CacheKey {
  std::string end_date;
  std::size_t window = 0;
  CorrKind kind = CorrKind::kPhi;
  // Free-form qualifier for anything else the matrix depends on (median
  // scope, panel identity). Mismatching tags are treated as misses.
  std::string tag;
};

/// Binary cache file: one JSON header line terminated by '\n', then n*n
/// little-endian IEEE-754 doubles in row-major order.
std::string encode_matrix_cache(const CacheKey& key, const CorrMatrix& m);
/// Throws DataError on a malformed file.
std::pair<CacheKey, CorrMatrix> decode_matrix_cache(const std::string& bytes);

/// Directory of cache files, one per key. Safe for concurrent use when
/// distinct threads store distinct keys.
class MatrixCache {
 public:
  explicit MatrixCache(std::filesystem::path dir);

  std::filesystem::path path_for(const CacheKey& key) const;
  std::optional<CorrMatrix> load(const CacheKey& key) const;
  void store(const CacheKey& key, const CorrMatrix& m) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace balnet
