#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "balnet/preprocess.hpp"

namespace balnet {

enum class CorrKind { kPhi, kPearson, kPartialPearson };

CorrKind parse_corr_kind(std::string_view name);
std::string_view to_string(CorrKind kind);

/// Symmetric N x N correlation-type matrix over `assets`.
struct CorrMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXd values;
  CorrKind kind = CorrKind::kPhi;

  std::size_t size() const { return assets.size(); }
};

/// sign(corr) with zero diagonal: +1 where corr >= 0, -1 otherwise.
struct SignedMatrix {
  std::vector<std::string> assets;
  Eigen::MatrixXi values;

  std::size_t size() const { return assets.size(); }
};

/// Eigenpairs sorted by descending eigenvalue; `vectors.col(k)` pairs with
/// `values(k)`.
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Throws DomainError on non-finite input or solver failure.
EigenDecomposition eigen_descending(const Eigen::MatrixXd& symmetric);

/// Phi coefficient of every pair of ±1 columns, computed from the 2x2
/// contingency counts: (T n11 - k_i k_j) / sqrt(k_i (T-k_i) k_j (T-k_j)).
CorrMatrix phi_matrix(const BinaryPanel& b);

/// Sample Pearson correlation of the columns of a complete-case panel.
/// With `remove_median`, each date's cross-sectional median (over the
/// panel's own assets) is subtracted first.
CorrMatrix pearson_matrix(const ReturnPanel& r, bool remove_median);

/// Raw-return Pearson matrix with its leading eigenpair removed:
/// sum_{k >= 2} lambda_k v_k v_k^T. The diagonal is not renormalised.
CorrMatrix partial_pearson(const ReturnPanel& r);

SignedMatrix sign_matrix(const CorrMatrix& corr);

/// Principal submatrix over `assets` (given in the desired order).
CorrMatrix restrict_to(const CorrMatrix& corr, const std::vector<std::string>& assets);

}  // namespace balnet
