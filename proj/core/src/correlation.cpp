#include "balnet/correlation.hpp"

#include <cmath>
#include <unordered_map>

#include "balnet/errors.hpp"

namespace balnet {

namespace {

// Averages the two triangles, pins the diagonal and clips to [-1, 1].
void finalize_correlation(Eigen::MatrixXd& m) {
  m = 0.5 * (m + m.transpose()).eval();
  m = m.cwiseMax(-1.0).cwiseMin(1.0);
  m.diagonal().setOnes();
}

void require_complete(const ReturnPanel& r) {
  if (!r.complete()) throw DomainError("pearson: panel has missing returns; apply complete_case first");
  if (r.num_dates() < 2) throw DomainError("pearson: need at least 2 dates");
  for (Eigen::Index i = 0; i < r.returns.cols(); ++i) {
    if (!(r.returns.col(i).array() != r.returns(0, i)).any()) {
      throw DomainError("pearson: constant column for asset '" + r.assets[static_cast<std::size_t>(i)] + "'");
    }
    if (!r.returns.col(i).allFinite()) throw DomainError("pearson: non-finite return");
  }
}

}  // namespace

CorrKind parse_corr_kind(std::string_view name) {
  if (name == "phi") return CorrKind::kPhi;
  if (name == "pearson") return CorrKind::kPearson;
  if (name == "partial_pearson") return CorrKind::kPartialPearson;
  throw DomainError("unknown correlation kind '" + std::string(name) + "' (expected phi|pearson|partial_pearson)");
}

std::string_view to_string(CorrKind kind) {
  switch (kind) {
    case CorrKind::kPhi: return "phi";
    case CorrKind::kPearson: return "pearson";
    case CorrKind::kPartialPearson: return "partial_pearson";
  }
  return "?";
}

EigenDecomposition eigen_descending(const Eigen::MatrixXd& symmetric) {
  if (!symmetric.allFinite()) throw DomainError("eigendecomposition: non-finite matrix entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition did not converge");
  EigenDecomposition out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

CorrMatrix phi_matrix(const BinaryPanel& b) {
  const auto T = b.values.rows();
  const auto N = b.values.cols();
  if (T < 2) throw DomainError("phi: need at least 2 dates");
  // Indicator of +1 days; products of 0/1 doubles are exact integers.
  const Eigen::MatrixXd up = ((b.values.cast<double>().array() + 1.0) * 0.5).matrix();
  const Eigen::MatrixXd n11 = up.transpose() * up;
  const Eigen::VectorXd k = up.colwise().sum().transpose();
  const double Td = static_cast<double>(T);
  Eigen::VectorXd spread(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    if (k(i) == 0.0 || k(i) == Td) {
      throw DomainError("phi: constant column for asset '" + b.assets[static_cast<std::size_t>(i)] + "'");
    }
    spread(i) = std::sqrt(k(i) * (Td - k(i)));
  }
  CorrMatrix out{b.assets, Eigen::MatrixXd(N, N), CorrKind::kPhi};
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = 0; i < N; ++i) {
      out.values(i, j) = (Td * n11(i, j) - k(i) * k(j)) / (spread(i) * spread(j));
    }
  }
  finalize_correlation(out.values);
  return out;
}

CorrMatrix pearson_matrix(const ReturnPanel& r, bool remove_median) {
  require_complete(r);
  Eigen::MatrixXd x = r.returns;
  if (remove_median) {
    const auto m = market_mode(r);
    for (Eigen::Index t = 0; t < x.rows(); ++t) x.row(t).array() -= m[static_cast<std::size_t>(t)];
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::VectorXd norms = x.colwise().norm().transpose();
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (!(norms(i) > 0.0)) {
      throw DomainError("pearson: zero variance for asset '" + r.assets[static_cast<std::size_t>(i)] + "'");
    }
    x.col(i) /= norms(i);
  }
  CorrMatrix out{r.assets, x.transpose() * x, CorrKind::kPearson};
  finalize_correlation(out.values);
  return out;
}

CorrMatrix partial_pearson(const ReturnPanel& r) {
  const CorrMatrix c = pearson_matrix(r, false);
  const auto eig = eigen_descending(c.values);
  if (eig.values.size() >= 2 && !(eig.values(0) - eig.values(1) > 1e-10)) {
    throw DomainError("partial pearson: leading eigenvalue is degenerate");
  }
  Eigen::VectorXd kept = eig.values;
  kept(0) = 0.0;
  CorrMatrix out{r.assets, eig.vectors * kept.asDiagonal() * eig.vectors.transpose(), CorrKind::kPartialPearson};
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  // Numerically-zero diagonals (rank-one inputs) are tolerated; negative ones
  // would mean the reconstruction is not a covariance.
  if ((out.values.diagonal().array() < -1e-10).any()) {
    throw DomainError("partial pearson: non-positive diagonal after market-mode removal");
  }
  return out;
}

SignedMatrix sign_matrix(const CorrMatrix& corr) {
  const auto n = static_cast<Eigen::Index>(corr.size());
  SignedMatrix s{corr.assets, Eigen::MatrixXi::Zero(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double v = corr.values(i, j);
      if (std::isnan(v)) throw DomainError("sign matrix: NaN correlation");
      s.values(i, j) = v >= 0.0 ? 1 : -1;
    }
  }
  return s;
}

CorrMatrix restrict_to(const CorrMatrix& corr, const std::vector<std::string>& assets) {
  std::unordered_map<std::string_view, Eigen::Index> pos;
  for (std::size_t i = 0; i < corr.assets.size(); ++i) pos.emplace(corr.assets[i], static_cast<Eigen::Index>(i));
  std::vector<Eigen::Index> idx;
  for (const auto& a : assets) {
    auto it = pos.find(a);
    if (it == pos.end()) throw DomainError("asset '" + a + "' not in correlation matrix");
    idx.push_back(it->second);
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  CorrMatrix out{assets, Eigen::MatrixXd(n, n), corr.kind};
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out.values(i, j) = corr.values(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace balnet
