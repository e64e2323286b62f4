#include "balnet/balance.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include <json.hpp>

#include "balnet/errors.hpp"
#include "balnet/stats.hpp"

namespace balnet {

namespace {

void require_signed(const SignedMatrix& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  if (s.values.rows() != n || s.values.cols() != n) throw DomainError("signed matrix: shape mismatch");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (s.values(i, i) != 0) throw DomainError("signed matrix: non-zero diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int v = s.values(i, j);
      if (v != s.values(j, i) || v < -1 || v > 1) throw DomainError("signed matrix: must be symmetric in {-1,0,1}");
    }
  }
  if (n < 3) throw DomainError("balance metrics need at least 3 assets");
}

std::int64_t choose3(std::int64_t n) { return n * (n - 1) * (n - 2) / 6; }

}  // namespace

TriadClass triad_class(int s_ij, int s_ik, int s_jk) {
  auto ok = [](int v) { return v == 1 || v == -1; };
  if (!ok(s_ij) || !ok(s_ik) || !ok(s_jk)) throw DomainError("triad signs must be -1 or +1");
  return s_ij * s_ik * s_jk == 1 ? TriadClass::kStable : TriadClass::kUnstable;
}

std::int64_t triad_sum(const SignedMatrix& s) {
  require_signed(s);
  const Eigen::MatrixXi sq = s.values * s.values;
  // S symmetric, so sum_ij S_ij (S^2)_ij = trace(S^3).
  const std::int64_t trace = s.values.cast<std::int64_t>().cwiseProduct(sq.cast<std::int64_t>()).sum();
  return trace / 6;
}

double hamiltonian(const SignedMatrix& s) {
  const std::int64_t sum = triad_sum(s);
  return -static_cast<double>(sum) / static_cast<double>(choose3(static_cast<std::int64_t>(s.size())));
}

Eigen::MatrixXd delta_matrix(const SignedMatrix& s) {
  require_signed(s);
  const Eigen::MatrixXi sq = s.values * s.values;
  const double norm = static_cast<double>(s.size() - 2);
  return s.values.cwiseProduct(sq).cast<double>() / norm;
}

SpectralDiag spectral_diag(const CorrMatrix& corr, std::size_t k) {
  const auto eig = eigen_descending(corr.values);
  SpectralDiag out;
  out.eigenvalues = eig.values;
  const double n = static_cast<double>(corr.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k) && i < eig.values.size(); ++i) {
    out.fractions.push_back(std::clamp(eig.values(i) / n, 0.0, 1.0));
  }
  if (eig.vectors.cols() > 0) {
    out.v1 = eig.vectors.col(0).normalized();
    Eigen::Index arg = 0;
    out.v1.cwiseAbs().maxCoeff(&arg);
    if (out.v1(arg) < 0.0) out.v1 = -out.v1;
  }
  return out;
}

double eigvec_overlap(const Eigen::VectorXd& v_in, const Eigen::VectorXd& v_out) {
  if (v_in.size() != v_out.size()) throw DomainError("eigenvector overlap: length mismatch");
  if (v_in.size() < 2) throw DomainError("eigenvector overlap: need at least 2 components");
  return std::abs(stats::pearson(std::span<const double>(v_in.data(), static_cast<std::size_t>(v_in.size())),
                                 std::span<const double>(v_out.data(), static_cast<std::size_t>(v_out.size()))));
}

BalanceReport analyze_balance(const CorrMatrix& corr) {
  const SignedMatrix s = sign_matrix(corr);
  BalanceReport r;
  r.H = hamiltonian(s);
  r.delta = delta_matrix(s);
  auto diag = spectral_diag(corr, 2);
  r.eig_fracs = std::move(diag.fractions);
  r.v1 = std::move(diag.v1);
  return r;
}

std::string balance_json(const std::string& end_date, const BalanceReport& report) {
  nlohmann::ordered_json j;
  j["end_date"] = end_date;
  j["H"] = report.H;
  j["lambda1_frac"] = report.eig_fracs.size() > 0 ? nlohmann::ordered_json(report.eig_fracs[0]) : nullptr;
  j["lambda2_frac"] = report.eig_fracs.size() > 1 ? nlohmann::ordered_json(report.eig_fracs[1]) : nullptr;
  return j.dump(2) + "\n";
}

}  // namespace balnet
