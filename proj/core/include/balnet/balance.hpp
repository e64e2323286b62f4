#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "balnet/correlation.hpp"

namespace balnet {

enum class TriadClass { kStable, kUnstable };

/// Stable iff the product of the three link signs is +1: all positive, or
/// exactly two negative. Throws DomainError for inputs outside {-1, +1}.
TriadClass triad_class(int s_ij, int s_ik, int s_jk);

/// Exact sum over unordered triples i < j < k of S_ij S_ik S_jk, computed as
/// trace(S^3) / 6 with integer arithmetic.
std::int64_t triad_sum(const SignedMatrix& s);

/// H = -triad_sum(S) / C(N, 3); -1 when every triad is stable, +1 when none
/// is. Requires N >= 3.
double hamiltonian(const SignedMatrix& s);

/// Pair stability Delta = S o S^2 / (N - 2), zero diagonal. Delta_ij is the
/// mean triad-sign product over the N - 2 triads through (i, j).
Eigen::MatrixXd delta_matrix(const SignedMatrix& s);

struct SpectralDiag {
  Eigen::VectorXd eigenvalues;    // descending
  std::vector<double> fractions;  // lambda_k / N for the first k eigenvalues
  Eigen::VectorXd v1;             // unit norm, largest-magnitude component positive
};

SpectralDiag spectral_diag(const CorrMatrix& corr, std::size_t k = 2);

/// |Pearson correlation| between the components of two eigenvectors.
double eigvec_overlap(const Eigen::VectorXd& v_in, const Eigen::VectorXd& v_out);

struct BalanceReport {
  double H = 0.0;
  Eigen::MatrixXd delta;
  std::vector<double> eig_fracs;  // lambda_1 / N, lambda_2 / N
  Eigen::VectorXd v1;
};

BalanceReport analyze_balance(const CorrMatrix& corr);

/// {"end_date":..,"H":..,"lambda1_frac":..,"lambda2_frac":..}
std::string balance_json(const std::string& end_date, const BalanceReport& report);

}  // namespace balnet
