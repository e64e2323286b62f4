#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "balnet/preprocess.hpp"

namespace balnet {

enum class Polarity { kPositive, kNegative };

Polarity parse_polarity(std::string_view name);
std::string_view to_string(Polarity p);

/// One pair test. For negative polarity `c`, `k_i`, `k_j` describe the
/// direction that produced the smaller tail (up-days of one asset against
/// down-days of the other) and `p` is the Bonferroni-doubled minimum.
struct LinkTest {
  std::size_t i = 0;
  std::size_t j = 0;
  std::int64_t c = 0;
  std::int64_t k_i = 0;
  std::int64_t k_j = 0;
  std::int64_t T = 0;
  double p = 1.0;
};

/// P(X >= c) for X ~ Hypergeometric(population T, k_i successes, k_j draws):
/// the one-sided Fisher exact test of co-occurrence. Throws DomainError when
/// the arguments violate 0 <= c <= min(k_i, k_j), 0 <= k_i, k_j <= T.
double link_pvalue(std::int64_t c, std::int64_t k_i, std::int64_t k_j, std::int64_t T);

/// Benjamini-Hochberg step-up threshold: the largest sorted p_(r) with
/// p_(r) <= r * alpha / num_tests, or nullopt if none qualifies.
/// `num_tests` defaults to pvalues.size().
std::optional<double> bh_threshold(std::span<const double> pvalues, double alpha,
                                   std::optional<std::size_t> num_tests = std::nullopt);

/// Indices (ascending) of the hypotheses rejected by BH at level `alpha`.
std::vector<std::size_t> bh_select(std::span<const double> pvalues, double alpha,
                                   std::optional<std::size_t> num_tests = std::nullopt);

/// Statistically validated network of one window.
struct Svn {
  std::vector<std::string> assets;
  std::vector<std::string> sectors;
  Eigen::MatrixXi adjacency;  // symmetric 0/1, zero diagonal
  Polarity polarity = Polarity::kPositive;
  double alpha = 0.1;
  std::optional<double> threshold;  // realised BH cut-off
  std::size_t num_tests = 0;
  std::vector<LinkTest> links;  // retained links, (i, j) ascending with i < j

  std::size_t num_links() const { return links.size(); }
};

Svn build_svn(const BinaryPanel& b, double alpha, Polarity polarity);

/// `i,j,p,polarity` with asset identifiers in i and j.
std::string svn_edges_csv(const Svn& svn);
std::string svn_adjacency_csv(const Svn& svn);

}  // namespace balnet
