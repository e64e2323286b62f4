#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "balnet/svn.hpp"

namespace balnet {

/// Undirected simple graph with a category label per node.
struct LabeledGraph {
  Eigen::MatrixXi adjacency;  // symmetric 0/1, zero diagonal
  std::vector<std::string> labels;

  std::size_t num_nodes() const { return labels.size(); }
  std::int64_t num_links() const;
  std::vector<std::int64_t> degrees() const;

  /// Throws DomainError if the adjacency is not a symmetric 0/1 matrix with
  /// zero diagonal or labels do not cover every node.
  void validate() const;
};

LabeledGraph to_graph(const Svn& svn);

/// Newman's categorical assortativity against the configuration-model null,
/// G = sum_ij (A_ij - k_i k_j / 2m) d(c_i, c_j) / (2m - sum_ij (k_i k_j / 2m) d(c_i, c_j)).
/// Throws DomainError when m = 0 or all linked degree sits in one category.
double assortativity(const LabeledGraph& g);

/// Minimum link count for which assortativity is reported.
inline constexpr std::int64_t kMinLinksForAssortativity = 10;

/// assortativity(g) when g has at least kMinLinksForAssortativity links and
/// the value is defined; nullopt otherwise.
std::optional<double> reported_assortativity(const LabeledGraph& g);

/// m / (n (n - 1) / 2). Throws DomainError when n < 2.
double link_density(const LabeledGraph& g, std::size_t n);
double link_density(const LabeledGraph& g);

}  // namespace balnet
