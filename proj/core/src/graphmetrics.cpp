#include "balnet/graphmetrics.hpp"

#include <map>

#include "balnet/errors.hpp"

namespace balnet {

std::int64_t LabeledGraph::num_links() const { return adjacency.cast<std::int64_t>().sum() / 2; }

std::vector<std::int64_t> LabeledGraph::degrees() const {
  std::vector<std::int64_t> k(static_cast<std::size_t>(adjacency.rows()));
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) k[static_cast<std::size_t>(i)] = adjacency.row(i).sum();
  return k;
}

void LabeledGraph::validate() const {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (adjacency.rows() != n || adjacency.cols() != n) throw DomainError("graph: labels do not cover every node");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0) throw DomainError("graph: self-loop at node " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int a = adjacency(i, j);
      if ((a != 0 && a != 1) || a != adjacency(j, i)) throw DomainError("graph: adjacency must be symmetric 0/1");
    }
  }
}

LabeledGraph to_graph(const Svn& svn) { return LabeledGraph{svn.adjacency, svn.sectors}; }

double assortativity(const LabeledGraph& g) {
  g.validate();
  const std::int64_t m = g.num_links();
  if (m == 0) throw DomainError("assortativity undefined for a graph without links");

  // Multiplying numerator and denominator by 2m keeps everything integral:
  // G = (2m * sum_ij A_ij d - sum_c K_c^2) / (4m^2 - sum_c K_c^2), K_c = degree mass of c.
  std::map<std::string, std::int64_t> mass;
  std::int64_t intra = 0;  // ordered pairs
  const auto k = g.degrees();
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    mass[g.labels[i]] += k[i];
    for (std::size_t j = 0; j < g.num_nodes(); ++j) {
      if (g.adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) && g.labels[i] == g.labels[j]) {
        ++intra;
      }
    }
  }
  std::int64_t expected = 0;
  for (const auto& [label, kc] : mass) expected += kc * kc;
  const std::int64_t num = 2 * m * intra - expected;
  const std::int64_t den = 4 * m * m - expected;
  if (den == 0) throw DomainError("assortativity undefined: every linked node shares one category");
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> reported_assortativity(const LabeledGraph& g) {
  if (g.num_links() < kMinLinksForAssortativity) return std::nullopt;
  try {
    return assortativity(g);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

double link_density(const LabeledGraph& g, std::size_t n) {
  if (n < 2) throw DomainError("link density needs at least 2 nodes");
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(g.num_links()) / pairs;
}

double link_density(const LabeledGraph& g) { return link_density(g, g.num_nodes()); }

}  // namespace balnet
