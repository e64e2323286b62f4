#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "balnet/errors.hpp"
#include "balnet/graphmetrics.hpp"
#include "testutil.hpp"

using namespace balnet;

namespace {

LabeledGraph graph(std::size_t n, const std::vector<std::pair<int, int>>& edges, std::vector<std::string> labels) {
  LabeledGraph g;
  g.adjacency = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (auto [a, b] : edges) g.adjacency(a, b) = g.adjacency(b, a) = 1;
  g.labels = std::move(labels);
  return g;
}

// Direct floating-point evaluation of the ordered-pair double sum.
double assortativity_oracle(const LabeledGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const Eigen::VectorXd k = g.adjacency.cast<double>().rowwise().sum();
  const double two_m = k.sum();
  double num = 0, expect = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (g.labels[static_cast<std::size_t>(i)] != g.labels[static_cast<std::size_t>(j)]) continue;
      num += g.adjacency(i, j) - k(i) * k(j) / two_m;
      expect += k(i) * k(j) / two_m;
    }
  return num / (two_m - expect);
}

LabeledGraph random_graph(std::size_t n, double p, std::size_t n_labels, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  std::uniform_int_distribution<std::size_t> lab(0, n_labels - 1);
  LabeledGraph g;
  g.adjacency = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < g.adjacency.rows(); ++i)
    for (Eigen::Index j = i + 1; j < g.adjacency.cols(); ++j)
      if (edge(rng)) g.adjacency(i, j) = g.adjacency(j, i) = 1;
  for (std::size_t i = 0; i < n; ++i) g.labels.push_back("S" + std::to_string(lab(rng)));
  return g;
}

}  // namespace

TEST(Assortativity, AllIntraSectorIsOne) {
  const auto g = graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}}, {"a", "a", "a", "b", "b", "b"});
  EXPECT_EQ(assortativity(g), 1.0);
}

TEST(Assortativity, BetweenSectorsIsNegative) {
  const auto g = graph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, {"a", "a", "b", "b"});
  EXPECT_LT(assortativity(g), 0.0);
  EXPECT_DOUBLE_EQ(assortativity(g), -1.0);
}

TEST(Assortativity, MatchesDirectSum) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_graph(30, 0.15, 3, rng);
    EXPECT_NEAR(assortativity(g), assortativity_oracle(g), 1e-12);
  }
}

TEST(Assortativity, UndefinedCases) {
  EXPECT_THROW(assortativity(graph(3, {}, {"a", "b", "c"})), DomainError);
  EXPECT_THROW(assortativity(graph(3, {{0, 1}, {1, 2}}, {"a", "a", "a"})), DomainError);
  // Isolated nodes of another sector do not make it defined.
  EXPECT_THROW(assortativity(graph(4, {{0, 1}}, {"a", "a", "b", "b"})), DomainError);
}

TEST(Assortativity, ConfigurationNullIsCentred) {
  std::mt19937_64 rng(32);
  double sum = 0;
  for (int rep = 0; rep < 100; ++rep) {
    auto g = random_graph(100, 0.05, 4, rng);
    ASSERT_GE(g.num_links(), 200);
    sum += assortativity(g);
  }
  EXPECT_LT(std::abs(sum / 100), 0.05);
}

TEST(Assortativity, PermutationInvariant) {
  std::mt19937_64 rng(33);
  const auto g = random_graph(25, 0.2, 3, rng);
  std::vector<Eigen::Index> perm(25);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  LabeledGraph h;
  h.adjacency.resize(25, 25);
  h.labels.resize(25);
  for (Eigen::Index i = 0; i < 25; ++i) {
    h.labels[static_cast<std::size_t>(i)] = g.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    for (Eigen::Index j = 0; j < 25; ++j)
      h.adjacency(i, j) = g.adjacency(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  EXPECT_EQ(assortativity(g), assortativity(h));
}

TEST(Assortativity, OneIffEveryLinkIntra) {
  std::mt19937_64 rng(34);
  for (int rep = 0; rep < 30; ++rep) {
    auto g = random_graph(20, 0.2, 2, rng);
    const bool all_intra = [&] {
      for (Eigen::Index i = 0; i < 20; ++i)
        for (Eigen::Index j = 0; j < 20; ++j)
          if (g.adjacency(i, j) && g.labels[static_cast<std::size_t>(i)] != g.labels[static_cast<std::size_t>(j)])
            return false;
      return true;
    }();
    EXPECT_EQ(assortativity(g) == 1.0, all_intra);
  }
}

TEST(Assortativity, ContinuousUnderAddedLinks) {
  auto g = graph(8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 4}}, {"a", "a", "b", "b", "a", "a", "b", "b"});
  double prev = assortativity(g);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {5, 6}, {0, 7}, {3, 4}}) {
    g.adjacency(a, b) = g.adjacency(b, a) = 1;
    const double next = assortativity(g);
    ASSERT_TRUE(std::isfinite(next));
    EXPECT_LT(std::abs(next - prev), 1.0);
    prev = next;
  }
}

TEST(Assortativity, ReportedOnlyFromTenLinks) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 9; ++i) edges.push_back({i, i + 1});
  std::vector<std::string> labels;
  for (int i = 0; i < 12; ++i) labels.push_back(i % 2 ? "x" : "y");
  auto g = graph(12, edges, labels);
  EXPECT_FALSE(reported_assortativity(g).has_value());
  g.adjacency(10, 11) = g.adjacency(11, 10) = 1;
  ASSERT_TRUE(reported_assortativity(g).has_value());
  EXPECT_EQ(*reported_assortativity(g), assortativity(g));
}

TEST(LinkDensity, Examples) {
  std::vector<std::string> l4(4, "a");
  EXPECT_EQ(link_density(graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, l4)), 1.0);
  EXPECT_EQ(link_density(graph(4, {}, l4)), 0.0);
  EXPECT_EQ(link_density(graph(4, {{0, 1}, {1, 2}, {2, 3}}, l4)), 0.5);
  EXPECT_THROW(link_density(graph(1, {}, {"a"})), DomainError);
}

TEST(LabeledGraph, ValidateAndDegrees) {
  auto g = graph(3, {{0, 1}, {1, 2}}, {"a", "b", "c"});
  EXPECT_EQ(g.num_links(), 2);
  EXPECT_EQ(g.degrees(), (std::vector<std::int64_t>{1, 2, 1}));
  g.adjacency(0, 2) = 1;
  EXPECT_THROW(g.validate(), DomainError);
}
