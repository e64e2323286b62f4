#include "balnet/svn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "balnet/csv.hpp"
#include "balnet/errors.hpp"
#include "balnet/matrix_io.hpp"

namespace balnet {

namespace {

double log_choose(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

Polarity parse_polarity(std::string_view name) {
  if (name == "positive") return Polarity::kPositive;
  if (name == "negative") return Polarity::kNegative;
  throw DomainError("unknown polarity '" + std::string(name) + "' (expected positive|negative)");
}

std::string_view to_string(Polarity p) { return p == Polarity::kPositive ? "positive" : "negative"; }

double link_pvalue(std::int64_t c, std::int64_t k_i, std::int64_t k_j, std::int64_t T) {
  if (T < 0 || k_i < 0 || k_j < 0 || k_i > T || k_j > T || c < 0 || c > std::min(k_i, k_j)) {
    throw DomainError("link_pvalue: arguments out of range (c=" + std::to_string(c) + ", k_i=" +
                      std::to_string(k_i) + ", k_j=" + std::to_string(k_j) + ", T=" + std::to_string(T) + ")");
  }
  const std::int64_t lo = std::max<std::int64_t>(0, k_i + k_j - T);
  const std::int64_t hi = std::min(k_i, k_j);
  if (c <= lo) return 1.0;

  auto log_term = [&](std::int64_t x) {
    return log_choose(k_i, x) + log_choose(T - k_i, k_j - x) - log_choose(T, k_j);
  };
  // Sum whichever side of the mode is shorter; near p = 1 the complement of
  // the left tail is far more accurate than a long right-tail sum.
  const double mode = static_cast<double>(k_i + 1) * static_cast<double>(k_j + 1) / static_cast<double>(T + 2);
  if (static_cast<double>(c) > mode) {
    // First tail term in log space, the rest by the term ratio
    // t(x+1)/t(x) = (k_i - x)(k_j - x) / ((x + 1)(T - k_i - k_j + x + 1)).
    double term = std::exp(log_term(c));
    double sum = 0.0;
    for (std::int64_t x = c; x <= hi; ++x) {
      sum += term;
      if (x == hi) break;
      term *= static_cast<double>((k_i - x) * (k_j - x)) / static_cast<double>((x + 1) * (T - k_i - k_j + x + 1));
    }
    return std::clamp(sum, 0.0, 1.0);
  }
  // P(X <= c - 1) walking down: t(x-1)/t(x) = x (T - k_i - k_j + x) / ((k_i - x + 1)(k_j - x + 1)).
  double term = std::exp(log_term(c - 1));
  double left = 0.0;
  for (std::int64_t x = c - 1; x >= lo; --x) {
    left += term;
    if (x == lo) break;
    term *= static_cast<double>(x * (T - k_i - k_j + x)) / static_cast<double>((k_i - x + 1) * (k_j - x + 1));
  }
  return std::clamp(1.0 - left, 0.0, 1.0);
}

std::optional<double> bh_threshold(std::span<const double> pvalues, double alpha,
                                   std::optional<std::size_t> num_tests) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("FDR level must lie in (0, 1)");
  const std::size_t m = num_tests.value_or(pvalues.size());
  if (m < pvalues.size()) throw DomainError("BH: fewer tests declared than p-values given");
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t r = sorted.size(); r > 0; --r) {
    if (sorted[r - 1] <= static_cast<double>(r) * alpha / static_cast<double>(m)) return sorted[r - 1];
  }
  return std::nullopt;
}

std::vector<std::size_t> bh_select(std::span<const double> pvalues, double alpha,
                                   std::optional<std::size_t> num_tests) {
  std::vector<std::size_t> out;
  const auto thr = bh_threshold(pvalues, alpha, num_tests);
  if (!thr) return out;
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    if (pvalues[i] <= *thr) out.push_back(i);
  }
  return out;
}

Svn build_svn(const BinaryPanel& b, double alpha, Polarity polarity) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("FDR level must lie in (0, 1)");
  const auto T = static_cast<std::int64_t>(b.values.rows());
  const auto N = b.values.cols();
  const Eigen::MatrixXd up = ((b.values.cast<double>().array() + 1.0) * 0.5).matrix();
  const Eigen::MatrixXd both_up = up.transpose() * up;
  const Eigen::VectorXd up_days = up.colwise().sum().transpose();

  std::vector<LinkTest> tests;
  tests.reserve(static_cast<std::size_t>(N * (N - 1) / 2));
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto ki = static_cast<std::int64_t>(up_days(i));
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const auto kj = static_cast<std::int64_t>(up_days(j));
      const auto n11 = static_cast<std::int64_t>(both_up(i, j));
      LinkTest t{static_cast<std::size_t>(i), static_cast<std::size_t>(j), n11, ki, kj, T, 1.0};
      if (polarity == Polarity::kPositive) {
        t.p = link_pvalue(n11, ki, kj, T);
      } else {
        // i up while j down, and j up while i down.
        const double p_ij = link_pvalue(ki - n11, ki, T - kj, T);
        const double p_ji = link_pvalue(kj - n11, kj, T - ki, T);
        if (p_ij <= p_ji) {
          t.c = ki - n11;
          t.k_j = T - kj;
        } else {
          t.c = kj - n11;
          t.k_i = kj;
          t.k_j = T - ki;
        }
        t.p = std::min(1.0, 2.0 * std::min(p_ij, p_ji));
      }
      tests.push_back(t);
    }
  }

  std::vector<double> p(tests.size());
  std::transform(tests.begin(), tests.end(), p.begin(), [](const LinkTest& t) { return t.p; });

  Svn svn;
  svn.assets = b.assets;
  svn.sectors = b.sectors;
  svn.adjacency = Eigen::MatrixXi::Zero(N, N);
  svn.polarity = polarity;
  svn.alpha = alpha;
  svn.num_tests = tests.size();
  if (!tests.empty()) svn.threshold = bh_threshold(p, alpha);
  if (svn.threshold) {
    for (const auto& t : tests) {
      if (t.p > *svn.threshold) continue;
      svn.links.push_back(t);
      const auto i = static_cast<Eigen::Index>(t.i);
      const auto j = static_cast<Eigen::Index>(t.j);
      svn.adjacency(i, j) = svn.adjacency(j, i) = 1;
    }
  }
  return svn;
}

std::string svn_edges_csv(const Svn& svn) {
  std::string out = "i,j,p,polarity\n";
  const std::string pol(to_string(svn.polarity));
  for (const auto& l : svn.links) {
    out += csv::join({svn.assets[l.i], svn.assets[l.j], csv::format_number(l.p), pol});
    out.push_back('\n');
  }
  return out;
}

std::string svn_adjacency_csv(const Svn& svn) { return matrix_to_csv(svn.assets, svn.adjacency); }

}  // namespace balnet
