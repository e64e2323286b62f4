#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "balnet/errors.hpp"
#include "balnet/experiment.hpp"
#include "balnet/synth.hpp"
#include "testutil.hpp"

using namespace balnet;
using testutil::make_returns;

namespace {

using Labels = std::vector<std::uint8_t>;

double pairwise_auc(const Labels& y, const std::vector<double>& s) {
  double wins = 0, total = 0;
  for (std::size_t a = 0; a < y.size(); ++a)
    for (std::size_t b = 0; b < y.size(); ++b)
      if (y[a] == 1 && y[b] == 0) {
        total += 1;
        wins += s[a] > s[b] ? 1.0 : s[a] == s[b] ? 0.5 : 0.0;
      }
  return wins / total;
}

ReturnPanel stacked(const Eigen::MatrixXd& in, const Eigen::MatrixXd& out) {
  Eigen::MatrixXd both(in.rows() + out.rows(), in.cols());
  both << in, out;
  return make_returns(both);
}

PipelineOptions with_kind(CorrKind k) {
  PipelineOptions o;
  o.corr_kind = k;
  return o;
}

SignChangeDataset fixture(const std::vector<double>& delta, const Labels& labels) {
  SignChangeDataset ds;
  ds.labels = labels;
  ds.delta_in = delta;
  for (std::size_t k = 0; k < delta.size(); ++k) {
    ds.pairs.push_back({0, k + 1});
    ds.absphi_in.push_back(std::abs(delta[k]) / 2.0);
    ds.scores_delta.push_back(-delta[k]);
    ds.scores_absphi.push_back(-ds.absphi_in.back());
  }
  return ds;
}

}  // namespace

TEST(Roc, Examples) {
  const Labels y{1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(roc(y, std::vector<double>{0.9, 0.8, 0.7, 0.1}).auc, 0.75);
  EXPECT_DOUBLE_EQ(roc(y, std::vector<double>{0.9, 0.1, 0.8, 0.2}).auc, 1.0);
  EXPECT_DOUBLE_EQ(roc(y, std::vector<double>{3, 3, 3, 3}).auc, 0.5);
  EXPECT_THROW(roc(Labels{1, 1}, std::vector<double>{0.1, 0.2}), DomainError);
  EXPECT_THROW(roc(Labels{1, 0}, std::vector<double>{0.1}), DomainError);
}

TEST(Roc, CurveIsMonotoneAndAreaMatchesRankStatistic) {
  std::mt19937_64 rng(51);
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> coarse(0, 6);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rep % 60);
    Labels y(n);
    std::vector<double> s(n);
    do {
      for (auto& v : y) v = coin(rng) ? 1 : 0;
    } while (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0);
    for (auto& v : s) v = rep % 2 ? coarse(rng) : std::normal_distribution<double>()(rng);
    const auto r = roc(y, s);
    ASSERT_EQ(r.points.front().fpr, 0.0);
    ASSERT_EQ(r.points.front().tpr, 0.0);
    ASSERT_EQ(r.points.back().fpr, 1.0);
    ASSERT_EQ(r.points.back().tpr, 1.0);
    for (std::size_t k = 1; k < r.points.size(); ++k) {
      ASSERT_GE(r.points[k].fpr, r.points[k - 1].fpr);
      ASSERT_GE(r.points[k].tpr, r.points[k - 1].tpr);
    }
    ASSERT_NEAR(r.auc, pairwise_auc(y, s), 1e-12);
    ASSERT_NEAR(trapezoid_area(r.points), r.auc, 1e-12);
    ASSERT_NEAR(rank_auc(y, s), r.auc, 1e-12);
  }
}

TEST(Roc, MonotoneTransformAndLabelSymmetry) {
  std::mt19937_64 rng(52);
  std::uniform_int_distribution<int> coarse(-3, 3);
  for (int rep = 0; rep < 100; ++rep) {
    Labels y(40);
    std::vector<double> s(40), t(40), neg(40);
    Labels flipped(40);
    for (std::size_t k = 0; k < 40; ++k) {
      y[k] = static_cast<std::uint8_t>(k % 3 == 0);
      s[k] = coarse(rng);
      t[k] = std::exp(s[k]) * 5 + 1;
      neg[k] = -s[k];
      flipped[k] = static_cast<std::uint8_t>(1 - y[k]);
    }
    const double a = roc(y, s).auc;
    EXPECT_NEAR(roc(y, t).auc, a, 1e-12);
    EXPECT_NEAR(roc(flipped, neg).auc, a, 1e-12);
  }
}

TEST(StabilityProfile, Examples) {
  const std::vector<double> delta{-0.9, -0.5, -0.2, 0.1, 0.3, 0.8};
  const auto none = stability_profile(fixture(delta, Labels(6, 0)), Discriminator::kDelta);
  const auto all = stability_profile(fixture(delta, Labels(6, 1)), Discriminator::kDelta);
  ASSERT_EQ(none.size(), 40u);
  std::size_t counted = 0;
  for (std::size_t b = 0; b < none.size(); ++b) {
    counted += none[b].count;
    if (none[b].count == 0) {
      EXPECT_FALSE(none[b].p_preserved.has_value());
    } else {
      EXPECT_EQ(*none[b].p_preserved, 1.0);
      EXPECT_EQ(*all[b].p_preserved, 0.0);
    }
  }
  EXPECT_EQ(counted, 6u);
  EXPECT_NEAR(none.front().center, -0.975, 1e-12);

  const auto mixed = stability_profile(fixture(delta, Labels{1, 1, 0, 0, 0, 0}), Discriminator::kDelta);
  for (const auto& bin : mixed)
    if (bin.count > 0 && bin.center > 0) EXPECT_EQ(*bin.p_preserved, 1.0);

  const auto phi = stability_profile(fixture(delta, Labels(6, 0)), Discriminator::kAbsPhi, 0.1);
  EXPECT_EQ(phi.size(), 10u);
  EXPECT_THROW(stability_profile(fixture(delta, Labels(6, 0)), Discriminator::kDelta, 0.0), DomainError);
  EXPECT_THROW(stability_profile(SignChangeDataset{}, Discriminator::kDelta), DomainError);
}

TEST(BuildDataset, IdenticalWindowsHaveNoSwitches) {
  const Eigen::MatrixXd x = testutil::gaussian(40, 12, 53);
  for (auto kind : {CorrKind::kPhi, CorrKind::kPearson, CorrKind::kPartialPearson}) {
    const auto ds = build_dataset(stacked(x, x), WindowRef{39, 40}, WindowRef{79, 40}, with_kind(kind));
    EXPECT_EQ(ds.num_pairs(), 66u);
    EXPECT_EQ(ds.num_switches(), 0u);
    EXPECT_EQ(ds.H_in, ds.H_out);
  }
}

TEST(BuildDataset, NegatedHalfSwitchesCrossPairs) {
  // With raw-return correlations, negating a column negates its row and column exactly.
  const Eigen::MatrixXd x = testutil::gaussian(60, 10, 54);
  Eigen::MatrixXd y = x;
  y.rightCols(5) *= -1.0;
  const auto ds = build_dataset(stacked(x, y), WindowRef{59, 60}, WindowRef{119, 60}, with_kind(CorrKind::kPartialPearson));
  const auto in = partial_pearson(make_returns(x));
  for (std::size_t k = 0; k < ds.num_pairs(); ++k) {
    const auto [i, j] = ds.pairs[k];
    const bool cross = (i < 5) != (j < 5);
    const bool phi_zero = in.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0;
    EXPECT_EQ(ds.labels[k] == 1, cross && !phi_zero) << i << "," << j;
  }
}

TEST(BuildDataset, NegatedHalfOnPhiMatrices) {
  const auto b = testutil::random_binary(50, 8, 55);
  const auto in = phi_matrix(b);
  auto out = in;
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      if ((i < 4) != (j < 4)) out.values(i, j) = -in.values(i, j);
  const auto ds = build_dataset(in, out);
  for (std::size_t k = 0; k < ds.num_pairs(); ++k) {
    const auto [i, j] = ds.pairs[k];
    const double v = in.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    EXPECT_EQ(ds.labels[k] == 1, (i < 4) != (j < 4) && v != 0.0);
    EXPECT_DOUBLE_EQ(ds.scores_absphi[k], -std::abs(v));
    EXPECT_DOUBLE_EQ(ds.scores_delta[k], -ds.delta_in[k]);
  }
}

TEST(BuildDataset, IntersectsAssetSets) {
  auto r = make_returns(testutil::gaussian(60, 6, 56));
  r.present(10, 1) = false;  // A1 gone from the in window
  r.present(45, 4) = false;  // A4 gone from the out window
  const auto ds = build_dataset(r, WindowRef{29, 30}, WindowRef{59, 30}, with_kind(CorrKind::kPhi));
  EXPECT_EQ(ds.assets, (std::vector<std::string>{"A0", "A2", "A3", "A5"}));
  EXPECT_EQ(ds.num_pairs(), 6u);
  EXPECT_DOUBLE_EQ(ds.volatility_in, volatility(slice_rows(r, 29, 30)));
}

TEST(BuildDataset, Errors) {
  const auto r = make_returns(testutil::gaussian(60, 6, 57));
  const auto o = with_kind(CorrKind::kPhi);
  EXPECT_THROW(build_dataset(r, WindowRef{29, 30}, WindowRef{40, 30}, o), DomainError);
  EXPECT_THROW(build_dataset(r, WindowRef{29, 40}, WindowRef{59, 30}, o), DataError);
  EXPECT_THROW(build_dataset(r, WindowRef{29, 30}, WindowRef{69, 40}, o), DataError);
  auto sparse = r;
  for (Eigen::Index i = 0; i < 4; ++i) sparse.present(5, i) = false;
  EXPECT_THROW(build_dataset(sparse, WindowRef{29, 30}, WindowRef{59, 30}, o), DataError);
}

TEST(BuildDataset, FromPricesOutWindowStartsNextDay) {
  SynthSpec spec;
  spec.n_assets = 10;
  spec.n_days = 101;
  const auto panel = generate(spec);
  const auto r = log_returns(panel);
  const auto a = build_dataset(panel, r.dates[49], 50, 50, PipelineOptions{});
  const auto b = build_dataset(r, WindowRef{49, 50}, WindowRef{99, 50}, PipelineOptions{});
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.scores_delta, b.scores_delta);
  EXPECT_THROW(build_dataset(panel, r.dates[49], 50, 51, PipelineOptions{}), DataError);
  EXPECT_THROW(build_dataset(panel, "1999-01-01", 5, 5, PipelineOptions{}), DataError);
}

TEST(BuildDataset, Deterministic) {
  const auto r = make_returns(testutil::gaussian(100, 15, 58));
  const auto a = build_dataset(r, WindowRef{49, 50}, WindowRef{99, 50}, PipelineOptions{});
  const auto b = build_dataset(r, WindowRef{49, 50}, WindowRef{99, 50}, PipelineOptions{});
  EXPECT_EQ(a.pairs, b.pairs);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.scores_delta, b.scores_delta);
  EXPECT_EQ(a.scores_absphi, b.scores_absphi);
}

TEST(ScoreDataset, ConstantDeltaGivesHalf) {
  // All-positive in-sample signs make every Delta equal to one.
  auto ds = fixture({1, 1, 1, 1}, Labels{1, 0, 0, 1});
  const auto rec = score_dataset(ds);
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->auc_delta, 0.5);
  EXPECT_FALSE(score_dataset(fixture({1, 1}, Labels{0, 0})).has_value());
}

TEST(Grid, DefaultWindowLengths) {
  const auto t = default_window_lengths();
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t.front(), 20u);
  EXPECT_EQ(t.back(), 2000u);
  for (std::size_t k = 1; k < t.size(); ++k) {
    EXPECT_NEAR(static_cast<double>(t[k]) / 20.0, std::pow(100.0, k / 9.0), 0.5 / 20.0 + 1e-9);
  }
}

TEST(Grid, FeasibleEnds) {
  EXPECT_EQ(feasible_ends(10, 3, 2, 1), (std::vector<std::size_t>{2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(feasible_ends(10, 3, 2, 3), (std::vector<std::size_t>{2, 5}));
  EXPECT_TRUE(feasible_ends(10, 3, 2, 50).empty());
  EXPECT_TRUE(feasible_ends(4, 3, 2, 1).empty());
  EXPECT_THROW(feasible_ends(10, 3, 2, 0), DomainError);
}

TEST(Grid, StepBeyondHistoryIsEmpty) {
  const auto r = make_returns(testutil::gaussian(80, 8, 59));
  const auto g = run_grid(r, {10, 20}, 500, PipelineOptions{});
  EXPECT_TRUE(g.records.empty());
  ASSERT_EQ(g.cells.size(), 4u);
  for (const auto& c : g.cells) {
    EXPECT_EQ(c.n_records, 0u);
    EXPECT_TRUE(std::isnan(c.mean_auc_delta));
  }
}

TEST(Grid, BipolarHighDimensionalBeatsCoinFlip) {
  SynthSpec spec;
  spec.n_assets = 60;
  spec.n_days = 400;
  spec.rho_in = 0.2;
  spec.rho_out = -0.05;
  const auto g = run_grid(generate(spec), {30}, 10, PipelineOptions{}, 2);
  const auto& c = g.cell(30, 30);
  ASSERT_GT(c.n_records, 10u);
  EXPECT_GT(c.mean_auc_delta, 0.5);
  double sum = 0;
  for (const auto& r : g.records) sum += r.auc_delta;
  EXPECT_DOUBLE_EQ(c.mean_auc_delta, sum / static_cast<double>(g.records.size()));
  EXPECT_NEAR(g.records.front().q_in, 0.5, 1e-12);
}

TEST(Grid, ResultIndependentOfJobsAndSorted) {
  SynthSpec spec;
  spec.n_assets = 20;
  spec.n_days = 200;
  const auto p = generate(spec);
  const auto a = run_grid(p, {40, 20}, 7, PipelineOptions{}, 1);
  const auto b = run_grid(p, {20, 40, 20}, 7, PipelineOptions{}, 4);
  EXPECT_EQ(a.t_values, (std::vector<std::size_t>{20, 40}));
  EXPECT_EQ(records_csv(a.records), records_csv(b.records));
  EXPECT_EQ(cells_csv(a), cells_csv(b));
  for (std::size_t k = 1; k < a.records.size(); ++k) {
    const auto& x = a.records[k - 1];
    const auto& y = a.records[k];
    EXPECT_LE(std::tie(x.T_in, x.T_out, x.end_date), std::tie(y.T_in, y.T_out, y.end_date));
  }
}

TEST(Grid, HeatmapLayout) {
  SynthSpec spec;
  spec.n_assets = 20;
  spec.n_days = 150;
  const auto g = run_grid(generate(spec), {20, 30}, 10, PipelineOptions{});
  const auto t = csv::parse(heatmap_csv(g, HeatmapValue::kDifference));
  EXPECT_EQ(t.header, (std::vector<std::string>{"T_in", "20", "30"}));
  ASSERT_EQ(t.rows.size(), 2u);
  const auto& c = g.cell(30, 20);
  EXPECT_EQ(t.rows[1].cells[1], csv::format_number(c.mean_auc_delta - c.mean_auc_absphi));
}

TEST(Association, Examples) {
  std::vector<ExperimentRecord> recs(12);
  std::mt19937_64 rng(60);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& r : recs) {
    r.H_out = u(rng);
    r.auc_delta = -r.H_out;
  }
  const auto a = h_auc_association(recs);
  EXPECT_NEAR(a.pearson, -1.0, 1e-12);
  EXPECT_NEAR(a.spearman, -1.0, 1e-12);
  EXPECT_THROW(h_auc_association(std::span(recs).first(2)), DomainError);

  // Shuffled pairing: the mean correlation over many shuffles sits near zero.
  std::vector<ExperimentRecord> big(200);
  for (auto& r : big) {
    r.H_out = u(rng);
    r.auc_delta = -r.H_out;
  }
  double sum = 0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> h;
    for (const auto& r : big) h.push_back(r.H_out);
    std::shuffle(h.begin(), h.end(), rng);
    for (std::size_t k = 0; k < big.size(); ++k) big[k].H_out = h[k];
    sum += h_auc_association(big).pearson;
  }
  EXPECT_LT(std::abs(sum / 50), 0.05);
}

TEST(Timeseries, RowsAndOverlap) {
  SynthSpec spec;
  spec.n_assets = 30;
  spec.n_days = 301;
  const auto r = log_returns(generate(spec));
  const auto rows = run_timeseries(r, 100, 50, PipelineOptions{}, 2);
  // End rows 99, 149, ..., 299; overlap needs the following 100 returns.
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows.front().end_date, r.dates[99]);
  EXPECT_TRUE(rows[0].v1_overlap.has_value());
  EXPECT_FALSE(rows.back().v1_overlap.has_value());
  for (const auto& row : rows) {
    EXPECT_GE(row.H, -1.0);
    EXPECT_LE(row.H, 1.0);
    EXPECT_EQ(row.n, 30u);
    EXPECT_GT(row.lambda1_frac, 0.0);
  }
  const auto t = csv::parse(timeseries_csv(rows));
  EXPECT_EQ(t.header.front(), "date");
  EXPECT_EQ(t.rows.size(), 5u);
}
