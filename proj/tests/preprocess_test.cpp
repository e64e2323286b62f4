#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "balnet/errors.hpp"
#include "balnet/preprocess.hpp"
#include "testutil.hpp"

using namespace balnet;
using testutil::make_returns;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

PricePanel prices_of(const Eigen::MatrixXd& px) {
  PricePanel p;
  for (Eigen::Index t = 0; t < px.rows(); ++t) p.dates.push_back(testutil::date_label(static_cast<std::size_t>(t)));
  for (Eigen::Index i = 0; i < px.cols(); ++i) {
    p.assets.push_back("P" + std::to_string(i));
    p.sectors.push_back("UNKNOWN");
  }
  p.prices = px;
  p.present = px.array().isFinite();
  return p;
}

ReturnPanel one_day(std::vector<double> values) {
  ReturnPanel r = make_returns(Eigen::Map<Eigen::RowVectorXd>(values.data(), 1, static_cast<Eigen::Index>(values.size())));
  for (Eigen::Index i = 0; i < r.returns.cols(); ++i) r.present(0, i) = std::isfinite(r.returns(0, i));
  return r;
}

}  // namespace

TEST(LogReturns, Examples) {
  Eigen::MatrixXd px(3, 3);
  px << 100, 100, kNaN,
        100, 100 * std::exp(1.0), 5,
        100, 50, 10;
  const auto r = log_returns(prices_of(px));
  ASSERT_EQ(r.num_dates(), 2u);
  EXPECT_EQ(r.dates.front(), "d00001");
  EXPECT_DOUBLE_EQ(r.returns(0, 0), 0.0);
  EXPECT_NEAR(r.returns(0, 1), 1.0, 1e-15);
  EXPECT_FALSE(r.present(0, 2));
  EXPECT_TRUE(r.present(1, 2));
  EXPECT_NEAR(r.returns(1, 2), std::log(2.0), 1e-15);
}

TEST(LogReturns, PresentIffBothPricesPresent) {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution gap(0.3);
  Eigen::MatrixXd px(40, 6);
  for (Eigen::Index t = 0; t < px.rows(); ++t)
    for (Eigen::Index i = 0; i < px.cols(); ++i) px(t, i) = gap(rng) ? kNaN : 10.0 + static_cast<double>(t + i);
  const auto p = prices_of(px);
  const auto r = log_returns(p);
  for (Eigen::Index t = 0; t < r.returns.rows(); ++t)
    for (Eigen::Index i = 0; i < r.returns.cols(); ++i) {
      ASSERT_EQ(r.present(t, i), p.present(t, i) && p.present(t + 1, i));
      if (r.present(t, i)) ASSERT_TRUE(std::isfinite(r.returns(t, i)));
    }
  EXPECT_THROW(log_returns(prices_of(Eigen::MatrixXd::Ones(1, 2))), DataError);
}

TEST(MarketMode, Examples) {
  EXPECT_DOUBLE_EQ(market_mode(one_day({1, 2, 3}))[0], 2.0);
  EXPECT_DOUBLE_EQ(market_mode(one_day({1, 2, 3, 10}))[0], 2.5);
  EXPECT_DOUBLE_EQ(market_mode(one_day({0.7, 0.7, 0.7}))[0], 0.7);
  EXPECT_DOUBLE_EQ(market_mode(one_day({3, kNaN, 1}))[0], 2.0);
  EXPECT_THROW(market_mode(one_day({kNaN, kNaN})), DataError);
}

TEST(Binarize, SignsAndTieRule) {
  Eigen::MatrixXd r(2, 3);
  r << 0.01, -0.02, 0.3,
       0.0, 0.5, -0.5;
  // Day 0 has median 0.01, so the deviations are (0, -0.03, 0.29); day 1 has
  // median 0. Column 0 ties on both days, is +1 throughout, and is dropped.
  const auto b = binarize(make_returns(r));
  ASSERT_EQ(b.assets, (std::vector<std::string>{"A1", "A2"}));
  EXPECT_EQ(b.values(0, 0), -1);
  EXPECT_EQ(b.values(0, 1), +1);
  EXPECT_EQ(b.values(1, 0), +1);
  EXPECT_EQ(b.values(1, 1), -1);
}

TEST(Binarize, DeviationExample) {
  // m_t = 0 on both days, so r - m equals r.
  Eigen::MatrixXd r(2, 5);
  r << 0.01, -0.02, 0.3, 0.0, -0.5,
       -0.01, 0.02, -0.3, 0.0, 0.5;
  const auto b = binarize(make_returns(r));
  ASSERT_EQ(b.num_assets(), 4u);  // the all-tie column is constant
  EXPECT_EQ(b.values(0, 0), +1);
  EXPECT_EQ(b.values(0, 1), -1);
  EXPECT_EQ(b.values(0, 2), +1);
  EXPECT_EQ(b.values(0, 3), -1);
}

TEST(Binarize, CompleteCaseDropsGappedAsset) {
  Eigen::MatrixXd r(3, 3);
  r << 0.1, -0.1, 0.0,
       -0.1, 0.1, 0.0,
       0.1, kNaN, 0.2;
  auto rp = make_returns(r);
  rp.present(2, 1) = false;
  const auto b = binarize(rp);
  EXPECT_EQ(std::find(b.assets.begin(), b.assets.end(), "A1"), b.assets.end());
  for (Eigen::Index t = 0; t < b.values.rows(); ++t)
    for (Eigen::Index i = 0; i < b.values.cols(); ++i) EXPECT_TRUE(b.values(t, i) == 1 || b.values(t, i) == -1);
}

TEST(Binarize, TwoAssetsOneGapped) {
  Eigen::MatrixXd r(3, 2);
  r << 0.1, 0.2,
       -0.3, kNaN,
       0.2, 0.1;
  auto rp = make_returns(r);
  rp.present(1, 1) = false;
  // Median over the universe: day 1 has only A0, so its partial is 0 -> +1.
  // Day 0: median 0.15, A0 -> -1. Day 2: median 0.15, A0 -> +1.
  const auto b = binarize(rp);
  ASSERT_EQ(b.num_assets(), 1u);
  EXPECT_EQ(b.assets[0], "A0");
  EXPECT_EQ(b.values(0, 0), -1);
  EXPECT_EQ(b.values(1, 0), +1);
}

TEST(Binarize, NothingSurvives) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 3);
  EXPECT_THROW(binarize(make_returns(r)), DataError);
}

TEST(Binarize, MedianScopeMatters) {
  Eigen::MatrixXd r(2, 4);
  r << 0.1, 0.2, 0.3, 5.0,
       0.3, 0.2, 0.1, kNaN;
  auto rp = make_returns(r);
  rp.present(1, 3) = false;
  const auto pu = partial_returns(rp, MedianScope::kUniverse);
  const auto pw = partial_returns(rp, MedianScope::kWindow);
  EXPECT_NEAR(pu.returns(0, 0), 0.1 - 0.25, 1e-15);
  EXPECT_NEAR(pw.returns(0, 0), 0.1 - 0.2, 1e-15);
  EXPECT_EQ(parse_median_scope("window"), MedianScope::kWindow);
  EXPECT_EQ(to_string(MedianScope::kUniverse), "universe");
  EXPECT_THROW(parse_median_scope("global"), DomainError);
}

TEST(Binarize, BalancedSignsWithEvenCountAndNoTies) {
  const auto r = make_returns(testutil::gaussian(200, 20, 5));
  const auto b = binarize(r);
  ASSERT_EQ(b.num_assets(), 20u);
  for (Eigen::Index t = 0; t < b.values.rows(); ++t) {
    int sum = 0;
    for (Eigen::Index i = 0; i < b.values.cols(); ++i) sum += b.values(t, i);
    ASSERT_EQ(sum, 0) << "date " << t;
  }
}

TEST(Binarize, InvariantUnderPerDateAffineMaps) {
  const Eigen::MatrixXd raw = testutil::gaussian(120, 11, 9);
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-1.0, 1.0);
  Eigen::MatrixXd mapped = raw;
  for (Eigen::Index t = 0; t < mapped.rows(); ++t) {
    const double a = scale(rng), c = shift(rng);
    mapped.row(t) = (a * raw.row(t).array() + c).matrix();
  }
  const auto b1 = binarize(make_returns(raw));
  const auto b2 = binarize(make_returns(mapped));
  EXPECT_EQ(b1.assets, b2.assets);
  EXPECT_TRUE(b1.values == b2.values);
}

TEST(Volatility, Examples) {
  EXPECT_DOUBLE_EQ(volatility(make_returns(Eigen::MatrixXd::Zero(3, 2))), 0.0);
  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 0.02, -0.02;
  b << 0.01, 0.03;
  EXPECT_DOUBLE_EQ(volatility(make_returns(a)), 0.02);
  EXPECT_DOUBLE_EQ(volatility(make_returns(b)), 0.02);
  EXPECT_DOUBLE_EQ(volatility(one_day({0.01, kNaN, 0.03})), 0.02);
  EXPECT_THROW(volatility(one_day({kNaN})), DataError);
}

TEST(SliceRows, WindowOnReturns) {
  const auto r = make_returns(testutil::gaussian(10, 2, 1));
  const auto w = slice_window(r, r.dates[6], 4);
  EXPECT_EQ(w.dates.front(), r.dates[3]);
  EXPECT_EQ(w.num_dates(), 4u);
  EXPECT_THROW(slice_window(r, r.dates[2], 4), DataError);
  EXPECT_THROW(slice_window(r, "zzz", 1), DataError);
}
