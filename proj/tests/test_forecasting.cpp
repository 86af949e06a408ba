#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "test_util.hpp"

using namespace mvkpca;

namespace {
std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "mvkpca_forecasting_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path;
}
}  // namespace

TEST(LagEmbed, HandExample) {
  const LagEmbedding e = lag_embed({1, 2, 3, 4}, LagSpec{1});
  ASSERT_EQ(e.X.rows(), 2);
  EXPECT_EQ(e.X, (MatrixXd(2, 2) << 2, 1, 3, 2).finished());
  EXPECT_EQ(e.y, (VectorXd(2) << 3, 4).finished());
}

TEST(LagEmbed, BoundaryAndConstant) {
  const LagEmbedding one = lag_embed({5, 6, 7, 8, 9}, LagSpec{3});
  EXPECT_EQ(one.X.rows(), 1);
  EXPECT_EQ(one.y(0), 9.0);
  const LagEmbedding c = lag_embed(Series(10, 2.5), LagSpec{2});
  EXPECT_TRUE((c.X.array() == 2.5).all());
  EXPECT_TRUE((c.y.array() == 2.5).all());
  EXPECT_THROW(lag_embed({1, 2, 3}, LagSpec{2}), InvalidArgument);
  EXPECT_THROW(lag_embed({1, 2, 3}, LagSpec{0}), InvalidArgument);
}

TEST(LagEmbed, ShapeLawAndShiftStructure) {
  DeterministicRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int p = 1 + static_cast<int>(rng.uniform() * 20);
    const Index t = p + 2 + static_cast<Index>(rng.uniform() * 60);
    Series s(static_cast<std::size_t>(t));
    for (auto& v : s) v = rng.normal();
    const LagEmbedding e = lag_embed(s, LagSpec{p});
    ASSERT_EQ(e.X.rows(), t - p - 1);
    ASSERT_EQ(e.X.cols(), p + 1);
    for (Index r = 0; r + 1 < e.X.rows(); ++r) {
      EXPECT_EQ(e.X.row(r).head(p), e.X.row(r + 1).tail(p));
      EXPECT_EQ(e.X(r + 1, 0), e.y(r));
    }
  }
}

TEST(LastWindow, NewestFirst) {
  EXPECT_EQ(last_window({1, 2, 3, 4}, LagSpec{2}), (VectorXd(3) << 4, 3, 2).finished());
  EXPECT_THROW(last_window({1, 2}, LagSpec{2}), InvalidArgument);
}

TEST(RecursiveForecast, RecoversLinearAr1) {
  Series s{1.0};
  for (int i = 0; i < 24; ++i) s.push_back(0.5 * s.back());
  const LagEmbedding e = lag_embed(s, LagSpec{1});
  const MultiViewDataset data = nar_dataset(e);
  const VectorXd window = last_window(s, LagSpec{1});
  const auto p = train_primal_eig(data, 1);
  const auto d = train_dual_eig(data, 1);
  const Series fp = recursive_forecast(p.model, window, 8);
  const Series fd = recursive_forecast(d.model, window, 8);
  for (int k = 1; k <= 8; ++k) {
    EXPECT_NEAR(fp[k - 1], std::pow(0.5, k) * s.back(), 1e-6);
    EXPECT_NEAR(fd[k - 1], std::pow(0.5, k) * s.back(), 1e-6);
  }
}

TEST(RecursiveForecast, ZeroHorizonAndErrors) {
  const auto& data = testutil::sine_data();
  const auto p = train_primal_eig(data.dataset, 4);
  EXPECT_TRUE(recursive_forecast(p.model, data.window, 0).empty());
  EXPECT_THROW(recursive_forecast(p.model, data.window, -1), InvalidArgument);
  EXPECT_THROW(recursive_forecast(p.model, VectorXd::Zero(5), 3), DimensionError);
}

TEST(RecursiveForecast, PrimalDualIdenticalAndDeterministic) {
  const auto& data = testutil::sine_data();
  const auto p = train_primal_eig(data.dataset, 4);
  const auto d = train_dual_eig(data.dataset, 4);
  const Series fp = recursive_forecast(p.model, data.window, 100);
  const Series fd = recursive_forecast(d.model, data.window, 100);
  ASSERT_EQ(fp.size(), 100u);
  EXPECT_LE(testutil::max_abs_diff(fp, fd), 1e-6);
  EXPECT_EQ(fp, recursive_forecast(p.model, data.window, 100));
}

TEST(RecursiveForecast, ComponentCountMonotone) {
  const auto& data = testutil::sine_data();
  double previous = std::numeric_limits<double>::infinity();
  for (Index s = 1; s <= 4; ++s) {
    const auto t = train_primal_eig(data.dataset, s);
    const double err = mse(recursive_forecast(t.model, data.window, 100), data.split.test);
    EXPECT_LE(err, previous) << "s=" << s;
    previous = err;
  }
}

TEST(SumOfSines, SingleTermPeak) {
  const Series s = gen_sum_of_sines(200, {1.0}, {100.0}, 1e4);
  double peak = 0.0;
  for (double v : s) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 1.0, 1e-12);
  EXPECT_EQ(s[0], 0.0);
}

TEST(SumOfSines, DefaultsBoundedAndSplit) {
  const Series s = gen_sum_of_sines(500);
  ASSERT_EQ(s.size(), 500u);
  for (double v : s) {
    EXPECT_LE(v, 1.2);
    EXPECT_GE(v, -1.2);
  }
  const auto& data = testutil::sine_data();
  EXPECT_EQ(data.embedding.X.rows(), 400);
  EXPECT_EQ(data.embedding.X.cols(), 41);
  EXPECT_EQ(data.split.test.size(), 100u);
  EXPECT_THROW(gen_sum_of_sines(10, {1.0}, {1.0, 2.0}), InvalidArgument);
}

TEST(LogisticMap, BoundedAndDeterministic) {
  const Series a = gen_logistic_map(300, 3.9, 4);
  EXPECT_EQ(a, gen_logistic_map(300, 3.9, 4));
  EXPECT_NE(a, gen_logistic_map(300, 3.9, 5));
  for (double v : a) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_NEAR(a[i], 3.9 * a[i - 1] * (1 - a[i - 1]), 1e-15);
}

TEST(LoadSeriesCsv, Examples) {
  EXPECT_EQ(load_series_csv(temp_file("plain.csv", "1\n2\n3\n").string()), (Series{1, 2, 3}));
  EXPECT_EQ(load_series_csv(temp_file("header.csv", "value\n1.5\n").string()), (Series{1.5}));
  EXPECT_THROW(load_series_csv(temp_file("empty.csv", "").string()), ParseError);
  EXPECT_THROW(load_series_csv(temp_file("header_only.csv", "value\n").string()), ParseError);
  EXPECT_THROW(load_series_csv("/nonexistent/series.csv"), ParseError);
}

TEST(LoadSeriesCsv, ErrorCarriesLineNumber) {
  try {
    load_series_csv(temp_file("bad.csv", "value\n1\n2\nabc\n4\n").string());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
}

TEST(Mse, Examples) {
  EXPECT_EQ(mse({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(mse({0, 0}, {1, 1}), 1.0);
  EXPECT_EQ(mse({1, 2}, {2, 4}), 2.5);
  EXPECT_THROW(mse({1}, {1, 2}), DimensionError);
  EXPECT_THROW(mse({}, {}), InvalidArgument);
}
