#include "cointvar/backtest.hpp"
#include "cointvar/error.hpp"
#include "cointvar/simulate.hpp"
#include "cointvar/vecm.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pipelines.hpp"
#include "test_util.hpp"

#include <set>

using namespace cointvar;
using testutil::kind_of;
using testutil::max_abs_diff;

namespace {

TimeSeriesPanel reference_panel(Eigen::Index n, std::uint64_t seed) {
  return generate(reference_dgp(n, seed));
}

BacktestConfig small_config() {
  BacktestConfig c;
  c.windows = {60, 120};
  c.orders = {1, 2, 3};
  c.horizon = 4;
  c.origins = 25;
  c.seed = 9;
  return c;
}

void expect_same_grid(const BacktestGridResult& a, const BacktestGridResult& b) {
  ASSERT_EQ(a.cells.size(), b.cells.size());
  EXPECT_EQ(a.origins, b.origins);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].mae, b.cells[i].mae);
    EXPECT_EQ(a.cells[i].mse, b.cells[i].mse);
    EXPECT_EQ(a.cells[i].n_failed, b.cells[i].n_failed);
    ASSERT_EQ(a.cells[i].losses.size(), b.cells[i].losses.size());
    for (std::size_t k = 0; k < a.cells[i].losses.size(); ++k) {
      EXPECT_EQ(a.cells[i].losses[k].abs_loss, b.cells[i].losses[k].abs_loss);
      EXPECT_EQ(a.cells[i].losses[k].sq_loss, b.cells[i].losses[k].sq_loss);
    }
  }
}

}  // namespace

TEST(SampleOrigins, ForcedSingleIndex) {
  for (std::uint64_t seed : {0u, 1u, 12345u}) {
    auto o = sample_origins(96 + 8 + 1, 96, 8, 1, seed);
    ASSERT_EQ(o.size(), 1u);
    EXPECT_EQ(o[0], 96);
  }
}

TEST(SampleOrigins, DeterministicInSeed) {
  EXPECT_EQ(sample_origins(5000, 300, 8, 100, 4), sample_origins(5000, 300, 8, 100, 4));
  EXPECT_NE(sample_origins(5000, 300, 8, 100, 4), sample_origins(5000, 300, 8, 100, 5));
}

TEST(SampleOrigins, FullDatasetScale) {
  // 2015-01-01 through 2020-06-29 at quarter-hour resolution: 2006 days.
  const Eigen::Index n = 2006 * 96;
  auto o = sample_origins(n, 3072, 8, 1000, 1);
  ASSERT_EQ(o.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(o.begin(), o.end()));
  EXPECT_EQ(std::set<Eigen::Index>(o.begin(), o.end()).size(), 1000u);
  EXPECT_GE(o.front(), 3072);
  EXPECT_LE(o.back(), n - 8 - 1);
}

TEST(SampleOrigins, ExhaustsRangeWithoutReplacement) {
  auto o = sample_origins(50, 10, 4, 36, 3);  // range [10, 45] holds 36 indices
  ASSERT_EQ(o.size(), 36u);
  for (int i = 0; i < 36; ++i) EXPECT_EQ(o[i], 10 + i);
  EXPECT_EQ(kind_of([] { sample_origins(50, 10, 4, 37, 3); }), ErrorKind::kInsufficientRange);
  EXPECT_EQ(kind_of([] { sample_origins(10, 10, 4, 1, 3); }), ErrorKind::kInsufficientRange);
}

TEST(RunCell, ConstantPanelPersistenceHasZeroErrors) {
  const Matrix y = Matrix::Constant(200, 3, 42.0);
  auto origins = sample_origins(200, 96, 8, 20, 1);
  auto out = run_cell(y, {96, 1, 0}, origins, 8, kNoDeterministic);
  for (const auto& o : out) {
    ASSERT_TRUE(o.errors.has_value()) << o.failure;
    EXPECT_EQ(*o.errors, Matrix::Zero(8, 3));
  }
}

TEST(RunCell, ConstantPanelRecordsFailuresInsteadOfSubstituting) {
  // Any cell that has to estimate something faces an all-zero design.
  const Matrix y = Matrix::Constant(200, 3, 42.0);
  auto origins = sample_origins(200, 96, 8, 5, 1);
  for (CellSpec cell : {CellSpec{96, 2, 0}, CellSpec{96, 1, 3}, CellSpec{96, 2, 1}}) {
    auto out = run_cell(y, cell, origins, 8, kConstantTerm);
    for (const auto& o : out) {
      EXPECT_FALSE(o.errors.has_value());
      EXPECT_FALSE(o.failure.empty());
    }
  }
}

TEST(RunCell, SingleOriginMatchesStandaloneFit) {
  Matrix a(2, 2);
  a << 0.6, 0.2, -0.1, 0.5;
  const Matrix y = oracle::simulate_var({a}, Vector::Zero(2), 1.0, 500, 13);
  const Eigen::Index o = 321;
  const int window = 150, h = 8;
  for (int r = 0; r <= 2; ++r) {
    auto out = run_cell(y, {window, 1, r}, {o}, h, kConstantTerm);
    ASSERT_TRUE(out[0].errors.has_value());
    const Matrix history = y.middleRows(o - window + 1, window);
    auto model = fit_vecm(history, 1, r, kConstantTerm);
    const Matrix expected = y.middleRows(o + 1, h) - forecast_vecm(model, history, h).values;
    EXPECT_EQ(*out[0].errors, expected);
  }
}

TEST(RunCell, FullRankCellEqualsLevelVar) {
  const TimeSeriesPanel panel = reference_panel(1500, 4);
  const Matrix& y = panel.values();
  auto origins = sample_origins(y.rows(), 200, 8, 40, 2);
  for (int p = 1; p <= 3; ++p) {
    auto out = run_cell(y, {200, p, 4}, origins, 8, kConstantTerm);
    for (const auto& o : out) {
      const Matrix history = y.middleRows(o.origin - 199, 200);
      auto var = fit_var(history, p, kConstantTerm);
      const Matrix expected = y.middleRows(o.origin + 1, 8) - forecast_var(var, history, 8).values;
      ASSERT_TRUE(o.errors.has_value());
      EXPECT_LE(max_abs_diff(*o.errors, expected), 1e-8);
    }
  }
}

TEST(RunCell, ZeroRankCellEqualsDifferencedVar) {
  const TimeSeriesPanel panel = reference_panel(1500, 5);
  const Matrix& y = panel.values();
  auto origins = sample_origins(y.rows(), 200, 8, 40, 3);
  for (int p = 1; p <= 3; ++p) {
    auto out = run_cell(y, {200, p, 0}, origins, 8, kConstantTerm);
    for (const auto& o : out) {
      const Matrix history = y.middleRows(o.origin - 199, 200);
      const Matrix expected =
          y.middleRows(o.origin + 1, 8) -
          pipeline::differenced_var_forecast(history, p, kConstantTerm, 8);
      ASSERT_TRUE(o.errors.has_value());
      EXPECT_LE(max_abs_diff(*o.errors, expected), 1e-8);
    }
  }
}

TEST(RunCell, RejectsInfeasibleOrigin) {
  const Matrix y = testutil::random_walks(100, 2, 1);
  EXPECT_EQ(kind_of([&] { run_cell(y, {50, 1, 0}, {49}, 4, kConstantTerm); }),
            ErrorKind::kInvalidInput);
  EXPECT_EQ(kind_of([&] { run_cell(y, {50, 1, 0}, {96}, 4, kConstantTerm); }),
            ErrorKind::kInvalidInput);
}

TEST(RunGrid, PersistenceCellMatchesHandLoop) {
  const TimeSeriesPanel panel = reference_panel(2000, 8);
  BacktestConfig c;
  c.windows = {96};
  c.orders = {1};
  c.ranks = {0};
  c.det = kNoDeterministic;
  c.origins = 150;
  auto result = run_grid(panel, c);
  ASSERT_EQ(result.cells.size(), 1u);
  const Matrix& y = panel.values();
  double abs_total = 0.0, sq_total = 0.0;
  for (Eigen::Index o : result.origins) {
    for (int h = 1; h <= c.horizon; ++h) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        const double e = y(o + h, j) - y(o, j);
        abs_total += std::abs(e);
        sq_total += e * e;
      }
    }
  }
  const double denom = double(result.origins.size()) * c.horizon;
  EXPECT_NEAR(*result.cells[0].mae, abs_total / denom, 1e-12 * abs_total / denom);
  EXPECT_NEAR(*result.cells[0].mse, sq_total / denom, 1e-12 * sq_total / denom);
}

TEST(RunGrid, OneCellEqualsComposedRunCell) {
  const TimeSeriesPanel panel = reference_panel(1200, 10);
  BacktestConfig c;
  c.windows = {150};
  c.orders = {2};
  c.ranks = {2};
  c.origins = 60;
  c.seed = 77;
  auto result = run_grid(panel, c);
  EXPECT_EQ(result.origins, sample_origins(1200, 150, c.horizon, 60, 77));
  auto outcomes = run_cell(panel.values(), {150, 2, 2}, result.origins, c.horizon, c.det);
  std::vector<Matrix> errors;
  for (const auto& o : outcomes) errors.push_back(*o.errors);
  EXPECT_EQ(*result.cells[0].mae, mae(errors));
  EXPECT_EQ(*result.cells[0].mse, mse(errors));
}

TEST(RunGrid, CellOrderAndDefaultRanks) {
  const TimeSeriesPanel panel = reference_panel(800, 1);
  auto result = run_grid(panel, small_config());
  ASSERT_EQ(result.cells.size(), 2u * 3u * 5u);
  std::size_t i = 0;
  for (int t : {60, 120}) {
    for (int p = 1; p <= 3; ++p) {
      for (int r = 0; r <= 4; ++r) {
        EXPECT_EQ(result.cells[i].cell.window, t);
        EXPECT_EQ(result.cells[i].cell.p, p);
        EXPECT_EQ(result.cells[i].cell.rank, r);
        EXPECT_EQ(result.find(t, p, r), &result.cells[i]);
        ++i;
      }
    }
  }
  EXPECT_EQ(result.find(60, 9, 0), nullptr);
  EXPECT_EQ(result.metadata.dim, 4);
  EXPECT_EQ(result.metadata.n_obs, 800);
  EXPECT_EQ(result.metadata.data_fingerprint, fingerprint(panel));
}

TEST(RunGrid, DeterministicAcrossRunsAndThreadCounts) {
  const TimeSeriesPanel panel = reference_panel(900, 2);
  auto c = small_config();
  c.threads = 1;
  auto a = run_grid(panel, c);
  auto b = run_grid(panel, c);
  c.threads = 4;
  auto d = run_grid(panel, c);
  expect_same_grid(a, b);
  expect_same_grid(a, d);
}

TEST(RunGrid, InvalidConfig) {
  const TimeSeriesPanel panel = reference_panel(500, 2);
  auto c = small_config();
  c.horizon = 0;
  EXPECT_EQ(kind_of([&] { run_grid(panel, c); }), ErrorKind::kInvalidInput);
  c = small_config();
  c.ranks = {5};
  EXPECT_EQ(kind_of([&] { run_grid(panel, c); }), ErrorKind::kInvalidInput);
  c = small_config();
  c.windows = {4};
  EXPECT_EQ(kind_of([&] { run_grid(panel, c); }), ErrorKind::kInvalidInput);
  c = small_config();
  c.origins = 10000;
  EXPECT_EQ(kind_of([&] { run_grid(panel, c); }), ErrorKind::kInsufficientRange);
}

TEST(RunGrid, FingerprintSensitiveToData) {
  const TimeSeriesPanel a = reference_panel(100, 1);
  Matrix v = a.values();
  v(50, 2) += 1e-9;
  const TimeSeriesPanel b(v, a.timestamps(), a.labels());
  EXPECT_NE(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a), fingerprint(reference_panel(100, 1)));
}

TEST(SummarizeBest, DominatingCell) {
  BacktestGridResult result;
  result.metadata.dim = 2;
  auto cell = [](int p, int r, double loss) {
    CellResult c;
    c.cell = {96, p, r};
    c.mae = loss;
    c.mse = loss * loss;
    return c;
  };
  result.cells = {cell(1, 0, 1.0), cell(1, 1, 0.8), cell(1, 2, 0.9),
                  cell(2, 0, 1.1), cell(2, 1, 0.5), cell(2, 2, 0.95)};
  auto s = summarize_best(result, LossKind::kAbsolute);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_TRUE(s[0].available);
  EXPECT_EQ(s[0].best_p, 2);
  EXPECT_EQ(s[0].best_rank, 1);
  EXPECT_DOUBLE_EQ(*s[0].improvement_vs_diff_var, 0.5);
  EXPECT_DOUBLE_EQ(*s[0].improvement_vs_level_var, (0.9 - 0.5) / 0.9);
}

TEST(SummarizeBest, AllFailedWindowGetsNote) {
  BacktestGridResult result;
  result.metadata.dim = 1;
  CellResult failed;
  failed.cell = {96, 1, 0};
  failed.n_failed = 3;
  CellResult ok;
  ok.cell = {192, 1, 0};
  ok.mae = 1.0;
  ok.mse = 1.0;
  result.cells = {failed, ok};
  auto s = summarize_best(result, LossKind::kSquared);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_FALSE(s[0].available);
  EXPECT_FALSE(s[0].note.empty());
  EXPECT_TRUE(s[1].available);
  EXPECT_EQ(*s[1].improvement_vs_diff_var, 0.0);
  EXPECT_FALSE(s[1].improvement_vs_level_var.has_value());
}

TEST(SummarizeBest, ImprovementsNonNegativeOnRealGrid) {
  const TimeSeriesPanel panel = reference_panel(1000, 6);
  auto result = run_grid(panel, small_config());
  for (LossKind kind : {LossKind::kAbsolute, LossKind::kSquared}) {
    for (const auto& s : summarize_best(result, kind)) {
      ASSERT_TRUE(s.available);
      EXPECT_GE(*s.improvement_vs_diff_var, 0.0);
      EXPECT_GE(*s.improvement_vs_level_var, 0.0);
    }
  }
}

TEST(Combination, SelfCombinationIsDegenerate) {
  const TimeSeriesPanel panel = reference_panel(1000, 7);
  auto origins = sample_origins(1000, 200, 8, 30, 1);
  auto res = evaluate_combination(panel.values(), 200, {2, 1}, {2, 1}, origins, 8, kConstantTerm);
  EXPECT_EQ(res.model_a.abs_loss, res.model_b.abs_loss);
  EXPECT_EQ(res.combined.abs_loss, res.model_a.abs_loss);
  EXPECT_FALSE(res.dm_abs_vs_a.result.has_value());
  EXPECT_NE(res.dm_abs_vs_a.note.find("degenerate-variance"), std::string::npos);
}

TEST(Combination, ComponentsMatchCells) {
  const TimeSeriesPanel panel = reference_panel(1200, 8);
  auto origins = sample_origins(1200, 200, 8, 40, 2);
  auto res = evaluate_combination(panel.values(), 200, {3, 4}, {2, 1}, origins, 8, kConstantTerm);
  auto cell_a = summarize_cell({200, 3, 4}, run_cell(panel.values(), {200, 3, 4}, origins, 8,
                                                     kConstantTerm), 8);
  EXPECT_EQ(res.origins, origins);
  EXPECT_EQ(res.model_a.mae, *cell_a.mae);
  EXPECT_EQ(res.model_a.mse, *cell_a.mse);
  ASSERT_TRUE(res.dm_abs_vs_a.result.has_value());
  EXPECT_EQ(res.dm_abs_vs_a.result->n_effective, origins.size());
}

TEST(RunGrid, IntermediateRankWinsAtShortWindowsOnCointegratedData) {
  // d = 4, r_true = 2. With a couple of days of history the reduced-rank
  // models beat both limit VARs under MSE.
  const TimeSeriesPanel panel = reference_panel(2000, 7);
  BacktestConfig c;
  c.windows = {192, 384};
  c.orders = {1, 2, 3};
  c.origins = 200;
  c.seed = 11;
  for (const auto& s : summarize_best(run_grid(panel, c), LossKind::kSquared)) {
    EXPECT_GT(s.best_rank, 0) << "T=" << s.window;
    EXPECT_LT(s.best_rank, 4) << "T=" << s.window;
    EXPECT_GT(*s.improvement_vs_diff_var, 0.0);
    EXPECT_GT(*s.improvement_vs_level_var, 0.0);
  }
}
