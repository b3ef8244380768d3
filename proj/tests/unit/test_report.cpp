#include "cointvar/report.hpp"
#include "cointvar/simulate.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cointvar;

namespace {

BacktestGridResult tiny_grid() {
  BacktestGridResult r;
  r.metadata.dim = 2;
  r.metadata.n_obs = 500;
  r.metadata.seed = 3;
  r.origins = {200, 300};
  CellResult ok;
  ok.cell = {96, 1, 0};
  ok.mae = 0.5;
  ok.mse = 0.25;
  ok.losses = {{200, 4.0, 2.0}, {300, 4.0, 2.0}};
  CellResult failed;
  failed.cell = {96, 1, 2};
  failed.n_failed = 2;
  failed.first_failure = "singular-design: condition 1e+20";
  r.cells = {ok, failed};
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Report, GridCsv) {
  std::ostringstream out;
  write_grid(out, tiny_grid());
  auto l = lines(out.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "window,p,rank,n_ok,n_failed,mae,mse");
  EXPECT_EQ(l[1], "96,1,0,2,0,0.5,0.25");
  EXPECT_EQ(l[2], "96,1,2,0,2,NA,NA");
}

TEST(Report, PlotRecordsAndFailures) {
  std::ostringstream plot, fail;
  write_plot_records(plot, tiny_grid());
  write_failures(fail, tiny_grid());
  auto p = lines(plot.str());
  EXPECT_EQ(p[0], "T,p,r,metric,value");
  EXPECT_NE(std::find(p.begin(), p.end(), "96,1,0,mae,0.5"), p.end());
  EXPECT_NE(std::find(p.begin(), p.end(), "96,1,0,mse,0.25"), p.end());
  auto f = lines(fail.str());
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0], "window,p,rank,n_failed,first_failure");
  EXPECT_NE(f[1].find("singular-design"), std::string::npos);
}

TEST(Report, OriginLossesUseSeventeenDigits) {
  auto g = tiny_grid();
  g.cells[0].losses[0].abs_loss = 0.1;
  std::ostringstream out;
  write_origin_losses(out, g);
  EXPECT_NE(out.str().find("0.10000000000000001"), std::string::npos);
}

TEST(Report, SummaryTableLayout) {
  WindowSummary a;
  a.window = 96;
  a.available = true;
  a.best_p = 2;
  a.best_rank = 1;
  a.improvement_vs_diff_var = 0.0512;
  a.improvement_vs_level_var = 0.2249;
  WindowSummary b;
  b.window = 192;
  b.note = "all cells failed";
  std::ostringstream out;
  write_summary_table(out, {a, b});
  auto l = lines(out.str());
  ASSERT_EQ(l.size(), 6u);  // header, rule, four rows
  EXPECT_EQ(l[0], "T/96 (=length in days)          |    1 |    2");
  EXPECT_EQ(l[1].find_first_not_of('-'), std::string::npos);
  EXPECT_EQ(l[2], "Best p                          |    2 |   NA");
  EXPECT_EQ(l[3], "Best r                          |    1 |   NA");
  EXPECT_EQ(l[4], "Improvement to best VAR on dY_t | 0.05 |   NA");
  EXPECT_EQ(l[5], "Improvement to best VAR on Y_t  | 0.22 |   NA");
}

TEST(Report, OutputDirectoryIsComplete) {
  const auto panel = generate(reference_dgp(700, 1));
  BacktestConfig c;
  c.windows = {96};
  c.orders = {1, 2};
  c.origins = 20;
  auto result = run_grid(panel, c);
  const auto dir = std::filesystem::temp_directory_path() / "cointvar_report_test";
  std::filesystem::remove_all(dir);
  write_backtest_outputs(dir, result, panel.timestamps());
  for (const char* f : {"grid.csv", "origin_losses.csv", "plot.csv", "origins.csv", "failures.csv",
                        "metadata.txt", "summary_mae.txt", "summary_mse.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream meta(dir / "metadata.txt");
  std::stringstream text;
  text << meta.rdbuf();
  EXPECT_NE(text.str().find("seed=1\n"), std::string::npos);
  EXPECT_NE(text.str().find("origin_policy=shared"), std::string::npos);
  std::filesystem::remove_all(dir);
}
