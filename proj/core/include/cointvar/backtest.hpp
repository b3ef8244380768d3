#pragma once

#include "cointvar/eval.hpp"
#include "cointvar/panel.hpp"
#include "cointvar/var.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cointvar {

struct BacktestConfig {
  std::vector<int> windows{96, 192, 384, 768, 1536, 3072};
  std::vector<int> orders{1, 2, 3, 4, 5, 6, 7};
  // Empty means 0..d.
  std::vector<int> ranks;
  int horizon = 8;
  int origins = 1000;
  std::uint64_t seed = 1;
  DeterministicSpec det = kConstantTerm;
  bool clip_nonnegative = false;
  FitOptions fit;
  // 0 selects default_thread_count().
  unsigned threads = 0;
};

// COINTVAR_THREADS if set to a positive integer, else the hardware count.
unsigned default_thread_count();

/**
 * N distinct indices drawn uniformly without replacement from
 * [window_max, n_obs - horizon - 1], returned ascending. Each index is the
 * last known observation of a forecast origin. Deterministic in seed.
 * Throws kInsufficientRange when fewer than N indices are feasible.
 */
std::vector<Eigen::Index> sample_origins(Eigen::Index n_obs, Eigen::Index window_max, int horizon,
                                         int count, std::uint64_t seed);

struct OriginOutcome {
  Eigen::Index origin = 0;
  // Y_{o+h} - Yhat_{o+h}, H x d; absent when estimation failed.
  std::optional<Matrix> errors;
  std::string failure;
};

struct CellSpec {
  int window = 0;
  int p = 1;
  int rank = 0;
};

// Fits a VECM on rows (o - T + 1 .. o) for every origin and forecasts H
// steps. Estimation errors become failure records.
std::vector<OriginOutcome> run_cell(const MatrixCRef& values, const CellSpec& cell,
                                    const std::vector<Eigen::Index>& origins, int horizon,
                                    DeterministicSpec det, const ForecastOptions& forecast = {},
                                    const FitOptions& fit = {});

struct OriginLoss {
  Eigen::Index origin = 0;
  double abs_loss = 0.0;  // sum_h ||e_h||_1
  double sq_loss = 0.0;   // sum_h ||e_h||_2^2
};

struct CellResult {
  CellSpec cell;
  std::optional<double> mae;
  std::optional<double> mse;
  std::size_t n_failed = 0;
  std::vector<OriginLoss> losses;  // successful origins, ascending
  std::string first_failure;

  std::optional<double> metric(LossKind kind) const {
    return kind == LossKind::kAbsolute ? mae : mse;
  }
};

// Aggregates per-origin outcomes into a cell.
CellResult summarize_cell(const CellSpec& cell, const std::vector<OriginOutcome>& outcomes,
                          int horizon);

struct GridMetadata {
  std::uint64_t seed = 0;
  std::uint64_t data_fingerprint = 0;
  Eigen::Index n_obs = 0;
  Eigen::Index dim = 0;
  Timestamp first_timestamp = 0;
  Timestamp last_timestamp = 0;
  int horizon = 8;
  DeterministicSpec det = kConstantTerm;
  bool clip_nonnegative = false;
  std::string origin_policy = "shared";
};

struct BacktestGridResult {
  std::vector<CellResult> cells;  // window-major, then p, then rank
  std::vector<Eigen::Index> origins;
  GridMetadata metadata;

  const CellResult* find(int window, int p, int rank) const;
};

// FNV-1a over values, timestamps and labels.
std::uint64_t fingerprint(const TimeSeriesPanel& panel);

// Throws kInvalidInput for an invalid config and kInsufficientRange from
// sampling. Cells run concurrently across origins; results do not depend on
// the thread count.
BacktestGridResult run_grid(const TimeSeriesPanel& panel, const BacktestConfig& config);

struct WindowSummary {
  int window = 0;
  LossKind metric = LossKind::kAbsolute;
  bool available = false;
  int best_p = 0;
  int best_rank = 0;
  double best_loss = 0.0;
  // Against the best r = 0 cell (VAR on differences) and the best r = d
  // cell (VAR in levels); absent when those cells are missing or failed.
  std::optional<double> improvement_vs_diff_var;
  std::optional<double> improvement_vs_level_var;
  std::string note;
};

// One entry per window in grid order. Ties resolve to the first cell in
// (p, rank) order.
std::vector<WindowSummary> summarize_best(const BacktestGridResult& result, LossKind metric);

struct ModelChoice {
  int p = 1;
  int rank = 0;
};

struct CombinationLosses {
  std::vector<double> abs_loss;
  std::vector<double> sq_loss;
  double mae = 0.0;
  double mse = 0.0;
};

struct DmOutcome {
  std::optional<DmTestResult> result;
  std::string note;  // set when the test could not be computed
};

struct CombinationResult {
  int window = 0;
  ModelChoice a, b;
  std::vector<Eigen::Index> origins;  // origins where both models fitted
  std::size_t n_failed = 0;
  CombinationLosses model_a, model_b, combined;
  // Combination against each component, per loss kind.
  DmOutcome dm_abs_vs_a, dm_abs_vs_b, dm_sq_vs_a, dm_sq_vs_b;
};

// Equal-weight combination of two VECMs evaluated on shared origins.
// Origins where either component fails are dropped for all three.
CombinationResult evaluate_combination(const MatrixCRef& values, int window, ModelChoice a,
                                       ModelChoice b, const std::vector<Eigen::Index>& origins,
                                       int horizon, DeterministicSpec det,
                                       const ForecastOptions& forecast = {},
                                       const FitOptions& fit = {}, const DmOptions& dm = {});

}  // namespace cointvar
