#pragma once

#include "cointvar/backtest.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace cointvar {

// Grid file: header `window,p,rank,n_ok,n_failed,mae,mse`, one row per cell
// in grid order; metrics use %.17g, `NA` when every origin failed.
void write_grid(std::ostream& out, const BacktestGridResult& result);

// Header `window,p,rank,origin,abs_loss,sq_loss`; successful origins only.
void write_origin_losses(std::ostream& out, const BacktestGridResult& result);

// Long-form plot records, header `T,p,r,metric,value`, metric in {mae,mse}.
void write_plot_records(std::ostream& out, const BacktestGridResult& result);

// Header `index,timestamp`.
void write_origins(std::ostream& out, const BacktestGridResult& result,
                   const std::vector<Timestamp>& timestamps);

// Header `window,p,rank,n_failed,first_failure` for cells with failures.
void write_failures(std::ostream& out, const BacktestGridResult& result);

// `key=value` lines: seed, fingerprint, data shape and coverage, horizon,
// deterministic term, clipping, origin policy and the DM variant.
void write_metadata(std::ostream& out, const BacktestGridResult& result);

/**
 * Per-window summary table, one column per window:
 *
 *   T/96 (=length in days)             | 1    | 2    | ...
 *   Best p                             | ...
 *   Best r                             | ...
 *   Improvement to best VAR on dY_t    | 0.00 | ...
 *   Improvement to best VAR on Y_t     | 0.22 | ...
 *
 * Improvements print with two decimals; `NA` marks missing entries.
 */
void write_summary_table(std::ostream& out, const std::vector<WindowSummary>& summary);

// Writes grid.csv, origin_losses.csv, plot.csv, origins.csv, failures.csv,
// metadata.txt, summary_mae.txt and summary_mse.txt into dir.
void write_backtest_outputs(const std::filesystem::path& dir, const BacktestGridResult& result,
                            const std::vector<Timestamp>& timestamps);

}  // namespace cointvar
