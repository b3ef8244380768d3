#pragma once

#include "cointvar/panel.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cointvar {

/**
 * Delimited text input. The delimiter is ';' when the header line contains
 * one, ',' otherwise. Two layouts are accepted:
 *
 *   long:  timestamp,region,value        (one observation per line)
 *   wide:  timestamp,<region>,<region>…  (one instant per line)
 *
 * Timestamps are ISO-8601 (`YYYY-MM-DD[T ]HH:MM[:SS]` followed by `Z`,
 * `±HH:MM`, `±HHMM` or nothing for UTC) or integer Unix seconds. Values
 * that are empty, `NA`, `NaN`, `N/A`, `n/e` or `-` are missing.
 */
struct IngestOptions {
  // Longest run of missing slots that is linearly interpolated.
  std::size_t max_gap = 8;
  std::optional<std::size_t> expected_regions;
  Timestamp step = kQuarterHour;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t gaps_filled = 0;
  std::size_t duplicates_resolved = 0;
  std::size_t rows_dropped = 0;
  std::vector<std::string> regions_found;
  Timestamp coverage_start = 0;
  Timestamp coverage_end = 0;
};

struct IngestResult {
  TimeSeriesPanel panel;
  IngestReport report;
};

/**
 * Merges all files onto one clock: columns are regions in lexicographic
 * order; rows run on the step grid over the common observed coverage.
 * Repeated (region, timestamp) pairs are averaged. Interior runs of at most
 * max_gap missing slots are interpolated; longer runs and runs touching the
 * coverage edges are not, and the panel keeps the longest contiguous block
 * of complete rows (earliest on ties).
 *
 * Throws ParseError (with line number), kSchema (region count mismatch,
 * off-grid timestamps), kNoOverlap, kIo.
 */
IngestResult load_panel(std::span<const std::filesystem::path> paths,
                        const IngestOptions& options = {});

// Same, from in-memory sources; `names` are used in error messages.
IngestResult load_panel(std::span<std::istream* const> sources,
                        std::span<const std::string> names, const IngestOptions& options = {});

// Wide layout with `YYYY-MM-DDTHH:MM:SSZ` timestamps and 17 significant
// digits; load_panel reproduces the panel exactly.
void write_wide(const TimeSeriesPanel& panel, std::ostream& out);
void write_wide(const TimeSeriesPanel& panel, const std::filesystem::path& path);

std::string format_timestamp(Timestamp t);
// Throws kInvalidInput on malformed text.
Timestamp parse_timestamp(const std::string& text);

}  // namespace cointvar
