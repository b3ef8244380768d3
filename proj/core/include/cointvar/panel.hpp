#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace cointvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixCRef = Eigen::Ref<const Eigen::MatrixXd>;

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kQuarterHour = 900;

/**
 * Uniformly spaced multivariate observations: one row per instant, one column
 * per region. Values are raw MW; missingness must be resolved before a panel
 * is built, so every entry is finite.
 *
 * Immutable after construction.
 */
class TimeSeriesPanel {
 public:
  // Throws kInvalidInput if any invariant is violated (non-finite values,
  // label count != columns, non-increasing or non-uniform timestamps).
  TimeSeriesPanel(Matrix values, std::vector<Timestamp> timestamps,
                  std::vector<std::string> labels);

  // Regular grid starting at `start` with the given step; labels default to
  // "y1".."yd".
  static TimeSeriesPanel uniform(Matrix values, Timestamp start = 0,
                                 Timestamp step = kQuarterHour,
                                 std::vector<std::string> labels = {});

  const Matrix& values() const noexcept { return values_; }
  const std::vector<Timestamp>& timestamps() const noexcept { return timestamps_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  Eigen::Index n_obs() const noexcept { return values_.rows(); }
  Eigen::Index dim() const noexcept { return values_.cols(); }
  // Spacing between consecutive timestamps; kQuarterHour for single-row panels.
  Timestamp step() const noexcept;

  // Rows [first, first + count).
  TimeSeriesPanel slice(Eigen::Index first, Eigen::Index count) const;

 private:
  Matrix values_;
  std::vector<Timestamp> timestamps_;
  std::vector<std::string> labels_;
};

enum class DeterministicKind { kNone, kConstant };

struct DeterministicSpec {
  DeterministicKind kind = DeterministicKind::kConstant;

  // Number of deterministic regressors m.
  Eigen::Index columns() const noexcept { return kind == DeterministicKind::kConstant ? 1 : 0; }

  friend bool operator==(const DeterministicSpec&, const DeterministicSpec&) = default;
};

inline constexpr DeterministicSpec kNoDeterministic{DeterministicKind::kNone};
inline constexpr DeterministicSpec kConstantTerm{DeterministicKind::kConstant};

std::string to_string(DeterministicSpec det);
// Accepts "none" and "constant"; throws kInvalidInput otherwise.
DeterministicSpec parse_deterministic(const std::string& text);

/**
 * Aligned regression blocks for a VAR(p) in levels and the matching VECM.
 *
 * Row i corresponds to time index t = p + i of the source values. The lag
 * block is lag-major, region-minor: columns [k*d, (k+1)*d) hold Y_{t-k-1}.
 * The difference-lag block uses the same layout for dY_{t-1} .. dY_{t-p+1}.
 */
struct RegressionDesign {
  Matrix response;            // Y_t
  Matrix lag_block;           // [Y_{t-1} | ... | Y_{t-p}]
  Matrix diff_response;       // dY_t = Y_t - Y_{t-1}
  Matrix lagged_level;        // Y_{t-1}
  Matrix diff_lag_block;      // [dY_{t-1} | ... | dY_{t-p+1}]
  Matrix deterministic_block; // effective_n x m

  Eigen::Index effective_n() const noexcept { return response.rows(); }
};

// First differences; row t is Y_{t+1} - Y_t stamped with the later instant.
TimeSeriesPanel difference(const TimeSeriesPanel& panel);
Matrix difference(const MatrixCRef& values);

// Requires p >= 1 and n_obs > p (kInsufficientData otherwise).
RegressionDesign build_design(const MatrixCRef& values, int p, DeterministicSpec det);
RegressionDesign build_design(const TimeSeriesPanel& panel, int p, DeterministicSpec det);

}  // namespace cointvar
