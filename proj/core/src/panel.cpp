#include "cointvar/panel.hpp"

#include "cointvar/error.hpp"

#include <utility>

namespace cointvar {

TimeSeriesPanel::TimeSeriesPanel(Matrix values, std::vector<Timestamp> timestamps,
                                 std::vector<std::string> labels)
    : values_(std::move(values)),
      timestamps_(std::move(timestamps)),
      labels_(std::move(labels)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw Error(ErrorKind::kInvalidInput, "panel needs at least one row and one column");
  }
  if (static_cast<Eigen::Index>(timestamps_.size()) != values_.rows()) {
    throw Error(ErrorKind::kInvalidInput, "timestamp count does not match panel rows");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != values_.cols()) {
    throw Error(ErrorKind::kInvalidInput, "label count does not match panel columns");
  }
  if (!values_.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "panel values must be finite");
  }
  if (timestamps_.size() >= 2) {
    const Timestamp spacing = timestamps_[1] - timestamps_[0];
    if (spacing <= 0) {
      throw Error(ErrorKind::kInvalidInput, "timestamps must be strictly increasing");
    }
    for (std::size_t i = 2; i < timestamps_.size(); ++i) {
      if (timestamps_[i] - timestamps_[i - 1] != spacing) {
        throw Error(ErrorKind::kInvalidInput,
                    "timestamps must be uniformly spaced (row " + std::to_string(i) + ")");
      }
    }
  }
}

TimeSeriesPanel TimeSeriesPanel::uniform(Matrix values, Timestamp start, Timestamp step,
                                         std::vector<std::string> labels) {
  std::vector<Timestamp> stamps(static_cast<std::size_t>(values.rows()));
  for (std::size_t i = 0; i < stamps.size(); ++i) {
    stamps[i] = start + static_cast<Timestamp>(i) * step;
  }
  if (labels.empty()) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) labels.push_back("y" + std::to_string(j + 1));
  }
  return TimeSeriesPanel(std::move(values), std::move(stamps), std::move(labels));
}

Timestamp TimeSeriesPanel::step() const noexcept {
  return timestamps_.size() >= 2 ? timestamps_[1] - timestamps_[0] : kQuarterHour;
}

TimeSeriesPanel TimeSeriesPanel::slice(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 1 || first + count > n_obs()) {
    throw Error(ErrorKind::kInvalidInput, "slice out of range");
  }
  std::vector<Timestamp> stamps(timestamps_.begin() + first, timestamps_.begin() + first + count);
  return TimeSeriesPanel(values_.middleRows(first, count), std::move(stamps), labels_);
}

std::string to_string(DeterministicSpec det) {
  return det.kind == DeterministicKind::kConstant ? "constant" : "none";
}

DeterministicSpec parse_deterministic(const std::string& text) {
  if (text == "none") return kNoDeterministic;
  if (text == "constant") return kConstantTerm;
  throw Error(ErrorKind::kInvalidInput, "unknown deterministic term '" + text + "'");
}

Matrix difference(const MatrixCRef& values) {
  if (values.rows() < 2) {
    throw Error(ErrorKind::kInvalidInput, "differencing needs at least 2 observations");
  }
  const Eigen::Index n = values.rows();
  return values.bottomRows(n - 1) - values.topRows(n - 1);
}

TimeSeriesPanel difference(const TimeSeriesPanel& panel) {
  Matrix diffs = difference(panel.values());
  std::vector<Timestamp> stamps(panel.timestamps().begin() + 1, panel.timestamps().end());
  return TimeSeriesPanel(std::move(diffs), std::move(stamps), panel.labels());
}

RegressionDesign build_design(const MatrixCRef& values, int p, DeterministicSpec det) {
  if (p < 1) {
    throw Error(ErrorKind::kInvalidInput, "lag order must be at least 1");
  }
  const Eigen::Index n = values.rows();
  const Eigen::Index d = values.cols();
  if (n <= p) {
    throw Error(ErrorKind::kInsufficientData,
                "need more than p=" + std::to_string(p) + " observations, have " +
                    std::to_string(n));
  }
  const Eigen::Index rows = n - p;

  RegressionDesign design;
  design.response = values.bottomRows(rows);
  design.lag_block.resize(rows, d * p);
  for (int k = 1; k <= p; ++k) {
    design.lag_block.middleCols((k - 1) * d, d) = values.middleRows(p - k, rows);
  }
  design.lagged_level = values.middleRows(p - 1, rows);
  design.diff_response = design.response - design.lagged_level;
  design.diff_lag_block.resize(rows, d * (p - 1));
  for (int k = 1; k < p; ++k) {
    design.diff_lag_block.middleCols((k - 1) * d, d) =
        values.middleRows(p - k, rows) - values.middleRows(p - k - 1, rows);
  }
  design.deterministic_block = Matrix::Ones(rows, det.columns());
  return design;
}

RegressionDesign build_design(const TimeSeriesPanel& panel, int p, DeterministicSpec det) {
  return build_design(panel.values(), p, det);
}

}  // namespace cointvar
