#pragma once

#include "cointvar/panel.hpp"

namespace cointvar {

// H x d point forecasts. Row h-1 holds the forecast for origin_index + h.
struct ForecastPath {
  Matrix values;
  Eigen::Index origin_index = 0;

  Eigen::Index horizon() const noexcept { return values.rows(); }
  Eigen::Index dim() const noexcept { return values.cols(); }
};

}  // namespace cointvar
