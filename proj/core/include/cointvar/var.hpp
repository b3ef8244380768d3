#pragma once

#include "cointvar/forecast_path.hpp"
#include "cointvar/least_squares.hpp"
#include "cointvar/panel.hpp"

#include <vector>

namespace cointvar {

/**
 * VAR(p) in levels with deterministic regressors:
 *
 *   Y_t = psi * X_t + sum_k phi[k-1] * Y_{t-k} + e_t
 *
 * psi is d x m (m = det.columns()); resid_cov is the residual cross product
 * divided by the effective sample size.
 */
struct VarModel {
  std::vector<Matrix> phi;
  Matrix psi;
  DeterministicSpec det = kConstantTerm;
  Matrix resid_cov;

  int p() const noexcept { return static_cast<int>(phi.size()); }
  Eigen::Index dim() const noexcept { return resid_cov.rows(); }
};

struct FitOptions {
  double max_condition = kDefaultMaxCondition;
};

struct ForecastOptions {
  // Clip the returned path at zero. The recursion itself runs unclipped.
  bool clip_nonnegative = false;
};

// Equation-by-equation least squares on the lag design. Needs
// n_obs - p >= d*p + m + 1 rows (kInsufficientData otherwise); throws
// SingularDesignError for rank-deficient or ill-conditioned regressors.
VarModel fit_var(const MatrixCRef& values, int p, DeterministicSpec det,
                 const FitOptions& options = {});
VarModel fit_var(const TimeSeriesPanel& panel, int p, DeterministicSpec det,
                 const FitOptions& options = {});

// Recursive plug-in forecasts from the last p rows of history. The returned
// origin_index is history.rows() - 1.
ForecastPath forecast_var(const VarModel& model, const MatrixCRef& history, int horizon,
                          const ForecastOptions& options = {});
ForecastPath forecast_var(const VarModel& model, const TimeSeriesPanel& history, int horizon,
                          const ForecastOptions& options = {});

// One-step predictions for rows p..n-1 of values ((n-p) x d).
Matrix fitted_values(const VarModel& model, const MatrixCRef& values);

// Builds a model with zero coefficients of the given shape.
VarModel zero_var(Eigen::Index d, int p, DeterministicSpec det);

}  // namespace cointvar
