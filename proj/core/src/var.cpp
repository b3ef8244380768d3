#include "cointvar/var.hpp"

#include "cointvar/error.hpp"

#include <algorithm>
#include <string>

namespace cointvar {

VarModel fit_var(const MatrixCRef& values, int p, DeterministicSpec det,
                 const FitOptions& options) {
  if (p < 1) throw Error(ErrorKind::kInvalidInput, "lag order must be at least 1");
  const Eigen::Index n = values.rows();
  const Eigen::Index d = values.cols();
  const Eigen::Index regressors = d * p + det.columns();
  if (n - p < regressors + 1) {
    throw Error(ErrorKind::kInsufficientData,
                "VAR(" + std::to_string(p) + ") with " + std::to_string(regressors) +
                    " regressors needs at least " + std::to_string(regressors + 1 + p) +
                    " observations, have " + std::to_string(n));
  }

  const RegressionDesign design = build_design(values, p, det);
  const Matrix X = hcat({&design.lag_block, &design.deterministic_block});
  const LeastSquaresFit ls = solve_least_squares(X, design.response, options.max_condition);

  VarModel model;
  model.det = det;
  model.phi.resize(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    model.phi[static_cast<std::size_t>(k)] = ls.coefficients.middleRows(k * d, d).transpose();
  }
  model.psi = ls.coefficients.bottomRows(det.columns()).transpose();
  model.resid_cov = ls.residuals.transpose() * ls.residuals / static_cast<double>(design.effective_n());
  return model;
}

VarModel fit_var(const TimeSeriesPanel& panel, int p, DeterministicSpec det,
                 const FitOptions& options) {
  return fit_var(panel.values(), p, det, options);
}

namespace {

Vector deterministic_contribution(const VarModel& model) {
  if (model.psi.cols() == 0) return Vector::Zero(model.dim());
  return model.psi.rowwise().sum();
}

}  // namespace

ForecastPath forecast_var(const VarModel& model, const MatrixCRef& history, int horizon,
                          const ForecastOptions& options) {
  const int p = model.p();
  const Eigen::Index d = model.dim();
  if (horizon < 1) throw Error(ErrorKind::kInvalidInput, "horizon must be at least 1");
  if (history.cols() != d) throw Error(ErrorKind::kInvalidInput, "history dimension mismatch");
  if (history.rows() < std::max(p, 1)) {
    throw Error(ErrorKind::kInsufficientHistory,
                "forecast needs at least " + std::to_string(std::max(p, 1)) + " history rows");
  }

  // Rows [0, p) hold the last p observations, oldest first; forecasts follow.
  Matrix buffer(p + horizon, d);
  buffer.topRows(p) = history.bottomRows(p);
  const Vector constant = deterministic_contribution(model);
  for (int h = 0; h < horizon; ++h) {
    Vector next = constant;
    for (int k = 1; k <= p; ++k) {
      next.noalias() += model.phi[static_cast<std::size_t>(k - 1)] * buffer.row(p + h - k).transpose();
    }
    buffer.row(p + h) = next.transpose();
  }

  ForecastPath path;
  path.values = buffer.bottomRows(horizon);
  path.origin_index = history.rows() - 1;
  if (options.clip_nonnegative) path.values = path.values.cwiseMax(0.0);
  return path;
}

ForecastPath forecast_var(const VarModel& model, const TimeSeriesPanel& history, int horizon,
                          const ForecastOptions& options) {
  return forecast_var(model, history.values(), horizon, options);
}

Matrix fitted_values(const VarModel& model, const MatrixCRef& values) {
  const int p = model.p();
  const Eigen::Index n = values.rows();
  if (n <= p) throw Error(ErrorKind::kInsufficientData, "not enough rows for fitted values");
  const Vector constant = deterministic_contribution(model);
  Matrix out(n - p, model.dim());
  for (Eigen::Index t = p; t < n; ++t) {
    Vector y = constant;
    for (int k = 1; k <= p; ++k) {
      y.noalias() += model.phi[static_cast<std::size_t>(k - 1)] * values.row(t - k).transpose();
    }
    out.row(t - p) = y.transpose();
  }
  return out;
}

VarModel zero_var(Eigen::Index d, int p, DeterministicSpec det) {
  VarModel model;
  model.det = det;
  model.phi.assign(static_cast<std::size_t>(p), Matrix::Zero(d, d));
  model.psi = Matrix::Zero(d, det.columns());
  model.resid_cov = Matrix::Zero(d, d);
  return model;
}

}  // namespace cointvar
