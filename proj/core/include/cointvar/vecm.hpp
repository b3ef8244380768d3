#pragma once

#include "cointvar/forecast_path.hpp"
#include "cointvar/panel.hpp"
#include "cointvar/var.hpp"

#include <exception>
#include <optional>
#include <vector>

namespace cointvar {

/**
 * Vector error correction model with cointegrating rank r:
 *
 *   dY_t = psi * X_t + alpha * beta' * Y_{t-1} + sum_k gamma[k-1] * dY_{t-k} + e_t
 *
 * alpha and beta are d x r (zero columns when r = 0). When the model comes
 * from the Johansen estimator, beta is normalised so that beta' S11 beta = I
 * and `eigenvalues` holds all d squared canonical correlations, descending,
 * in [0, 1). It is empty when no eigen decomposition was computed (models
 * converted from a VAR, or r = 0 fits whose moment matrices are singular).
 */
struct VecmModel {
  Matrix alpha;
  Matrix beta;
  std::vector<Matrix> gamma;
  Matrix psi;
  DeterministicSpec det = kConstantTerm;
  std::vector<double> eigenvalues;
  int rank = 0;
  int p = 1;
  Matrix resid_cov;

  Eigen::Index dim() const noexcept { return resid_cov.rows(); }
  Matrix pi() const;
};

/**
 * Johansen reduced-rank regression for a fixed lag order. The rank-free work
 * (auxiliary regressions, product moments, eigen decomposition) happens once
 * in the constructor; model(r) then yields the maximum-likelihood VECM for
 * any rank, so all ranks of one window share a single decomposition.
 */
class JohansenEstimator {
 public:
  // Throws kInsufficientData, SingularDesignError (auxiliary regressions).
  // Singular product moments do not throw here; they surface from model(r)
  // for r > 0 and from eigenvalues().
  JohansenEstimator(const MatrixCRef& values, int p, DeterministicSpec det,
                    const FitOptions& options = {});

  Eigen::Index dim() const noexcept { return d_; }
  int p() const noexcept { return p_; }
  bool has_decomposition() const noexcept { return !moment_error_; }

  // Descending squared canonical correlations; throws the stored
  // singular-moment error when the decomposition failed.
  const std::vector<double>& eigenvalues() const;
  // Normalised eigenvectors, one column per eigenvalue (d x d).
  const Matrix& eigenvectors() const;

  // Throws kInvalidRank for r outside [0, d].
  VecmModel model(int rank) const;

 private:
  void decompose(double max_condition);

  Eigen::Index d_ = 0;
  int p_ = 1;
  DeterministicSpec det_;
  Matrix diff_response_;   // dY_t
  Matrix lagged_level_;    // Y_{t-1}
  Matrix short_run_;       // Z = [dY lags | deterministic]
  std::optional<Eigen::ColPivHouseholderQR<Matrix>> short_run_qr_;
  Matrix r0_, r1_;
  Matrix s01_;
  std::vector<double> eigenvalues_;
  Matrix eigenvectors_;
  std::exception_ptr moment_error_;
};

// Requires 0 <= r <= d (kInvalidRank), p >= 1 and
// n_obs - p >= d*p + m + 1 (kInsufficientData).
VecmModel fit_vecm(const MatrixCRef& values, int p, int rank, DeterministicSpec det,
                   const FitOptions& options = {});
VecmModel fit_vecm(const TimeSeriesPanel& panel, int p, int rank, DeterministicSpec det,
                   const FitOptions& options = {});

// phi_1 = I + Pi + gamma_1, phi_k = gamma_k - gamma_{k-1}, phi_p = -gamma_{p-1}.
VarModel vecm_to_var(const VecmModel& model);
// Pi = -I + sum phi_k, gamma_k = -sum_{j>k} phi_j; rank d with alpha = Pi, beta = I.
VecmModel var_to_vecm(const VarModel& model);

ForecastPath forecast_vecm(const VecmModel& model, const MatrixCRef& history, int horizon,
                           const ForecastOptions& options = {});
ForecastPath forecast_vecm(const VecmModel& model, const TimeSeriesPanel& history, int horizon,
                           const ForecastOptions& options = {});

// Largest principal angle (degrees) between the column spaces of a and b.
double largest_principal_angle(const MatrixCRef& a, const MatrixCRef& b);

}  // namespace cointvar
