#pragma once

#include "cointvar/forecast_path.hpp"
#include "cointvar/panel.hpp"

#include <cstddef>
#include <span>
#include <string>

namespace cointvar {

enum class LossKind { kAbsolute, kSquared };

std::string to_string(LossKind kind);

// Loss of one H x d error matrix summed over horizons: sum_h ||e_h||_1 for
// kAbsolute, sum_h ||e_h||_2^2 for kSquared.
double origin_loss(const MatrixCRef& errors, LossKind kind);

// Multivariate MAE / MSE: summed per-origin losses divided by N * H (not by
// d). All matrices must share one shape; empty input is kInvalidInput.
double mae(std::span<const Matrix> errors);
double mse(std::span<const Matrix> errors);

// Same normalisation when only per-origin losses are kept.
double mean_loss(std::span<const double> origin_losses, Eigen::Index horizon);

// Elementwise mean of at least two paths with equal shape and origin.
ForecastPath combine_equal(std::span<const ForecastPath> paths);

// (alt - best) / alt.
double relative_improvement(double best, double alt);

struct DmOptions {
  // Bartlett-kernel lags in the long-run variance; 0 uses the sample variance.
  int bandwidth = 0;
};

struct DmTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_effective = 0;
  LossKind loss_kind = LossKind::kAbsolute;
  int bandwidth = 0;
};

/**
 * Diebold-Mariano test of equal expected loss.
 *
 * With d_n = loss_a[n] - loss_b[n], the statistic is mean(d) / sqrt(lrv / n)
 * where lrv = g0 + 2 sum_{k<=L} (1 - k/(L+1)) g_k and g_k are autocovariances
 * with divisor n. The p-value is two-sided against N(0,1). A positive
 * statistic means model a has the larger loss.
 *
 * Requires equal lengths >= 10 (kInvalidInput). A zero long-run variance,
 * e.g. identical loss series, raises kDegenerateVariance.
 */
DmTestResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b,
                     LossKind kind, const DmOptions& options = {});

}  // namespace cointvar
