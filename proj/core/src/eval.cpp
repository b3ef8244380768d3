#include "cointvar/eval.hpp"

#include "cointvar/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace cointvar {

std::string to_string(LossKind kind) {
  return kind == LossKind::kAbsolute ? "absolute" : "squared";
}

double origin_loss(const MatrixCRef& errors, LossKind kind) {
  double total = 0.0;
  for (Eigen::Index h = 0; h < errors.rows(); ++h) {
    double norm = 0.0;
    for (Eigen::Index j = 0; j < errors.cols(); ++j) {
      const double e = errors(h, j);
      norm += kind == LossKind::kAbsolute ? std::abs(e) : e * e;
    }
    total += norm;
  }
  return total;
}

namespace {

double mean_error_loss(std::span<const Matrix> errors, LossKind kind) {
  if (errors.empty()) throw Error(ErrorKind::kInvalidInput, "no forecast errors to evaluate");
  const Eigen::Index rows = errors.front().rows();
  const Eigen::Index cols = errors.front().cols();
  if (rows < 1 || cols < 1) throw Error(ErrorKind::kInvalidInput, "empty error matrix");
  std::vector<double> losses;
  losses.reserve(errors.size());
  for (const Matrix& e : errors) {
    if (e.rows() != rows || e.cols() != cols) {
      throw Error(ErrorKind::kInvalidInput, "error matrices differ in shape");
    }
    losses.push_back(origin_loss(e, kind));
  }
  return mean_loss(losses, rows);
}

}  // namespace

double mae(std::span<const Matrix> errors) { return mean_error_loss(errors, LossKind::kAbsolute); }

double mse(std::span<const Matrix> errors) { return mean_error_loss(errors, LossKind::kSquared); }

double mean_loss(std::span<const double> origin_losses, Eigen::Index horizon) {
  if (origin_losses.empty() || horizon < 1) {
    throw Error(ErrorKind::kInvalidInput, "no forecast errors to evaluate");
  }
  double total = 0.0;
  for (double l : origin_losses) total += l;
  return total / (static_cast<double>(origin_losses.size()) * static_cast<double>(horizon));
}

ForecastPath combine_equal(std::span<const ForecastPath> paths) {
  if (paths.size() < 2) throw Error(ErrorKind::kInvalidInput, "combination needs at least two paths");
  const ForecastPath& first = paths.front();
  ForecastPath out;
  out.origin_index = first.origin_index;
  out.values = first.values;
  double count = 0.0;
  for (const ForecastPath& path : paths) {
    if (path.values.rows() != first.values.rows() || path.values.cols() != first.values.cols()) {
      throw Error(ErrorKind::kInvalidInput, "forecast paths differ in shape");
    }
    if (path.origin_index != first.origin_index) {
      throw Error(ErrorKind::kInvalidInput, "forecast paths differ in origin");
    }
    // Running mean: identical inputs leave it unchanged bit for bit.
    count += 1.0;
    out.values += (path.values - out.values) / count;
  }
  return out;
}

double relative_improvement(double best, double alt) { return (alt - best) / alt; }

DmTestResult dm_test(std::span<const double> loss_a, std::span<const double> loss_b,
                     LossKind kind, const DmOptions& options) {
  if (loss_a.size() != loss_b.size()) {
    throw Error(ErrorKind::kInvalidInput, "loss series differ in length");
  }
  const std::size_t n = loss_a.size();
  if (n < 10) throw Error(ErrorKind::kInvalidInput, "Diebold-Mariano test needs at least 10 losses");
  if (options.bandwidth < 0 || static_cast<std::size_t>(options.bandwidth) >= n) {
    throw Error(ErrorKind::kInvalidInput, "bandwidth must lie in [0, n)");
  }

  std::vector<double> diff(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = loss_a[i] - loss_b[i];
    sum += diff[i];
  }
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;

  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = lag; i < n; ++i) acc += (diff[i] - mean) * (diff[i - lag] - mean);
    return acc / dn;
  };
  double lrv = autocov(0);
  for (int k = 1; k <= options.bandwidth; ++k) {
    const double weight = 1.0 - static_cast<double>(k) / (options.bandwidth + 1.0);
    lrv += 2.0 * weight * autocov(static_cast<std::size_t>(k));
  }
  if (!(lrv > 0.0)) {
    throw Error(ErrorKind::kDegenerateVariance,
                "loss differential has zero variance; the forecasts are indistinguishable");
  }

  DmTestResult result;
  result.statistic = mean / std::sqrt(lrv / dn);
  result.p_value = std::erfc(std::abs(result.statistic) / std::numbers::sqrt2);
  result.n_effective = n;
  result.loss_kind = kind;
  result.bandwidth = options.bandwidth;
  return result;
}

}  // namespace cointvar
