#include "cointvar/vecm.hpp"

#include "cointvar/error.hpp"
#include "cointvar/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace cointvar {

Matrix VecmModel::pi() const {
  if (rank == 0) return Matrix::Zero(dim(), dim());
  return alpha * beta.transpose();
}

namespace {

void check_row_budget(Eigen::Index n, Eigen::Index d, int p, DeterministicSpec det) {
  const Eigen::Index regressors = d * p + det.columns();
  if (n - p < regressors + 1) {
    throw Error(ErrorKind::kInsufficientData,
                "VECM with p=" + std::to_string(p) + " needs at least " +
                    std::to_string(regressors + 1 + p) + " observations, have " +
                    std::to_string(n));
  }
}

// Symmetric positive definite check by eigenvalue spread.
void check_moment(const Matrix& s, const char* name, double max_condition) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi / lo <= max_condition)) {
    std::ostringstream msg;
    msg << "product moment matrix " << name << " is singular or ill-conditioned";
    if (lo > 0.0) msg << " (condition " << hi / lo << ")";
    throw Error(ErrorKind::kSingularMoment, msg.str());
  }
}

}  // namespace

JohansenEstimator::JohansenEstimator(const MatrixCRef& values, int p, DeterministicSpec det,
                                     const FitOptions& options)
    : d_(values.cols()), p_(p), det_(det) {
  if (p < 1) throw Error(ErrorKind::kInvalidInput, "lag order must be at least 1");
  check_row_budget(values.rows(), d_, p, det);

  RegressionDesign design = build_design(values, p, det);
  diff_response_ = std::move(design.diff_response);
  lagged_level_ = std::move(design.lagged_level);
  short_run_ = hcat({&design.diff_lag_block, &design.deterministic_block});

  if (short_run_.cols() > 0) {
    short_run_qr_.emplace(checked_qr(short_run_, options.max_condition));
    r0_ = diff_response_ - short_run_ * short_run_qr_->solve(diff_response_);
    r1_ = lagged_level_ - short_run_ * short_run_qr_->solve(lagged_level_);
  } else {
    r0_ = diff_response_;
    r1_ = lagged_level_;
  }

  try {
    decompose(options.max_condition);
  } catch (const Error&) {
    moment_error_ = std::current_exception();
  }
}

void JohansenEstimator::decompose(double max_condition) {
  const double n = static_cast<double>(r0_.rows());
  const Matrix s00 = r0_.transpose() * r0_ / n;
  const Matrix s11 = r1_.transpose() * r1_ / n;
  s01_ = r0_.transpose() * r1_ / n;

  check_moment(s00, "S00", max_condition);
  check_moment(s11, "S11", max_condition);

  // With S11 = L L' and S00 = K K', the problem lambda S11 v = S10 S00^-1 S01 v
  // becomes the symmetric eigenproblem of B'B, B = K^-1 S01 L^-T, v = L^-T u.
  Eigen::LLT<Matrix> l11(s11);
  Eigen::LLT<Matrix> l00(s00);
  if (l11.info() != Eigen::Success || l00.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularMoment, "product moment matrix is not positive definite");
  }
  const Matrix l11_lower = l11.matrixL();
  Matrix b = l00.matrixL().solve(s01_);
  b = l11_lower.triangularView<Eigen::Lower>().solve(b.transpose()).transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> es(b.transpose() * b);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::kSingularMoment, "eigen decomposition did not converge");
  }

  // SelfAdjointEigenSolver is ascending; stable sort keeps ties in solver order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d_));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector& lambda = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index c) { return lambda(a) > lambda(c); });

  eigenvalues_.resize(static_cast<std::size_t>(d_));
  Matrix u(d_, d_);
  for (Eigen::Index j = 0; j < d_; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    double value = lambda(src);
    if (value < 0.0) value = 0.0;  // roundoff on a PSD matrix
    if (value >= 1.0) {
      throw Error(ErrorKind::kSingularMoment,
                  "canonical correlation of one: levels and differences are collinear");
    }
    eigenvalues_[static_cast<std::size_t>(j)] = value;
    u.col(j) = es.eigenvectors().col(src);
  }

  eigenvectors_ = l11_lower.transpose().triangularView<Eigen::Upper>().solve(u);
  // Sign convention: largest-magnitude entry of each vector is positive.
  for (Eigen::Index j = 0; j < d_; ++j) {
    Eigen::Index at = 0;
    eigenvectors_.col(j).cwiseAbs().maxCoeff(&at);
    if (eigenvectors_(at, j) < 0.0) eigenvectors_.col(j) *= -1.0;
  }
}

const std::vector<double>& JohansenEstimator::eigenvalues() const {
  if (moment_error_) std::rethrow_exception(moment_error_);
  return eigenvalues_;
}

const Matrix& JohansenEstimator::eigenvectors() const {
  if (moment_error_) std::rethrow_exception(moment_error_);
  return eigenvectors_;
}

VecmModel JohansenEstimator::model(int rank) const {
  if (rank < 0 || rank > d_) {
    throw Error(ErrorKind::kInvalidRank,
                "rank " + std::to_string(rank) + " outside [0, " + std::to_string(d_) + "]");
  }
  if (rank > 0 && moment_error_) std::rethrow_exception(moment_error_);

  VecmModel model;
  model.det = det_;
  model.rank = rank;
  model.p = p_;
  if (!moment_error_) model.eigenvalues = eigenvalues_;

  // Concentrated regression: alpha = S01 beta (beta' S11 beta)^-1, then the
  // short-run block from dY_t - alpha beta' Y_{t-1} on Z.
  Matrix target = diff_response_;
  if (rank > 0) {
    model.beta = eigenvectors_.leftCols(rank);
    const Matrix r1_beta = r1_ * model.beta;
    const Matrix gram = r1_beta.transpose() * r1_beta;
    model.alpha = (r0_.transpose() * r1_beta) * gram.inverse();
    target.noalias() -= lagged_level_ * model.beta * model.alpha.transpose();
  } else {
    model.alpha = Matrix::Zero(d_, 0);
    model.beta = Matrix::Zero(d_, 0);
  }

  Matrix coefficients = Matrix::Zero(short_run_.cols(), d_);
  if (short_run_qr_) coefficients = short_run_qr_->solve(target);
  const Matrix residuals = target - short_run_ * coefficients;

  model.gamma.resize(static_cast<std::size_t>(p_ - 1));
  for (int k = 0; k < p_ - 1; ++k) {
    model.gamma[static_cast<std::size_t>(k)] = coefficients.middleRows(k * d_, d_).transpose();
  }
  model.psi = coefficients.bottomRows(det_.columns()).transpose();
  model.resid_cov = residuals.transpose() * residuals / static_cast<double>(residuals.rows());
  return model;
}

VecmModel fit_vecm(const MatrixCRef& values, int p, int rank, DeterministicSpec det,
                   const FitOptions& options) {
  if (rank < 0 || rank > values.cols()) {
    throw Error(ErrorKind::kInvalidRank, "rank " + std::to_string(rank) + " outside [0, " +
                                             std::to_string(values.cols()) + "]");
  }
  return JohansenEstimator(values, p, det, options).model(rank);
}

VecmModel fit_vecm(const TimeSeriesPanel& panel, int p, int rank, DeterministicSpec det,
                   const FitOptions& options) {
  return fit_vecm(panel.values(), p, rank, det, options);
}

VarModel vecm_to_var(const VecmModel& model) {
  const Eigen::Index d = model.dim();
  const int p = model.p;
  if (p < 1 || static_cast<int>(model.gamma.size()) != p - 1) {
    throw Error(ErrorKind::kInvalidInput, "VECM gamma count does not match p - 1");
  }
  VarModel var;
  var.det = model.det;
  var.psi = model.psi;
  var.resid_cov = model.resid_cov;
  var.phi.resize(static_cast<std::size_t>(p));

  const Matrix identity = Matrix::Identity(d, d);
  if (p == 1) {
    var.phi[0] = identity + model.pi();
    return var;
  }
  var.phi[0] = identity + model.pi() + model.gamma[0];
  for (int k = 2; k <= p - 1; ++k) {
    var.phi[static_cast<std::size_t>(k - 1)] =
        model.gamma[static_cast<std::size_t>(k - 1)] - model.gamma[static_cast<std::size_t>(k - 2)];
  }
  var.phi[static_cast<std::size_t>(p - 1)] = -model.gamma[static_cast<std::size_t>(p - 2)];
  return var;
}

VecmModel var_to_vecm(const VarModel& model) {
  const Eigen::Index d = model.dim();
  const int p = model.p();
  VecmModel vecm;
  vecm.det = model.det;
  vecm.psi = model.psi;
  vecm.resid_cov = model.resid_cov;
  vecm.p = p;
  vecm.rank = static_cast<int>(d);

  Matrix pi = -Matrix::Identity(d, d);
  for (const Matrix& phi : model.phi) pi += phi;
  vecm.alpha = pi;
  vecm.beta = Matrix::Identity(d, d);

  vecm.gamma.assign(static_cast<std::size_t>(std::max(p - 1, 0)), Matrix::Zero(d, d));
  // gamma_k = -(phi_{k+1} + ... + phi_p), accumulated from the tail.
  Matrix tail = Matrix::Zero(d, d);
  for (int k = p - 1; k >= 1; --k) {
    tail += model.phi[static_cast<std::size_t>(k)];
    vecm.gamma[static_cast<std::size_t>(k - 1)] = -tail;
  }
  return vecm;
}

ForecastPath forecast_vecm(const VecmModel& model, const MatrixCRef& history, int horizon,
                           const ForecastOptions& options) {
  return forecast_var(vecm_to_var(model), history, horizon, options);
}

ForecastPath forecast_vecm(const VecmModel& model, const TimeSeriesPanel& history, int horizon,
                           const ForecastOptions& options) {
  return forecast_vecm(model, history.values(), horizon, options);
}

double largest_principal_angle(const MatrixCRef& a, const MatrixCRef& b) {
  if (a.rows() != b.rows() || a.cols() == 0 || b.cols() == 0) {
    throw Error(ErrorKind::kInvalidInput, "principal angles need non-empty subspaces of equal ambient dimension");
  }
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  const Vector cosines = Eigen::JacobiSVD<Matrix>(qa.transpose() * qb).singularValues();
  const double smallest = std::clamp(cosines.minCoeff(), 0.0, 1.0);
  return std::acos(smallest) * 180.0 / std::numbers::pi;
}

}  // namespace cointvar
