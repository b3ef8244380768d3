#include "cointvar/least_squares.hpp"

#include "cointvar/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cointvar {

Eigen::ColPivHouseholderQR<Matrix> checked_qr(const MatrixCRef& X, double max_condition,
                                              double* condition) {
  if (X.cols() == 0 || X.rows() < X.cols()) {
    throw Error(ErrorKind::kInsufficientData, "fewer rows than regressors");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  const Eigen::Index k = X.cols();
  const Matrix r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Vector sv = Eigen::JacobiSVD<Matrix>(r).singularValues();
  const double smin = sv(k - 1);
  const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (condition != nullptr) *condition = cond;
  if (!(cond <= max_condition)) {
    std::ostringstream msg;
    msg << "regressor matrix is singular or ill-conditioned (condition " << cond << " > "
        << max_condition << ")";
    throw SingularDesignError(msg.str(), cond);
  }
  return qr;
}

LeastSquaresFit solve_least_squares(const MatrixCRef& X, const MatrixCRef& Y,
                                    double max_condition) {
  if (X.rows() != Y.rows()) {
    throw Error(ErrorKind::kInvalidInput, "design and response row counts differ");
  }
  LeastSquaresFit fit;
  if (X.cols() == 0) {
    fit.coefficients = Matrix::Zero(0, Y.cols());
    fit.residuals = Y;
    return fit;
  }
  const auto qr = checked_qr(X, max_condition, &fit.condition);
  fit.coefficients = qr.solve(Y);
  fit.residuals = Y - X * fit.coefficients;
  return fit;
}

Matrix hcat(std::initializer_list<const Matrix*> blocks) {
  Eigen::Index rows = -1;
  Eigen::Index cols = 0;
  for (const Matrix* b : blocks) {
    if (rows < 0) rows = b->rows();
    if (b->rows() != rows) throw Error(ErrorKind::kInvalidInput, "hcat row mismatch");
    cols += b->cols();
  }
  Matrix out(rows < 0 ? 0 : rows, cols);
  Eigen::Index at = 0;
  for (const Matrix* b : blocks) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return out;
}

}  // namespace cointvar
