#pragma once

#include "cointvar/panel.hpp"

namespace cointvar {

inline constexpr double kDefaultMaxCondition = 1e10;

struct LeastSquaresFit {
  Matrix coefficients;  // cols(X) x cols(Y)
  Matrix residuals;     // rows(X) x cols(Y)
  double condition = 1.0;
};

// Column-pivoted Householder QR of X with the conditioning check below.
// X must have at least one column and no fewer rows than columns.
Eigen::ColPivHouseholderQR<Matrix> checked_qr(const MatrixCRef& X, double max_condition,
                                              double* condition = nullptr);

// Multivariate least squares Y ~ X via column-pivoted Householder QR.
// The condition number of X is taken from the singular values of the R
// factor. Throws SingularDesignError when X is rank deficient or its
// condition number exceeds max_condition. An X with zero columns yields
// empty coefficients and residuals equal to Y.
LeastSquaresFit solve_least_squares(const MatrixCRef& X, const MatrixCRef& Y,
                                    double max_condition = kDefaultMaxCondition);

// Concatenates blocks with equal row counts left to right.
Matrix hcat(std::initializer_list<const Matrix*> blocks);

}  // namespace cointvar
