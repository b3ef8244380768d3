#pragma once

#include "cointvar/panel.hpp"

#include <cstdint>
#include <vector>

namespace cointvar {

/**
 * Gaussian cointegrated data-generating process in error-correction form:
 *
 *   dY_t = alpha beta' Y_{t-1} + sum_k gamma[k-1] dY_{t-k} + e_t,
 *   e_t ~ N(0, noise_cov)
 *
 * Before the first returned row the process starts at `initial` with zero
 * lagged differences and runs `burn_in` discarded steps.
 */
struct DgpSpec {
  int d = 1;
  int r_true = 0;
  int p_true = 1;
  Matrix alpha;  // d x r_true
  Matrix beta;   // d x r_true
  std::vector<Matrix> gamma;  // p_true - 1 matrices, d x d
  Matrix noise_cov;           // d x d, PSD
  Eigen::Index n_obs = 0;
  std::uint64_t seed = 0;
  Vector initial;  // d
  int burn_in = 200;
};

struct DgpDiagnostics {
  // Moduli of the VAR companion eigenvalues, descending.
  std::vector<double> root_moduli;
  int unit_roots = 0;
  bool explosive = false;
};

inline constexpr double kUnitRootTolerance = 1e-6;

// Throws kInvalidSpec only for malformed shapes.
DgpDiagnostics validate_spec(const DgpSpec& spec);

// Throws kInvalidSpec for malformed shapes, explosive roots, a unit-root
// count different from d - r_true, or a noise covariance that is not PSD.
TimeSeriesPanel generate(const DgpSpec& spec);

// VAR(p_true) companion matrix implied by the spec (d*p x d*p).
Matrix companion_matrix(const DgpSpec& spec);

// d = 4, r_true = 2, p_true = 2 reference process: two common trends,
// cointegrating vectors (1,-1,0,0) and (0,0,1,-1), momentum in the
// differences and cross-correlated noise.
DgpSpec reference_dgp(Eigen::Index n_obs, std::uint64_t seed);

// d independent unit-variance random walks (r_true = 0, p_true = 1).
DgpSpec random_walk_dgp(int d, Eigen::Index n_obs, std::uint64_t seed);

}  // namespace cointvar
