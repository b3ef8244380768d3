#include "cointvar/simulate.hpp"

#include "cointvar/error.hpp"
#include "cointvar/vecm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace cointvar {

namespace {

void check_shapes(const DgpSpec& spec) {
  const Eigen::Index d = spec.d;
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidSpec, what); };
  if (spec.d < 1) fail("d must be at least 1");
  if (spec.r_true < 0 || spec.r_true > spec.d) fail("r_true must lie in [0, d]");
  if (spec.p_true < 1) fail("p_true must be at least 1");
  if (spec.alpha.rows() != d || spec.alpha.cols() != spec.r_true) fail("alpha must be d x r_true");
  if (spec.beta.rows() != d || spec.beta.cols() != spec.r_true) fail("beta must be d x r_true");
  if (static_cast<int>(spec.gamma.size()) != spec.p_true - 1) fail("need p_true - 1 gamma matrices");
  for (const Matrix& g : spec.gamma) {
    if (g.rows() != d || g.cols() != d) fail("gamma matrices must be d x d");
  }
  if (spec.noise_cov.rows() != d || spec.noise_cov.cols() != d) fail("noise_cov must be d x d");
  if (spec.initial.size() != d) fail("initial must have d entries");
  if (spec.n_obs < 1) fail("n_obs must be at least 1");
  if (spec.burn_in < 0) fail("burn_in must be nonnegative");
}

VecmModel as_vecm(const DgpSpec& spec) {
  VecmModel m;
  m.alpha = spec.alpha;
  m.beta = spec.beta;
  m.gamma = spec.gamma;
  m.rank = spec.r_true;
  m.p = spec.p_true;
  m.det = kNoDeterministic;
  m.psi = Matrix::Zero(spec.d, 0);
  m.resid_cov = spec.noise_cov;
  return m;
}

}  // namespace

Matrix companion_matrix(const DgpSpec& spec) {
  check_shapes(spec);
  const VarModel var = vecm_to_var(as_vecm(spec));
  const Eigen::Index d = spec.d;
  const int p = spec.p_true;
  Matrix c = Matrix::Zero(d * p, d * p);
  for (int k = 0; k < p; ++k) c.block(0, k * d, d, d) = var.phi[static_cast<std::size_t>(k)];
  if (p > 1) c.block(d, 0, d * (p - 1), d * (p - 1)).setIdentity();
  return c;
}

DgpDiagnostics validate_spec(const DgpSpec& spec) {
  const Matrix c = companion_matrix(spec);
  Eigen::EigenSolver<Matrix> es(c, false);
  DgpDiagnostics diag;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    diag.root_moduli.push_back(std::abs(es.eigenvalues()(i)));
  }
  std::sort(diag.root_moduli.begin(), diag.root_moduli.end(), std::greater<>());
  for (double m : diag.root_moduli) {
    if (std::abs(m - 1.0) <= kUnitRootTolerance) {
      ++diag.unit_roots;
    } else if (m > 1.0) {
      diag.explosive = true;
    }
  }
  return diag;
}

TimeSeriesPanel generate(const DgpSpec& spec) {
  const DgpDiagnostics diag = validate_spec(spec);
  if (diag.explosive) throw Error(ErrorKind::kInvalidSpec, "process has explosive roots");
  if (diag.unit_roots != spec.d - spec.r_true) {
    throw Error(ErrorKind::kInvalidSpec,
                "expected " + std::to_string(spec.d - spec.r_true) + " unit roots, found " +
                    std::to_string(diag.unit_roots));
  }

  const Eigen::Index d = spec.d;
  Eigen::SelfAdjointEigenSolver<Matrix> es(spec.noise_cov);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorKind::kInvalidSpec, "noise covariance is not positive semidefinite");
  }
  const Matrix noise_factor =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Matrix pi = spec.r_true > 0 ? Matrix(spec.alpha * spec.beta.transpose()) : Matrix::Zero(d, d);
  const int lags = spec.p_true - 1;
  // Ring of the most recent differences; slot k-1 holds dY_{t-k}.
  std::vector<Vector> recent_diffs(static_cast<std::size_t>(lags), Vector::Zero(d));

  const Eigen::Index total = spec.burn_in + spec.n_obs;
  Matrix out(spec.n_obs, d);
  Vector level = spec.initial;
  Vector shock(d);
  for (Eigen::Index t = 0; t < total; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) shock(j) = normal(rng);
    Vector diff = pi * level + noise_factor * shock;
    for (int k = 0; k < lags; ++k) diff.noalias() += spec.gamma[static_cast<std::size_t>(k)] * recent_diffs[static_cast<std::size_t>(k)];
    if (lags > 0) {
      std::rotate(recent_diffs.rbegin(), recent_diffs.rbegin() + 1, recent_diffs.rend());
      recent_diffs[0] = diff;
    }
    level += diff;
    if (t >= spec.burn_in) out.row(t - spec.burn_in) = level.transpose();
  }
  return TimeSeriesPanel::uniform(std::move(out));
}

DgpSpec reference_dgp(Eigen::Index n_obs, std::uint64_t seed) {
  DgpSpec spec;
  spec.d = 4;
  spec.r_true = 2;
  spec.p_true = 2;
  spec.beta = Matrix::Zero(4, 2);
  spec.beta << 1.0, 0.0,
              -1.0, 0.0,
               0.0, 1.0,
               0.0, -1.0;
  spec.alpha = Matrix::Zero(4, 2);
  spec.alpha << -0.10, 0.00,
                 0.10, 0.00,
                 0.00, -0.10,
                 0.00, 0.10;
  spec.gamma = {0.3 * Matrix::Identity(4, 4)};
  spec.noise_cov = Matrix::Constant(4, 4, 0.5) + 0.5 * Matrix::Identity(4, 4);
  spec.n_obs = n_obs;
  spec.seed = seed;
  spec.initial = Vector::Zero(4);
  return spec;
}

DgpSpec random_walk_dgp(int d, Eigen::Index n_obs, std::uint64_t seed) {
  DgpSpec spec;
  spec.d = d;
  spec.r_true = 0;
  spec.p_true = 1;
  spec.alpha = Matrix::Zero(d, 0);
  spec.beta = Matrix::Zero(d, 0);
  spec.noise_cov = Matrix::Identity(d, d);
  spec.n_obs = n_obs;
  spec.seed = seed;
  spec.initial = Vector::Zero(d);
  return spec;
}

}  // namespace cointvar
