#pragma once

#include <span>
#include <vector>

#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"

namespace qmm {

/// Sample covariance with cached spectrum and Cholesky factor. If the plain
/// Cholesky fails, a jitter of 1e-8 tr(sigma)/n is added to the diagonal and
/// recorded.
struct CovarianceModel {
  Matrix sigma;
  std::vector<double> eigenvalues;  // descending
  Matrix chol_upper;                // sigma = U^T U
  double jitter = 0.0;
};

/// Build a CovarianceModel from sigma directly.
CovarianceModel make_covariance_model(Matrix sigma);

/// Plug-in sample covariance (1/b) X^T X from b samples in the rows of x.
CovarianceModel estimate_covariance(const Matrix& x);

/// Symmetric eigendecomposition by the cyclic Jacobi method.
/// Returns eigenvalues ascending with matching orthonormal columns in V.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;  // column i pairs with values[i]
};
EigenDecomposition jacobi_eigen(const Matrix& sym, double tol = 1e-12,
                                int max_sweeps = 64);

/// Upper-triangular Cholesky factor: sigma = U^T U with U_ii > 0.
/// Throws std::invalid_argument if sigma is not positive definite.
Matrix cholesky_upper(const Matrix& sigma);

/// SPD covariance with a log-uniform spectrum in [lo, hi] and Haar-random
/// eigenbasis.
Matrix random_covariance(std::size_t n, double lo, double hi, Rng& rng);

/// Sample a rows x n matrix of rows ~ N(0, sigma) via the Cholesky factor.
Matrix sample_gaussian_rows(std::size_t rows, const Matrix& sigma, Rng& rng);

/// Wishart-style synthetic covariance: (1/dof) sum of dof iid N(0, I_n)
/// outer products, optionally with a planted spectrum via base.
Matrix wishart_covariance(std::size_t n, std::size_t dof, Rng& rng);

/// Rate penalty of ignoring the spectrum: (1/2) log2(AM/GM) of the values.
double am_gm_rate_gap(std::span<const double> values);

/// k-th elementary symmetric polynomial ratios used by the u_kk
/// approximation; input eigenvalues must be positive.
double elementary_symmetric_ratio(std::span<const double> lambda, int k);

/// Approximate squared diagonal of the Cholesky factor of a covariance with
/// eigenvalues lambda: U_kk^2 about (k/(n-k+1)) e_k(lambda)/e_{k-1}(lambda),
/// k = 1..n (k=1 gives the arithmetic mean, k=n the harmonic mean).
std::vector<double> ukk_sq_approx(std::span<const double> lambda);

}  // namespace qmm
