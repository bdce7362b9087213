#pragma once

#include <span>
#include <vector>

#include "qmm/matrix.hpp"

namespace qmm {

/// Successive-interference-cancellation weight quantizer on the upper
/// Cholesky factor U of the column covariance. Works column-block-wise on
/// Y = U W: for i = n..1 the row is rounded to a step-alpha_i grid and its
/// contribution cancelled from the remaining rows.
struct SicResult {
  Matrix w_hat;    // quantized weights, same shape as w
  Matrix indices;  // integer grid indices Z (stored as doubles)
};

/// Per-dimension grid spacings. uniform_spacings gives alpha_i = alpha;
/// watersic_spacings gives alpha_i = alpha |det U|^(1/n) / U_ii so every
/// effective step alpha_i U_ii equals alpha |sigma|^(1/2n).
std::vector<double> uniform_spacings(const Matrix& u, double alpha);
std::vector<double> watersic_spacings(const Matrix& u, double alpha);

SicResult sic_quantize(const Matrix& w, const Matrix& u,
                       std::span<const double> spacings);

/// High-rate noise-shaping filters: feedforward F = diag(U)^-1, feedback
/// B = diag(U)^-1 U - I (strictly upper triangular), beta = 1. They satisfy
/// I - beta U (I+B)^-1 F = 0.
struct SicPlan {
  Matrix feedforward;
  Matrix feedback;
  double beta = 1.0;
};
SicPlan high_rate_filters(const Matrix& u);

/// Equivalent noise-shaping form of the same quantizer, built on
/// high_rate_filters. Exposed separately so the two implementations can
/// cross-check.
SicResult sic_quantize_feedback(const Matrix& w, const Matrix& u,
                                std::span<const double> spacings);

/// Predicted weighted MSE per entry under the uniform-error model:
/// (1/12n) sum (alpha_i U_ii)^2. With watersic_spacings this collapses to
/// alpha^2 |sigma|^(1/n) / 12.
double sic_predicted_wmse(const Matrix& u, std::span<const double> spacings);

/// Step size giving entropy rate about R bits/entry for unit-variance
/// weights: alpha = sqrt(2 pi e sigma_w2 2^(-2R)).
double alpha_for_rate(double rate, double sigma_w2 = 1.0);

/// Realized weighted MSE ||U (W - What)||_F^2 / (n * cols).
double weighted_mse(const Matrix& w, const Matrix& w_hat, const Matrix& u);

/// Rectangular-support rate of the index matrix:
/// (1/n) sum_i log2(1 + 2 max_j |Z_ij|).
double rect_rate(const Matrix& indices);

/// Per-row empirical (plugin) entropy rate in bits/entry, with a
/// Miller-Madow bias correction (support-1)/(2 N ln 2) added per row, where
/// the support is the contiguous range between the smallest and largest
/// observed index (the index distributions are unimodal).
double entropy_rate(const Matrix& indices);

}  // namespace qmm
