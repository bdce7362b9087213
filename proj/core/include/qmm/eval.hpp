#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qmm/formats.hpp"
#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"

namespace qmm {

/// Per-pair normalization K(i,j) = 2 ||a_i||^2 ||b_j||^2 / n used to put
/// inner-product errors of different row pairs on a common scale.
double pair_normalizer(std::span<const double> a, std::span<const double> b);

enum class ErrorNormalization {
  IntModel,  // e / sqrt(K * delta_int / 3)
  FpModel,   // e / sqrt(K * delta_fp)
  Gaussian,  // e / sqrt(2 n)
};

struct IpBenchStats {
  std::string label;
  std::size_t pairs = 0;
  double rms = 0.0;           // RMS of normalized errors
  double rms_log2 = 0.0;      // log2(rms)
  double mean = 0.0;          // mean normalized error (bias check)
  double max_abs = 0.0;       // worst normalized error
};

using VectorQuantizer =
    std::function<QuantizedVector(std::span<const double>, Rng&)>;

/// Quantize every row of a and b, form all inner products against the exact
/// values, normalize each error, and aggregate. a and b must share the inner
/// dimension (their column count).
IpBenchStats ipbench_run(const Matrix& a, const Matrix& b,
                         const VectorQuantizer& quantizer,
                         ErrorNormalization norm, const std::string& label,
                         Rng& rng);

/// Collect the raw normalized errors instead of aggregates (for histograms
/// and distribution tests).
std::vector<double> ipbench_errors(const Matrix& a, const Matrix& b,
                                   const VectorQuantizer& quantizer,
                                   ErrorNormalization norm, Rng& rng);

/// Mean squared reconstruction error per entry of a quantizer over rows of x.
double reconstruction_mse(const Matrix& x, const VectorQuantizer& quantizer,
                          Rng& rng);

/// K(i,j) = 2 ||a_i||^2 ||b_j||^2 / n for every row pair.
Matrix k_matrix(const Matrix& a, const Matrix& b);

/// One inner-product experiment summarized under all three normalizations.
struct MatmulErrorReport {
  std::string scheme;
  std::size_t pairs = 0;
  double rms_log2_gauss = 0.0;      // errors / sqrt(2n)
  double rms_log2_int_model = 0.0;  // errors / sqrt(K delta_int / 3)
  double rms_log2_fp_model = 0.0;   // errors / sqrt(K delta_fp)
  double mean_delta_int = 0.0;
  double mean_delta_fp = 0.0;
  double max_delta_fp = 0.0;
};
MatmulErrorReport matmul_error_report(const Matrix& a, const Matrix& b,
                                      const VectorQuantizer& quantizer,
                                      const std::string& scheme, Rng& rng);

/// Mean measured Cholesky diagonal squares over random rotations of a fixed
/// spectrum, next to the elementary-symmetric approximation.
struct CholDiagStudy {
  std::vector<double> measured_mean;  // E[U_kk^2], k = 1..n
  std::vector<double> approx;
};
CholDiagStudy chol_diag_study(std::span<const double> lambda,
                              std::size_t trials, Rng& rng);

/// High-rate horizontal rate gap between constant and waterfilled spacings:
/// (1/2) log2 of AM/GM of the U_ii^2.
double uniform_vs_waterfilled_gap(const Matrix& u);

}  // namespace qmm
