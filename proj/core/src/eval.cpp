#include "qmm/eval.hpp"

#include <cmath>
#include <stdexcept>

#include "qmm/covariance.hpp"
#include "qmm/rotate.hpp"

namespace qmm {

double pair_normalizer(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("pair_normalizer: length mismatch");
  double n = static_cast<double>(a.size());
  return 2.0 * norm2_sq(a) * norm2_sq(b) / n;
}

namespace {

double normalizer(std::span<const double> a, std::span<const double> b,
                  ErrorNormalization norm) {
  double k = pair_normalizer(a, b);
  switch (norm) {
    case ErrorNormalization::IntModel:
      return std::sqrt(k * delta_int(a, b) / 3.0);
    case ErrorNormalization::FpModel:
      return std::sqrt(k * delta_fp(a, b));
    case ErrorNormalization::Gaussian:
      return std::sqrt(2.0 * static_cast<double>(a.size()));
  }
  throw std::invalid_argument("ipbench: unknown normalization");
}

}  // namespace

std::vector<double> ipbench_errors(const Matrix& a, const Matrix& b,
                                   const VectorQuantizer& quantizer,
                                   ErrorNormalization norm, Rng& rng) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("ipbench: inner dimension mismatch");
  std::vector<QuantizedVector> qa(a.rows()), qb(b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) qa[i] = quantizer(a.row(i), rng);
  for (std::size_t j = 0; j < b.rows(); ++j) qb[j] = quantizer(b.row(j), rng);

  std::vector<double> errors;
  errors.reserve(a.rows() * b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double exact = dot(a.row(i), b.row(j));
      double approx = quantized_inner_product(qa[i], qb[j]);
      errors.push_back((approx - exact) / normalizer(a.row(i), b.row(j), norm));
    }
  }
  return errors;
}

IpBenchStats ipbench_run(const Matrix& a, const Matrix& b,
                         const VectorQuantizer& quantizer,
                         ErrorNormalization norm, const std::string& label,
                         Rng& rng) {
  std::vector<double> e = ipbench_errors(a, b, quantizer, norm, rng);
  IpBenchStats st;
  st.label = label;
  st.pairs = e.size();
  double sum = 0.0, sum_sq = 0.0, max_abs = 0.0;
  for (double x : e) {
    sum += x;
    sum_sq += x * x;
    max_abs = std::max(max_abs, std::fabs(x));
  }
  double n = static_cast<double>(e.size());
  st.mean = sum / n;
  st.rms = std::sqrt(sum_sq / n);
  st.rms_log2 = std::log2(st.rms);
  st.max_abs = max_abs;
  return st;
}

Matrix k_matrix(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      k(i, j) = pair_normalizer(a.row(i), b.row(j));
  return k;
}

MatmulErrorReport matmul_error_report(const Matrix& a, const Matrix& b,
                                      const VectorQuantizer& quantizer,
                                      const std::string& scheme, Rng& rng) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("matmul_error_report: inner dimension mismatch");
  std::vector<QuantizedVector> qa(a.rows()), qb(b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) qa[i] = quantizer(a.row(i), rng);
  for (std::size_t j = 0; j < b.rows(); ++j) qb[j] = quantizer(b.row(j), rng);

  MatmulErrorReport rep;
  rep.scheme = scheme;
  double sdi = 0.0, sdf = 0.0;
  double sg = 0.0, si = 0.0, sf = 0.0;
  double n2 = 2.0 * static_cast<double>(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double e = quantized_inner_product(qa[i], qb[j]) -
                 dot(a.row(i), b.row(j));
      double k = pair_normalizer(a.row(i), b.row(j));
      double di = delta_int(a.row(i), b.row(j));
      double df = delta_fp(a.row(i), b.row(j));
      sdi += di;
      sdf += df;
      rep.max_delta_fp = std::max(rep.max_delta_fp, df);
      sg += e * e / n2;
      si += e * e / (k * di / 3.0);
      sf += e * e / (k * df);
      ++rep.pairs;
    }
  }
  double np = static_cast<double>(rep.pairs);
  rep.mean_delta_int = sdi / np;
  rep.mean_delta_fp = sdf / np;
  rep.rms_log2_gauss = 0.5 * std::log2(sg / np);
  rep.rms_log2_int_model = 0.5 * std::log2(si / np);
  rep.rms_log2_fp_model = 0.5 * std::log2(sf / np);
  return rep;
}

CholDiagStudy chol_diag_study(std::span<const double> lambda,
                              std::size_t trials, Rng& rng) {
  std::size_t n = lambda.size();
  if (n == 0 || trials == 0)
    throw std::invalid_argument("chol_diag_study: empty input");
  CholDiagStudy study;
  study.measured_mean.assign(n, 0.0);
  study.approx = ukk_sq_approx(lambda);
  for (std::size_t t = 0; t < trials; ++t) {
    Matrix v = random_orthogonal(n, rng);
    Matrix sigma(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          s += v(i, k) * lambda[k] * v(j, k);
        sigma(i, j) = s;
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double m = 0.5 * (sigma(i, j) + sigma(j, i));
        sigma(i, j) = sigma(j, i) = m;
      }
    Matrix u = cholesky_upper(sigma);
    for (std::size_t k = 0; k < n; ++k)
      study.measured_mean[k] += u(k, k) * u(k, k);
  }
  for (double& m : study.measured_mean) m /= static_cast<double>(trials);
  return study;
}

double uniform_vs_waterfilled_gap(const Matrix& u) {
  std::vector<double> d(u.rows());
  for (std::size_t i = 0; i < u.rows(); ++i) d[i] = u(i, i) * u(i, i);
  return am_gm_rate_gap(d);
}

double reconstruction_mse(const Matrix& x, const VectorQuantizer& quantizer,
                          Rng& rng) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    QuantizedVector q = quantizer(x.row(i), rng);
    std::vector<double> rec = q.reconstruct();
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double e = rec[j] - x(i, j);
      acc += e * e;
    }
  }
  return acc / static_cast<double>(x.size());
}

}  // namespace qmm
