#include <doctest.h>

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "qmm/covariance.hpp"
#include "qmm/eval.hpp"
#include "qmm/formats.hpp"
#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"
#include "qmm/rotate.hpp"

using namespace qmm;

namespace {

Matrix gaussian(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

VectorQuantizer identity_quantizer() {
  return [](std::span<const double> x, Rng&) {
    QuantizedVector qv;
    qv.codes.assign(x.begin(), x.end());
    qv.scale = 1.0;
    qv.rate_bits = 64.0;
    return qv;
  };
}

}  // namespace

TEST_CASE("pair normalizer hand case") {
  std::vector<double> a = {3.0, 4.0};   // ||a||^2 = 25
  std::vector<double> b = {1.0, 1.0};   // ||b||^2 = 2
  CHECK(pair_normalizer(a, b) == doctest::Approx(2.0 * 25.0 * 2.0 / 2.0));
}

TEST_CASE("k matrix matches the scalar normalizer") {
  Rng rng(241);
  Matrix a = gaussian(3, 8, rng);
  Matrix b = gaussian(4, 8, rng);
  Matrix k = k_matrix(a, b);
  CHECK(k.rows() == 3);
  CHECK(k.cols() == 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(k(i, j) == doctest::Approx(pair_normalizer(a.row(i), b.row(j))));
}

TEST_CASE("identity quantizer produces zero normalized error") {
  Rng rng(251);
  Matrix a = gaussian(6, 32, rng);
  Matrix b = gaussian(6, 32, rng);
  IpBenchStats s = ipbench_run(a, b, identity_quantizer(),
                               ErrorNormalization::Gaussian, "exact", rng);
  CHECK(s.pairs == 36);
  CHECK(s.rms <= 1e-12);
  CHECK(s.max_abs <= 1e-12);
}

TEST_CASE("raw errors reproduce the aggregate rms") {
  Rng rng(257);
  Matrix a = gaussian(5, 64, rng);
  Matrix b = gaussian(5, 64, rng);
  IntFormat f = IntFormat{4};
  VectorQuantizer q = [&](std::span<const double> x, Rng& r) {
    return absmax_int_quantize(x, f);
  };
  Rng r1(999), r2(999);
  IpBenchStats s =
      ipbench_run(a, b, q, ErrorNormalization::IntModel, "int4", r1);
  std::vector<double> errs =
      ipbench_errors(a, b, q, ErrorNormalization::IntModel, r2);
  CHECK(errs.size() == s.pairs);
  double ss = 0.0;
  for (double e : errs) ss += e * e;
  CHECK(std::sqrt(ss / errs.size()) == doctest::Approx(s.rms).epsilon(1e-12));
  CHECK(std::log2(s.rms) == doctest::Approx(s.rms_log2).epsilon(1e-12));
}

TEST_CASE("int-model rms is near one for plain absmax int quantization") {
  // the model normalizer sqrt(K delta_int / 3) is built to whiten exactly
  // this scheme, so the normalized rms should be close to 1
  Rng rng(263);
  Matrix a = gaussian(48, 512, rng);
  Matrix b = gaussian(48, 512, rng);
  IntFormat f = IntFormat{8};
  VectorQuantizer q = [&](std::span<const double> x, Rng& r) {
    return absmax_int_quantize(x, f);
  };
  IpBenchStats s =
      ipbench_run(a, b, q, ErrorNormalization::IntModel, "int8", rng);
  double scaled = s.rms * std::pow(2.0, 8.0);  // undo the 2^-M factor
  CHECK(scaled > 0.8);
  CHECK(scaled < 1.2);
}

TEST_CASE("reconstruction mse of absmax int8 tracks the step model") {
  Rng rng(269);
  std::size_t n = 1024;
  Matrix x = gaussian(64, n, rng);
  IntFormat f = IntFormat{8};
  VectorQuantizer q = [&](std::span<const double> v, Rng& r) {
    return absmax_int_quantize(v, f);
  };
  double mse = reconstruction_mse(x, q, rng);
  // per-entry mse ~ E[gamma^2]/12 with gamma = ||x||_inf / 2^(M-1);
  // for Gaussian entries ||x||_inf^2 ~ 2 ln n
  double model = 2.0 * std::log(static_cast<double>(n)) /
                 (12.0 * std::pow(2.0, 14.0));
  CHECK(mse > 0.5 * model);
  CHECK(mse < 1.5 * model);
}

TEST_CASE("matmul report for the identity scheme") {
  Rng rng(271);
  Matrix a = gaussian(8, 64, rng);
  Matrix b = gaussian(8, 64, rng);
  MatmulErrorReport rep =
      matmul_error_report(a, b, identity_quantizer(), "exact", rng);
  CHECK(rep.scheme == "exact");
  CHECK(rep.pairs == 64);
  CHECK(rep.rms_log2_gauss < -30.0);
  CHECK(rep.mean_delta_int >= 1.0);
  CHECK(rep.mean_delta_fp > 0.0);
  CHECK(rep.max_delta_fp >= rep.mean_delta_fp);
}

TEST_CASE("delta statistics in the report match the direct formulas") {
  Rng rng(277);
  Matrix a = gaussian(4, 32, rng);
  Matrix b = gaussian(4, 32, rng);
  MatmulErrorReport rep =
      matmul_error_report(a, b, identity_quantizer(), "exact", rng);
  double sum_int = 0.0, sum_fp = 0.0, max_fp = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      sum_int += delta_int(a.row(i), b.row(j));
      double dfp = delta_fp(a.row(i), b.row(j));
      sum_fp += dfp;
      max_fp = std::max(max_fp, dfp);
    }
  CHECK(rep.mean_delta_int == doctest::Approx(sum_int / 16.0).epsilon(1e-12));
  CHECK(rep.mean_delta_fp == doctest::Approx(sum_fp / 16.0).epsilon(1e-12));
  CHECK(rep.max_delta_fp == doctest::Approx(max_fp).epsilon(1e-12));
}

TEST_CASE("rotation leaves exact inner products unchanged") {
  Rng rng(281);
  std::size_t n = 64;
  Matrix a = gaussian(4, n, rng);
  Matrix b = gaussian(4, n, rng);
  std::vector<double> signs = random_signs(n, rng);
  std::vector<std::vector<double>> ra(4), rb(4);
  for (std::size_t i = 0; i < 4; ++i) {
    ra[i] = hadamard_rotate(a.row(i), signs);
    rb[i] = hadamard_rotate(b.row(i), signs);
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(dot(ra[i], rb[j]) ==
            doctest::Approx(dot(a.row(i), b.row(j))).epsilon(1e-10));
      double diff = 0.0;
      for (std::size_t t = 0; t < n; ++t) diff += std::abs(ra[i][t] - a(i, t));
      CHECK(diff > 1.0);  // the rotation actually moved the vector
    }
}

TEST_CASE("chol diag study on a flat spectrum") {
  // for lambda = c * ones the covariance is rotation invariant, so
  // U_kk^2 concentrates and the approximation c * (k/(n-k+1)) * ... = c
  Rng rng(283);
  std::size_t n = 16;
  std::vector<double> lambda(n, 2.0);
  CholDiagStudy st = chol_diag_study(lambda, 200, rng);
  REQUIRE(st.measured_mean.size() == n);
  REQUIRE(st.approx.size() == n);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(st.approx[k] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(st.measured_mean[k] == doctest::Approx(2.0).epsilon(0.15));
  }
  // last diagonal is exact: det preservation forces prod U_kk^2 = prod lambda
  CHECK(st.measured_mean[0] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("chol diag approximation endpoints on a two-level spectrum") {
  Rng rng(293);
  std::size_t n = 12;
  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = (i < 6) ? 3.0 : 1.0;
  CholDiagStudy st = chol_diag_study(lambda, 400, rng);
  double am = std::accumulate(lambda.begin(), lambda.end(), 0.0) / n;
  double hm = 0.0;
  for (double l : lambda) hm += 1.0 / l;
  hm = n / hm;
  // k = 1 behaves like the arithmetic mean, k = n like the harmonic mean
  CHECK(st.approx.front() == doctest::Approx(am).epsilon(1e-9));
  CHECK(st.approx.back() == doctest::Approx(hm).epsilon(1e-9));
  CHECK(st.measured_mean.front() == doctest::Approx(am).epsilon(0.1));
  CHECK(st.measured_mean.back() == doctest::Approx(hm).epsilon(0.1));
}

TEST_CASE("uniform vs waterfilled rate gap hand case") {
  Matrix u = cholesky_upper(Matrix::from_rows(2, 2, {2, 1, 1, 2}));
  // U_11^2 = 2, U_22^2 = 1.5; gap = (1/2) log2(1.75 / sqrt(3))
  CHECK(uniform_vs_waterfilled_gap(u) ==
        doctest::Approx(0.5 * std::log2(1.75 / std::sqrt(3.0))).epsilon(1e-12));
  CHECK(uniform_vs_waterfilled_gap(u) == doctest::Approx(0.00738).epsilon(1e-2));
  CHECK(uniform_vs_waterfilled_gap(Matrix::identity(4)) ==
        doctest::Approx(0.0).epsilon(1.0).scale(1e-12));
}
