#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qmm/covariance.hpp"
#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"
#include "qmm/sic.hpp"

using namespace qmm;

namespace {

Matrix random_upper(std::size_t n, Rng& rng) {
  Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    u(i, i) = 0.5 + rng.next_double();
    for (std::size_t j = i + 1; j < n; ++j) u(i, j) = rng.next_gaussian();
  }
  return u;
}

Matrix gaussian(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

Matrix lower_solve_identity(const Matrix& m) {
  // inverse of a unit-diagonal-free upper triangular matrix via back-subst
  std::size_t n = m.rows();
  Matrix inv(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> b(n, 0.0);
    b[col] = 1.0;
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= m(ii, j) * inv(j, col);
      inv(ii, col) = s / m(ii, ii);
    }
  }
  return inv;
}

}  // namespace

TEST_CASE("high-rate filters hand cases and the cancellation identity") {
  Matrix i2 = Matrix::identity(2);
  SicPlan p = high_rate_filters(i2);
  CHECK(p.beta == 1.0);
  CHECK(p.feedforward(0, 0) == 1.0);
  CHECK(p.feedback(0, 1) == 0.0);

  Matrix u = Matrix::from_rows(
      2, 2, {std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, std::sqrt(1.5)});
  SicPlan q = high_rate_filters(u);
  CHECK(q.feedforward(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(q.feedforward(1, 1) == doctest::Approx(1.0 / std::sqrt(1.5)));
  CHECK(q.feedback(0, 1) == doctest::Approx(0.5));
  CHECK(q.feedback(1, 0) == 0.0);

  // I - beta U (I+B)^-1 F = 0
  Rng rng(181);
  for (int t = 0; t < 10; ++t) {
    std::size_t n = 5;
    Matrix uu = random_upper(n, rng);
    SicPlan plan = high_rate_filters(uu);
    Matrix ib = plan.feedback;
    for (std::size_t i = 0; i < n; ++i) ib(i, i) += 1.0;
    Matrix prod = uu * lower_solve_identity(ib) * plan.feedforward;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0)
                                .epsilon(1.0)
                                .scale(1e-9));
  }
}

TEST_CASE("sic hand walk at n=2") {
  Matrix u = Matrix::from_rows(
      2, 2, {std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, std::sqrt(1.5)});
  Matrix w(2, 1);
  // choose W so that Y = U W equals (0.9, 0.7)
  double w1 = 0.7 / std::sqrt(1.5);
  double w0 = (0.9 - w1 / std::sqrt(2.0)) / std::sqrt(2.0);
  w(0, 0) = w0;
  w(1, 0) = w1;
  auto spacings = uniform_spacings(u, 1.0);
  SicResult res = sic_quantize(w, u, spacings);
  // bottom coordinate: round(0.7 / sqrt(1.5)) = round(0.5715) = 1
  CHECK(res.indices(1, 0) == 1.0);
  // residual top: 0.9 - 1/sqrt(2) = 0.1929, round(0.1929/sqrt(2)) = 0
  CHECK(res.indices(0, 0) == 0.0);
  CHECK(res.w_hat(1, 0) == 1.0);
  CHECK(res.w_hat(0, 0) == 0.0);
}

TEST_CASE("sic recovers codewords exactly") {
  Rng rng(191);
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 6;
    Matrix u = random_upper(n, rng);
    auto spacings = watersic_spacings(u, 0.7);
    Matrix w(n, 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        w(i, j) = spacings[i] * (std::floor(7.0 * rng.next_double()) - 3.0);
    SicResult res = sic_quantize(w, u, spacings);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(res.w_hat(i, j) == doctest::Approx(w(i, j)).epsilon(1e-9));
  }
}

TEST_CASE("sic error-cell membership is exact") {
  Rng rng(193);
  int instances = 0;
  while (instances < 10000) {
    std::size_t n = 2 + rng.next_below(15);  // n <= 16
    Matrix u = random_upper(n, rng);
    std::vector<double> spacings(n);
    for (double& a : spacings) a = 0.2 + 1.5 * rng.next_double();
    Matrix w = gaussian(n, 1, rng);
    SicResult res = sic_quantize(w, u, spacings);
    Matrix e = u * (w - res.w_hat);
    for (std::size_t i = 0; i < n; ++i) {
      double half = spacings[i] * u(i, i) / 2.0;
      CHECK(e(i, 0) >= -half - 1e-12);
      CHECK(e(i, 0) < half + 1e-12);
      ++instances;
    }
  }
}

TEST_CASE("sic matches the filter-form implementation") {
  Rng rng(197);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 3 + rng.next_below(6);
    Matrix u = random_upper(n, rng);
    std::vector<double> spacings(n);
    for (double& a : spacings) a = 0.2 + rng.next_double();
    Matrix w = gaussian(n, 4, rng);
    SicResult direct = sic_quantize(w, u, spacings);
    SicResult filt = sic_quantize_feedback(w, u, spacings);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(direct.indices(i, j) == filt.indices(i, j));
  }
}

TEST_CASE("lattice-shift equivariance of the sic decision") {
  Rng rng(199);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 5;
    Matrix u = random_upper(n, rng);
    std::vector<double> spacings(n);
    for (double& a : spacings) a = 0.3 + rng.next_double();
    Matrix w = gaussian(n, 1, rng);
    Matrix z(n, 1);
    for (std::size_t i = 0; i < n; ++i)
      z(i, 0) = std::floor(5.0 * rng.next_double()) - 2.0;
    Matrix shifted = w;
    for (std::size_t i = 0; i < n; ++i)
      shifted(i, 0) += spacings[i] * z(i, 0);
    SicResult a = sic_quantize(w, u, spacings);
    SicResult b = sic_quantize(shifted, u, spacings);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(b.indices(i, 0) == doctest::Approx(a.indices(i, 0) + z(i, 0)));
  }
}

TEST_CASE("waterfilled spacings hand case and density preservation") {
  Matrix i3 = Matrix::identity(3);
  auto si = watersic_spacings(i3, 0.8);
  for (double a : si) CHECK(a == doctest::Approx(0.8));

  Matrix u = cholesky_upper(Matrix::from_rows(2, 2, {2, 1, 1, 2}));
  auto s = watersic_spacings(u, 1.0);
  CHECK(s[0] == doctest::Approx(0.93060).epsilon(1e-4));
  CHECK(s[1] == doctest::Approx(1.07457).epsilon(1e-4));
  CHECK(s[0] * u(0, 0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-10));
  CHECK(s[1] * u(1, 1) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-10));

  Rng rng(211);
  Matrix ru = random_upper(8, rng);
  auto rs = watersic_spacings(ru, 0.6);
  double logprod = 0.0;
  for (double a : rs) logprod += std::log(a);
  CHECK(logprod == doctest::Approx(8.0 * std::log(0.6)).epsilon(1e-9));
  // all effective steps equal
  for (std::size_t i = 1; i < 8; ++i)
    CHECK(rs[i] * ru(i, i) == doctest::Approx(rs[0] * ru(0, 0)).epsilon(1e-12));
}

TEST_CASE("predicted distortions and dominance") {
  Matrix i4 = Matrix::identity(4);
  CHECK(sic_predicted_wmse(i4, uniform_spacings(i4, 1.0)) ==
        doctest::Approx(1.0 / 12.0));

  Matrix u = cholesky_upper(Matrix::from_rows(2, 2, {2, 1, 1, 2}));
  CHECK(sic_predicted_wmse(u, uniform_spacings(u, 1.0)) ==
        doctest::Approx(0.14583).epsilon(1e-4));
  CHECK(sic_predicted_wmse(u, watersic_spacings(u, 1.0)) ==
        doctest::Approx(std::sqrt(3.0) / 12.0).epsilon(1e-10));

  Rng rng(223);
  for (int t = 0; t < 50; ++t) {
    Matrix ru = random_upper(6, rng);
    double uniform = sic_predicted_wmse(ru, uniform_spacings(ru, 0.5));
    double waterfilled = sic_predicted_wmse(ru, watersic_spacings(ru, 0.5));
    CHECK(uniform >= waterfilled - 1e-12);
  }
}

TEST_CASE("measured wmse matches prediction on the 2x2 worked example") {
  Rng rng(227);
  Matrix sigma = Matrix::from_rows(2, 2, {2, 1, 1, 2});
  Matrix u = cholesky_upper(sigma);
  Matrix w = gaussian(2, 4096, rng);

  auto ws = watersic_spacings(u, 1.0);
  SicResult water = sic_quantize(w, u, ws);
  double wmse_water = weighted_mse(w, water.w_hat, u);
  CHECK(wmse_water == doctest::Approx(std::sqrt(3.0) / 12.0).epsilon(0.02));

  auto us = uniform_spacings(u, 1.0);
  SicResult gptq = sic_quantize(w, u, us);
  double wmse_gptq = weighted_mse(w, gptq.w_hat, u);
  CHECK(wmse_gptq == doctest::Approx(0.14583).epsilon(0.02));
}

TEST_CASE("identity covariance reduces sic to plain rounding") {
  Rng rng(229);
  Matrix u = Matrix::identity(5);
  Matrix w = gaussian(5, 8, rng);
  double alpha = 0.37;
  SicResult res = sic_quantize(w, u, uniform_spacings(u, alpha));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(res.w_hat(i, j) ==
            doctest::Approx(alpha * std::nearbyint(w(i, j) / alpha)));
}

TEST_CASE("rate accounting") {
  Matrix z = Matrix::from_rows(2, 4, {0, 3, -1, 2, 7, -7, 0, 1});
  CHECK(rect_rate(z) ==
        doctest::Approx(0.5 * (std::log2(7.0) + std::log2(15.0))).epsilon(1e-12));
  Matrix zero(3, 5, 0.0);
  CHECK(rect_rate(zero) == 0.0);
  CHECK(entropy_rate(zero) == 0.0);

  // one row uniform over {0,1}: one bit plus the small-sample correction
  Matrix bits(1, 1024);
  for (int j = 0; j < 1024; ++j) bits(0, j) = j % 2;
  CHECK(entropy_rate(bits) ==
        doctest::Approx(1.0 + 1.0 / (2048.0 * std::log(2.0))).epsilon(1e-9));
}

TEST_CASE("entropy rate never exceeds rectangular rate on sic outputs") {
  Rng rng(233);
  for (int t = 0; t < 10; ++t) {
    Matrix u = random_upper(8, rng);
    Matrix w = gaussian(8, 512, rng);
    SicResult res = sic_quantize(w, u, watersic_spacings(u, 0.4));
    CHECK(entropy_rate(res.indices) <= rect_rate(res.indices) + 1e-9);
  }
}

TEST_CASE("alpha for a target rate") {
  CHECK(alpha_for_rate(0.0) == doctest::Approx(4.1327).epsilon(1e-4));
  CHECK(alpha_for_rate(5.0) == doctest::Approx(alpha_for_rate(4.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("entropy rate at alpha_for_rate tracks the target") {
  Rng rng(239);
  Matrix u = Matrix::identity(16);
  Matrix w = gaussian(16, 4096, rng);
  for (double r : {4.0, 6.0}) {
    SicResult res =
        sic_quantize(w, u, uniform_spacings(u, alpha_for_rate(r)));
    double h = entropy_rate(res.indices);
    CHECK(h > r - 0.3);
    CHECK(h < r + 0.3);
  }
}

TEST_CASE("input validation") {
  Matrix not_upper = Matrix::from_rows(2, 2, {1, 0, 1, 1});
  CHECK_THROWS_AS(uniform_spacings(not_upper, 1.0), std::invalid_argument);
  Matrix u = Matrix::identity(3);
  Matrix w(2, 2);
  std::vector<double> sp(3, 1.0);
  CHECK_THROWS_AS(sic_quantize(w, u, sp), std::invalid_argument);
  CHECK_THROWS_AS(alpha_for_rate(-1.0), std::invalid_argument);
}
