#include "qmm/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmm/rotate.hpp"

namespace qmm {

CovarianceModel make_covariance_model(Matrix sigma) {
  std::size_t n = sigma.rows();
  if (sigma.cols() != n)
    throw std::invalid_argument("make_covariance_model: matrix must be square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double m = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = sigma(j, i) = m;
    }
  CovarianceModel model;
  model.sigma = std::move(sigma);
  try {
    model.chol_upper = cholesky_upper(model.sigma);
  } catch (const std::invalid_argument&) {
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) tr += model.sigma(i, i);
    model.jitter = 1e-8 * tr / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) model.sigma(i, i) += model.jitter;
    model.chol_upper = cholesky_upper(model.sigma);
  }
  EigenDecomposition eig = jacobi_eigen(model.sigma);
  model.eigenvalues.assign(eig.values.rbegin(), eig.values.rend());
  return model;
}

CovarianceModel estimate_covariance(const Matrix& x) {
  if (x.rows() < 2)
    throw std::invalid_argument("estimate_covariance: need at least 2 samples");
  std::size_t b = x.rows(), n = x.cols();
  Matrix sigma(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < b; ++r) s += x(r, i) * x(r, j);
      sigma(i, j) = sigma(j, i) = s / static_cast<double>(b);
    }
  return make_covariance_model(std::move(sigma));
}

Matrix wishart_covariance(std::size_t n, std::size_t dof, Rng& rng) {
  if (n == 0 || dof == 0)
    throw std::invalid_argument("wishart_covariance: bad parameters");
  Matrix x(dof, n);
  for (std::size_t i = 0; i < dof; ++i)
    for (std::size_t j = 0; j < n; ++j) x(i, j) = rng.next_gaussian();
  Matrix sigma(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < dof; ++r) s += x(r, i) * x(r, j);
      sigma(i, j) = sigma(j, i) = s / static_cast<double>(dof);
    }
  return sigma;
}

double am_gm_rate_gap(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("am_gm_rate_gap: empty input");
  double am = 0.0, logsum = 0.0;
  for (double v : values) {
    if (!(v > 0.0))
      throw std::invalid_argument("am_gm_rate_gap: values must be positive");
    am += v;
    logsum += std::log2(v);
  }
  double n = static_cast<double>(values.size());
  return 0.5 * (std::log2(am / n) - logsum / n);
}

EigenDecomposition jacobi_eigen(const Matrix& sym, double tol,
                                int max_sweeps) {
  std::size_t n = sym.rows();
  if (sym.cols() != n)
    throw std::invalid_argument("jacobi_eigen: matrix must be square");
  Matrix a = sym;
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= tol * (1.0 + a.frobenius_norm())) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  EigenDecomposition out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return out.values[i] < out.values[j];
  });
  EigenDecomposition sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted.values[i] = out.values[order[i]];
    for (std::size_t k = 0; k < n; ++k)
      sorted.vectors(k, i) = v(k, order[i]);
  }
  return sorted;
}

Matrix cholesky_upper(const Matrix& sigma) {
  std::size_t n = sigma.rows();
  if (sigma.cols() != n)
    throw std::invalid_argument("cholesky_upper: matrix must be square");
  Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = sigma(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= u(k, i) * u(k, j);
      if (i == j) {
        if (s <= 0.0)
          throw std::invalid_argument("cholesky_upper: not positive definite");
        u(i, i) = std::sqrt(s);
      } else {
        u(i, j) = s / u(i, i);
      }
    }
  }
  return u;
}

Matrix random_covariance(std::size_t n, double lo, double hi, Rng& rng) {
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("random_covariance: need 0 < lo <= hi");
  Matrix q = random_orthogonal(n, rng);
  std::vector<double> lam(n);
  double llo = std::log(lo), lhi = std::log(hi);
  for (double& l : lam) l = std::exp(llo + (lhi - llo) * rng.next_double());
  Matrix sigma(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += q(i, k) * lam[k] * q(j, k);
      sigma(i, j) = s;
    }
  // symmetrize away roundoff
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double m = 0.5 * (sigma(i, j) + sigma(j, i));
      sigma(i, j) = sigma(j, i) = m;
    }
  return sigma;
}

Matrix sample_gaussian_rows(std::size_t rows, const Matrix& sigma, Rng& rng) {
  std::size_t n = sigma.rows();
  Matrix u = cholesky_upper(sigma);
  Matrix out(rows, n);
  std::vector<double> z(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& zi : z) zi = rng.next_gaussian();
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += z[k] * u(k, j);
      out(r, j) = s;
    }
  }
  return out;
}

namespace {

// e_0..e_n of the given values via the stable one-pass recurrence.
std::vector<double> elementary_symmetric(std::span<const double> vals) {
  std::vector<double> e(vals.size() + 1, 0.0);
  e[0] = 1.0;
  std::size_t count = 0;
  for (double v : vals) {
    ++count;
    for (std::size_t k = count; k >= 1; --k) e[k] += v * e[k - 1];
  }
  return e;
}

}  // namespace

double elementary_symmetric_ratio(std::span<const double> lambda, int k) {
  std::size_t n = lambda.size();
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("elementary_symmetric_ratio: k out of range");
  double logg = 0.0;
  for (double l : lambda) {
    if (!(l > 0.0))
      throw std::invalid_argument(
          "elementary_symmetric_ratio: eigenvalues must be positive");
    logg += std::log(l);
  }
  // normalize by the geometric mean so e_k stays in range for large n
  double g = std::exp(logg / static_cast<double>(n));
  std::vector<double> scaled(lambda.begin(), lambda.end());
  for (double& l : scaled) l /= g;
  std::vector<double> e = elementary_symmetric(scaled);
  return g * e[k] / e[k - 1];
}

std::vector<double> ukk_sq_approx(std::span<const double> lambda) {
  std::size_t n = lambda.size();
  std::vector<double> out(n);
  for (std::size_t k = 1; k <= n; ++k) {
    double ratio = elementary_symmetric_ratio(lambda, static_cast<int>(k));
    out[k - 1] =
        static_cast<double>(k) / static_cast<double>(n - k + 1) * ratio;
  }
  return out;
}

}  // namespace qmm
