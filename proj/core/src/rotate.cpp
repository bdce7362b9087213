#include "qmm/rotate.hpp"

#include <cmath>
#include <stdexcept>

namespace qmm {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void fwht_inplace(std::vector<double>& v) {
  std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        double a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

}  // namespace

std::vector<double> hadamard_rotate(std::span<const double> v,
                                    std::span<const double> signs) {
  std::size_t n = v.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("hadamard_rotate: length must be a power of two");
  if (signs.size() != n)
    throw std::invalid_argument("hadamard_rotate: sign length mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = signs[i] * v[i];
  fwht_inplace(out);
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : out) x *= scale;
  return out;
}

std::vector<double> hadamard_unrotate(std::span<const double> v,
                                      std::span<const double> signs) {
  std::size_t n = v.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("hadamard_unrotate: length must be a power of two");
  if (signs.size() != n)
    throw std::invalid_argument("hadamard_unrotate: sign length mismatch");
  std::vector<double> out(v.begin(), v.end());
  fwht_inplace(out);
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) out[i] = signs[i] * out[i] * scale;
  return out;
}

std::vector<double> random_signs(std::size_t n, Rng& rng) {
  std::vector<double> s(n);
  for (double& x : s) x = static_cast<double>(rng.next_sign());
  return s;
}

Matrix hadamard_rotate_cols(const Matrix& m, std::span<const double> signs) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    out.set_col(j, hadamard_rotate(m.col(j), signs));
  return out;
}

Matrix random_orthogonal(std::size_t n, Rng& rng) {
  // QR by modified Gram-Schmidt on an iid Gaussian matrix, with the diagonal
  // of R forced positive so the result is Haar distributed.
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> v = g.col(j);
    for (std::size_t k = 0; k < j; ++k) {
      std::vector<double> qk = q.col(k);
      double r = dot(qk, v);
      for (std::size_t i = 0; i < n; ++i) v[i] -= r * qk[i];
    }
    double nv = norm2(v);
    if (nv == 0.0)
      throw std::runtime_error("random_orthogonal: degenerate sample");
    for (double& x : v) x /= nv;
    q.set_col(j, v);
  }
  return q;
}

}  // namespace qmm
