#include "qmm/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "qmm/grid.hpp"

namespace qmm {

std::vector<double> nearest_int_lattice(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = round_even(x[i]);
  return out;
}

namespace {

// Nearest point of D8 (integer vectors with even coordinate sum): round each
// coordinate, and if the sum comes out odd re-round the coordinate with the
// largest rounding error in the other direction.
std::array<double, 8> nearest_d8(std::span<const double> x) {
  std::array<double, 8> r;
  long long sum = 0;
  for (int i = 0; i < 8; ++i) {
    r[i] = round_even(x[i]);
    sum += static_cast<long long>(r[i]);
  }
  if (sum % 2 != 0) {
    int worst = 0;
    double worst_err = -1.0;
    for (int i = 0; i < 8; ++i) {
      double err = std::fabs(x[i] - r[i]);
      if (err > worst_err) {
        worst_err = err;
        worst = i;
      }
    }
    r[worst] += (x[worst] >= r[worst]) ? 1.0 : -1.0;
  }
  return r;
}

double dist_sq(std::span<const double> x, std::span<const double> p) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = x[i] - p[i];
    d += e * e;
  }
  return d;
}

Matrix invert(const Matrix& m) {
  std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::fabs(a(i, col)) > std::fabs(a(piv, col))) piv = i;
    if (a(piv, col) == 0.0) throw std::runtime_error("invert: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    double d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      double f = a(i, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(col, j);
        inv(i, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

double abs_det(const Matrix& m) {
  std::size_t n = m.rows();
  Matrix a = m;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::fabs(a(i, col)) > std::fabs(a(piv, col))) piv = i;
    if (a(piv, col) == 0.0) return 0.0;
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
    det *= a(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      double f = a(i, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
    }
  }
  return std::fabs(det);
}

}  // namespace

std::array<double, 8> nearest_e8(std::span<const double> x) {
  if (x.size() != 8) throw std::invalid_argument("nearest_e8: need length 8");
  std::array<double, 8> a = nearest_d8(x);
  std::array<double, 8> shifted;
  for (int i = 0; i < 8; ++i) shifted[i] = x[i] - 0.5;
  std::array<double, 8> b = nearest_d8(shifted);
  for (int i = 0; i < 8; ++i) b[i] += 0.5;
  return dist_sq(x, a) <= dist_sq(x, b) ? a : b;
}

double LatticeSpec::covolume() const { return abs_det(generator); }

LatticeSpec integer_lattice(std::size_t n) {
  LatticeSpec spec;
  spec.name = "Z^" + std::to_string(n);
  spec.generator = Matrix::identity(n);
  spec.generator_inverse = Matrix::identity(n);
  spec.nearest = nearest_int_lattice;
  return spec;
}

LatticeSpec e8_lattice() {
  LatticeSpec spec;
  spec.name = "E8";
  // Columns: (2,0,...,0), the staggered (-1,1) chain, and the all-halves
  // glue vector; unimodular (|det G| = 1).
  Matrix g(8, 8);
  g(0, 0) = 2.0;
  for (int c = 1; c < 7; ++c) {
    g(c - 1, c) = -1.0;
    g(c, c) = 1.0;
  }
  for (int r = 0; r < 8; ++r) g(r, 7) = 0.5;
  spec.generator = g;
  spec.generator_inverse = invert(g);
  spec.nearest = [](std::span<const double> x) {
    std::array<double, 8> p = nearest_e8(x);
    return std::vector<double>(p.begin(), p.end());
  };
  return spec;
}

double nsm_estimate(const LatticeSpec& lattice, std::size_t samples,
                    Rng& rng) {
  if (samples == 0) throw std::invalid_argument("nsm_estimate: no samples");
  std::size_t d = lattice.dim();
  double acc = 0.0;
  std::vector<double> u(d), x(d);
  for (std::size_t s = 0; s < samples; ++s) {
    // uniform over the fundamental parallelepiped; subtracting the nearest
    // lattice point makes the error uniform over the Voronoi region
    for (double& ui : u) ui = rng.next_double();
    for (std::size_t i = 0; i < d; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < d; ++j) v += lattice.generator(i, j) * u[j];
      x[i] = v;
    }
    std::vector<double> p = lattice.nearest(x);
    acc += dist_sq(x, p);
  }
  double mean = acc / (static_cast<double>(d) * static_cast<double>(samples));
  return mean / std::pow(lattice.covolume(), 2.0 / static_cast<double>(d));
}

std::vector<std::int64_t> VoronoiCode::encode(std::span<const double> x) const {
  std::size_t d = lattice.dim();
  if (x.size() != d) throw std::invalid_argument("VoronoiCode: dimension mismatch");
  if (q < 2) throw std::invalid_argument("VoronoiCode: q must be >= 2");
  std::vector<double> y = lattice.nearest(x);
  std::vector<std::int64_t> v(d);
  for (std::size_t i = 0; i < d; ++i) {
    double c = round_even(dot(lattice.generator_inverse.row(i), y));
    std::int64_t vi = static_cast<std::int64_t>(c) % q;
    if (vi < 0) vi += q;
    v[i] = vi;
  }
  return v;
}

std::vector<double> VoronoiCode::decode(std::span<const std::int64_t> v) const {
  std::size_t d = lattice.dim();
  if (v.size() != d) throw std::invalid_argument("VoronoiCode: dimension mismatch");
  std::vector<double> w(d), scaled(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      s += lattice.generator(i, j) * static_cast<double>(v[j]);
    w[i] = s;
    scaled[i] = s / static_cast<double>(q);
  }
  std::vector<double> coarse = lattice.nearest(scaled);
  for (std::size_t i = 0; i < d; ++i)
    w[i] -= static_cast<double>(q) * coarse[i];
  return w;
}

}  // namespace qmm
