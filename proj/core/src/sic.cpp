#include "qmm/sic.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "qmm/grid.hpp"

namespace qmm {
namespace {

void check_square_upper(const Matrix& u) {
  if (u.rows() != u.cols())
    throw std::invalid_argument("sic: U must be square");
  for (std::size_t i = 0; i < u.rows(); ++i) {
    if (!(u(i, i) > 0.0))
      throw std::invalid_argument("sic: U must have positive diagonal");
    for (std::size_t j = 0; j < i; ++j)
      if (u(i, j) != 0.0)
        throw std::invalid_argument("sic: U must be upper triangular");
  }
}

double log_abs_det(const Matrix& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) s += std::log(u(i, i));
  return s;
}

}  // namespace

std::vector<double> uniform_spacings(const Matrix& u, double alpha) {
  check_square_upper(u);
  if (!(alpha > 0.0))
    throw std::invalid_argument("uniform_spacings: alpha must be positive");
  return std::vector<double>(u.rows(), alpha);
}

std::vector<double> watersic_spacings(const Matrix& u, double alpha) {
  check_square_upper(u);
  if (!(alpha > 0.0))
    throw std::invalid_argument("watersic_spacings: alpha must be positive");
  double detroot =
      std::exp(log_abs_det(u) / static_cast<double>(u.rows()));
  std::vector<double> s(u.rows());
  for (std::size_t i = 0; i < u.rows(); ++i)
    s[i] = alpha * detroot / u(i, i);
  return s;
}

SicResult sic_quantize(const Matrix& w, const Matrix& u,
                       std::span<const double> spacings) {
  check_square_upper(u);
  std::size_t n = u.rows();
  if (w.rows() != n)
    throw std::invalid_argument("sic_quantize: W row count must match U");
  if (spacings.size() != n)
    throw std::invalid_argument("sic_quantize: spacing count must match U");

  // Work on Y = U W and cancel quantized rows from the top, bottom row first.
  Matrix y = u * w;
  SicResult res;
  res.w_hat = Matrix(n, w.cols());
  res.indices = Matrix(n, w.cols());
  for (std::size_t ii = n; ii-- > 0;) {
    double step = spacings[ii] * u(ii, ii);
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double z = round_even(y(ii, j) / step);
      res.indices(ii, j) = z;
      double what = spacings[ii] * z;
      res.w_hat(ii, j) = what;
      for (std::size_t i = 0; i <= ii; ++i)
        y(i, j) -= spacings[ii] * u(i, ii) * z;
    }
  }
  return res;
}

SicPlan high_rate_filters(const Matrix& u) {
  check_square_upper(u);
  std::size_t n = u.rows();
  SicPlan plan;
  plan.feedforward = Matrix(n, n);
  plan.feedback = Matrix(n, n);
  plan.beta = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    plan.feedforward(i, i) = 1.0 / u(i, i);
    for (std::size_t j = i + 1; j < n; ++j)
      plan.feedback(i, j) = u(i, j) / u(i, i);
  }
  return plan;
}

SicResult sic_quantize_feedback(const Matrix& w, const Matrix& u,
                                std::span<const double> spacings) {
  check_square_upper(u);
  std::size_t n = u.rows();
  if (w.rows() != n)
    throw std::invalid_argument("sic_quantize_feedback: W row count must match U");
  if (spacings.size() != n)
    throw std::invalid_argument("sic_quantize_feedback: spacing count must match U");

  // Noise-shaping form: v_i = w_i + sum_{k>i} B_ik (w_k - what_k) with
  // B = diag(U)^-1 U - I, then what_i = alpha_i round(v_i / alpha_i).
  SicResult res;
  res.w_hat = Matrix(n, w.cols());
  res.indices = Matrix(n, w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) {
    std::vector<double> err(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
      double v = w(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k)
        v += u(ii, k) / u(ii, ii) * err[k];
      double z = round_even(v / spacings[ii]);
      res.indices(ii, j) = z;
      double what = spacings[ii] * z;
      res.w_hat(ii, j) = what;
      err[ii] = w(ii, j) - what;
    }
  }
  return res;
}

double sic_predicted_wmse(const Matrix& u, std::span<const double> spacings) {
  check_square_upper(u);
  if (spacings.size() != u.rows())
    throw std::invalid_argument("sic_predicted_wmse: spacing count must match U");
  double s = 0.0;
  for (std::size_t i = 0; i < u.rows(); ++i) {
    double step = spacings[i] * u(i, i);
    s += step * step;
  }
  return s / (12.0 * static_cast<double>(u.rows()));
}

double alpha_for_rate(double rate, double sigma_w2) {
  if (rate < 0.0) throw std::invalid_argument("alpha_for_rate: negative rate");
  constexpr double kTwoPiE = 2.0 * 3.14159265358979323846 * 2.71828182845904523536;
  return std::sqrt(kTwoPiE * sigma_w2 * std::exp2(-2.0 * rate));
}

double weighted_mse(const Matrix& w, const Matrix& w_hat, const Matrix& u) {
  Matrix e = u * (w - w_hat);
  double f = e.frobenius_norm();
  return f * f / (static_cast<double>(w.rows()) * static_cast<double>(w.cols()));
}

double rect_rate(const Matrix& indices) {
  double sum = 0.0;
  for (std::size_t i = 0; i < indices.rows(); ++i) {
    double q = norm_inf(indices.row(i));
    sum += std::log2(1.0 + 2.0 * q);
  }
  return sum / static_cast<double>(indices.rows());
}

double entropy_rate(const Matrix& indices) {
  double total = 0.0;
  double nsamp = static_cast<double>(indices.cols());
  for (std::size_t i = 0; i < indices.rows(); ++i) {
    std::map<long long, std::size_t> counts;
    for (double v : indices.row(i))
      ++counts[static_cast<long long>(v)];
    double h = 0.0;
    for (const auto& [sym, c] : counts) {
      double p = static_cast<double>(c) / nsamp;
      h -= p * std::log2(p);
    }
    // Miller-Madow correction for the plugin estimator's downward bias.
    // The support is taken as the contiguous index range rather than the
    // observed symbol count: the per-row index distributions are unimodal,
    // so every value in [min, max] carries mass, and the observed count
    // undercounts the support badly when samples are scarce.
    long long lo = counts.begin()->first;
    long long hi = counts.rbegin()->first;
    h += static_cast<double>(hi - lo) / (2.0 * nsamp * std::log(2.0));
    total += h;
  }
  return total / static_cast<double>(indices.rows());
}

}  // namespace qmm
