#include "qmm/curves.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmm {
namespace {

void check_lambda(std::span<const double> lambda) {
  if (lambda.empty())
    throw std::invalid_argument("rate curves: empty spectrum");
  for (double l : lambda)
    if (!(l > 0.0))
      throw std::invalid_argument("rate curves: eigenvalues must be positive");
}

}  // namespace

RatePoint waterfill_point(std::span<const double> lambda, double tau,
                          double sigma_w2) {
  check_lambda(lambda);
  if (!(tau > 0.0))
    throw std::invalid_argument("waterfill_point: tau must be positive");
  double n = static_cast<double>(lambda.size());
  double d = 0.0, r = 0.0;
  for (double l : lambda) {
    d += std::min(l, tau);
    if (l > tau) r += 0.5 * std::log2(l / tau);
  }
  return {r / n, sigma_w2 * d / n};
}

RatePoint waterfill_at_rate(std::span<const double> lambda, double rate,
                            double sigma_w2) {
  check_lambda(lambda);
  if (rate < 0.0)
    throw std::invalid_argument("waterfill_at_rate: negative rate");
  double hi = *std::max_element(lambda.begin(), lambda.end());
  if (rate == 0.0) return waterfill_point(lambda, hi, sigma_w2);
  double lo = hi;
  while (waterfill_point(lambda, lo, 1.0).rate < rate) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (waterfill_point(lambda, mid, 1.0).rate >= rate)
      lo = mid;
    else
      hi = mid;
  }
  return waterfill_point(lambda, 0.5 * (lo + hi), sigma_w2);
}

WaterfillSolution waterfill(std::span<const double> lambda, double rate,
                            double sigma_w2) {
  check_lambda(lambda);
  if (rate < 0.0) throw std::invalid_argument("waterfill: negative rate");
  double hi = *std::max_element(lambda.begin(), lambda.end());
  double lo = hi;
  if (rate > 0.0) {
    while (waterfill_point(lambda, lo, 1.0).rate < rate) lo *= 0.5;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (waterfill_point(lambda, mid, 1.0).rate >= rate)
        lo = mid;
      else
        hi = mid;
    }
  }
  WaterfillSolution sol;
  sol.tau = rate > 0.0 ? 0.5 * (lo + hi) : hi;
  RatePoint p = waterfill_point(lambda, sol.tau, sigma_w2);
  sol.rate = p.rate;
  sol.distortion = p.distortion;
  sol.per_coord_rates.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    sol.per_coord_rates[i] =
        lambda[i] > sol.tau ? 0.5 * std::log2(lambda[i] / sol.tau) : 0.0;
  return sol;
}

double waterfill_high_rate(std::span<const double> lambda, double rate,
                           double sigma_w2) {
  check_lambda(lambda);
  double logdet = 0.0;
  for (double l : lambda) logdet += std::log2(l);
  double n = static_cast<double>(lambda.size());
  return std::exp2(logdet / n - 2.0 * rate) * sigma_w2;
}

double d_isotropic(std::span<const double> lambda, double rate,
                   double sigma_w2) {
  check_lambda(lambda);
  double tr = 0.0;
  for (double l : lambda) tr += l;
  return std::exp2(-2.0 * rate) * sigma_w2 * tr /
         static_cast<double>(lambda.size());
}

RatePoint rotate_compress_point(std::span<const double> lambda, double tau,
                                double sigma_w2) {
  check_lambda(lambda);
  if (!(tau > 0.0))
    throw std::invalid_argument("rotate_compress_point: tau must be positive");
  double n = static_cast<double>(lambda.size());
  double d = 0.0, r = 0.0;
  for (double l : lambda) {
    d += l / (tau + l);
    r += 0.5 * std::log2(1.0 + l / tau);
  }
  return {r / n, tau * sigma_w2 * d / n};
}

RatePoint rotate_compress_at_rate(std::span<const double> lambda, double rate,
                                  double sigma_w2) {
  check_lambda(lambda);
  if (!(rate > 0.0))
    throw std::invalid_argument("rotate_compress_at_rate: rate must be positive");
  double lo = *std::max_element(lambda.begin(), lambda.end());
  while (rotate_compress_point(lambda, lo, 1.0).rate < rate) lo *= 0.5;
  double hi = lo;
  while (rotate_compress_point(lambda, hi, 1.0).rate > rate) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (rotate_compress_point(lambda, mid, 1.0).rate >= rate)
      lo = mid;
    else
      hi = mid;
  }
  return rotate_compress_point(lambda, 0.5 * (lo + hi), sigma_w2);
}

namespace {
constexpr double kGammaKnee = 0.906;
}

double gamma_curve(double rate) {
  if (rate < 0.0) throw std::invalid_argument("gamma_curve: negative rate");
  auto high = [](double r) {
    double t = std::exp2(-2.0 * r);
    return 2.0 * t - t * t;
  };
  if (rate >= kGammaKnee) return high(rate);
  // time-sharing with the zero-rate point below the knee
  return 1.0 - (1.0 - high(kGammaKnee)) * rate / kGammaKnee;
}

double gamma_fundamental(double rate) {
  if (rate <= 0.0)
    throw std::invalid_argument("gamma_fundamental: rate must be positive");
  double t = std::exp2(2.0 * rate);
  return (2.0 * t - 1.0) / ((t - 1.0) * (t - 1.0));
}

double zador_nsm_lower_bound(std::size_t n) {
  if (n == 0) throw std::invalid_argument("zador_nsm_lower_bound: n must be positive");
  double nd = static_cast<double>(n);
  // ball-volume bound: (Gamma(n/2+1))^(2/n) / ((n+2) pi)
  double lg = std::lgamma(nd / 2.0 + 1.0);
  return std::exp(2.0 * lg / nd) / ((nd + 2.0) * 3.14159265358979323846);
}

double zador_nsm_limit() {
  return 1.0 / (2.0 * 3.14159265358979323846 * 2.71828182845904523536);
}

}  // namespace qmm
