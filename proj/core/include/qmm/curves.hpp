#pragma once

#include <span>
#include <vector>

namespace qmm {

/// Reverse-waterfilling rate-distortion point at water level tau for a
/// source with eigenvalues lambda, weighted by sigma_w2 (activation second
/// moment), distortion averaged over n.
struct RatePoint {
  double rate;        // bits per entry
  double distortion;  // weighted MSE per entry
};

RatePoint waterfill_point(std::span<const double> lambda, double tau,
                          double sigma_w2 = 1.0);

/// Solve for the water level achieving a target rate (bits/entry) by
/// bisection, then return the distortion-rate point.
RatePoint waterfill_at_rate(std::span<const double> lambda, double rate,
                            double sigma_w2 = 1.0);

/// Full waterfilling solution: water level, distortion, and per-coordinate
/// rates (1/2) log2 max(1, lambda_i/tau) in the input's eigenvalue order.
struct WaterfillSolution {
  double tau;
  double rate;
  double distortion;
  std::vector<double> per_coord_rates;
};
WaterfillSolution waterfill(std::span<const double> lambda, double rate,
                            double sigma_w2 = 1.0);

/// High-rate limit of the waterfilling curve:
/// D = (prod lambda)^(1/n) sigma_w2 2^(-2R).
double waterfill_high_rate(std::span<const double> lambda, double rate,
                           double sigma_w2 = 1.0);

/// Isotropic (spectrum-blind) quantizer distortion:
/// D = 2^(-2R) sigma_w2 tr(sigma)/n.
double d_isotropic(std::span<const double> lambda, double rate,
                   double sigma_w2 = 1.0);

/// Rotate-and-compress parametric curve at level tau:
/// D = (tau sigma_w2 / n) sum lambda_i/(tau+lambda_i),
/// R = (1/2n) sum log2(1 + lambda_i/tau).
RatePoint rotate_compress_point(std::span<const double> lambda, double tau,
                                double sigma_w2 = 1.0);
RatePoint rotate_compress_at_rate(std::span<const double> lambda, double rate,
                                  double sigma_w2 = 1.0);

/// Best correlation coefficient Gamma(R) between a Gaussian and its rate-R
/// quantized representation under the side-channel scheme: linear in R up to
/// R* = 0.906, then 2*2^(-2R) - 2^(-4R).
double gamma_curve(double rate);
/// The unrestricted lower envelope (2*2^(2R)-1)/(2^(2R)-1)^2 scaled form,
/// expressed as the distortion factor matching gamma_curve's units.
double gamma_fundamental(double rate);

/// Dimension-n sphere-packing lower bound on the normalized second moment of
/// any unit-covolume quantizer cell; 1/12 at n=1, tends to 1/(2 pi e).
double zador_nsm_lower_bound(std::size_t n);

/// High-dimensional limit of the bound, 1/(2 pi e).
double zador_nsm_limit();

}  // namespace qmm
