#include "qmm/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace qmm {

double round_even(double x) { return std::nearbyint(x); }

GridQuantization grid_quantize(std::span<const double> x, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("grid_quantize: eps must be positive");
  GridQuantization q;
  q.codes.resize(x.size());
  q.errors.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    q.codes[i] = static_cast<std::int64_t>(round_even(x[i] / eps));
    q.errors[i] = eps * static_cast<double>(q.codes[i]) - x[i];
  }
  return q;
}

double shrinkage_gamma(double second_moment, double eps) {
  if (second_moment < 0.0)
    throw std::invalid_argument("shrinkage_gamma: negative second moment");
  double d = eps * eps / 12.0;
  if (second_moment + d == 0.0) return 0.0;
  return second_moment / (second_moment + d);
}

}  // namespace qmm
