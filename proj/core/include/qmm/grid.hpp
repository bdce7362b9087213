#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qmm {

/// round-half-to-even, the tie rule used for every scalar round in the
/// library (assumes the default FE_TONEAREST mode).
double round_even(double x);

struct GridQuantization {
  std::vector<std::int64_t> codes;  // codes[i] = round(x[i]/eps)
  std::vector<double> errors;       // eps*codes[i] - x[i], in [-eps/2, eps/2]
};

/// Uniform eps-grid quantization x ~> eps*round(x/eps).
GridQuantization grid_quantize(std::span<const double> x, double eps);

/// Optimal linear shrinkage m/(m + eps^2/12) for second moment m and grid
/// spacing eps.
double shrinkage_gamma(double second_moment, double eps);

}  // namespace qmm
