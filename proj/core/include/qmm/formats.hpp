#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"

namespace qmm {

/// INT-M constellation: Z intersected with [-2^(M-1), 2^(M-1)] (symmetric,
/// one-point extended).
struct IntFormat {
  int bits;  // M >= 2
  double max_code() const;
  bool contains(double code) const;
};

/// Floating-point constellation with exponent_bits / mantissa_bits and bias
/// 2^(E-1)-1. Subnormals, NaN and Inf are excluded: underflow maps to 0,
/// overflow clamps to +-max_value().
struct FpFormat {
  int exponent_bits;  // >= 2
  int mantissa_bits;  // >= 0
  int bias() const { return (1 << (exponent_bits - 1)) - 1; }
  double max_value() const;
  double min_normal() const;
  bool contains(double v) const;
  std::string name() const;  // e.g. "E4M3"
};

inline FpFormat e4m3() { return FpFormat{4, 3}; }

/// Output of every per-vector quantizer: codes in the declared constellation
/// plus scale metadata. reconstruct() is scale * block_scale * code per entry.
struct QuantizedVector {
  std::vector<double> codes;         // constellation points, pre-scale
  double scale = 1.0;                // gamma
  std::vector<double> block_scales;  // per block, empty if unused
  std::size_t block_size = 0;        // 0 when block_scales unused
  std::string format;                // tag, e.g. "int8", "e4m3", "nvfp4"
  double rate_bits = 0.0;            // declared bits/entry incl. scales

  std::size_t size() const { return codes.size(); }
  double value(std::size_t i) const {
    double s = scale;
    if (block_size) s *= block_scales[i / block_size];
    return s * codes[i];
  }
  std::vector<double> reconstruct() const;
};

/// absmax INT: gamma = 2^-(M-1) * ||x||_inf, codes = round(x/gamma).
QuantizedVector absmax_int_quantize(std::span<const double> x, IntFormat fmt);

/// Nearest constellation point under the exponent/mantissa rounding
/// procedure; 0 on underflow, +-max on overflow.
double fp_quantize_scalar(double z, const FpFormat& fmt);

/// Dithered absmax FP: gamma = 2^U * 2^-(Emax-) * ||x||_inf with
/// U ~ Uniform[0,1). Passing dither=1.0 gives plain absmax FP.
QuantizedVector dithered_absmax_fp_quantize(std::span<const double> x,
                                            const FpFormat& fmt, Rng& rng);
QuantizedVector absmax_fp_quantize(std::span<const double> x,
                                   const FpFormat& fmt);

enum class NvBase { Int4, Fp4 };

/// NV-style block-16 microscaling: each block gets an E4M3 scale, entries are
/// quantized to INT4 or to the FP4 constellation {0,+-1/2,..,+-6}.
/// Declared rate is 4 + 8/16 = 4.5 bits/entry.
/// By default the scale is the smallest E4M3 value keeping the scaled block
/// inside the constellation (no overload); nearest=true picks the E4M3 scale
/// landing the block absmax closest to 7 (INT4) or 6 (FP4) instead.
QuantizedVector nv_microscale_quantize(std::span<const double> x, NvBase base,
                                       bool nearest = false);

/// FP4 constellation used by nv_microscale_quantize.
std::span<const double> fp4_constellation();
double nearest_fp4(double z);

/// gamma_x * gamma_y * <codes_x, codes_y>, block scales applied per entry.
double quantized_inner_product(const QuantizedVector& qx,
                               const QuantizedVector& qy);

// Inner-product error normalizers and effective-rate formulas.
double delta_int(std::span<const double> x, std::span<const double> y);
double delta_fp(std::span<const double> x, std::span<const double> y);

double c_fp();  // E[2^-2U], U ~ Uniform[0,1), equals (3/4)/(2 ln 2)
double r_eff_int(int bits, std::size_t n);
double r_eff_fp(int mantissa_bits);

}  // namespace qmm
