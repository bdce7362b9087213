#include "qmm/formats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qmm/grid.hpp"

namespace qmm {

double IntFormat::max_code() const {
  return std::ldexp(1.0, bits - 1);
}

bool IntFormat::contains(double code) const {
  return code == round_even(code) && std::fabs(code) <= max_code();
}

double FpFormat::max_value() const {
  int e_max = (1 << exponent_bits) - 2;
  return std::ldexp(2.0 - std::ldexp(1.0, -mantissa_bits), e_max - bias());
}

double FpFormat::min_normal() const { return std::ldexp(1.0, 1 - bias()); }

bool FpFormat::contains(double v) const {
  if (v == 0.0) return true;
  double a = std::fabs(v);
  int e = static_cast<int>(std::floor(std::log2(a)));
  int field = e + bias();
  if (field < 1 || field > (1 << exponent_bits) - 2) return false;
  double m = (a / std::ldexp(1.0, e) - 1.0) * std::ldexp(1.0, mantissa_bits);
  return m == round_even(m) && m >= 0.0 && m < std::ldexp(1.0, mantissa_bits);
}

std::string FpFormat::name() const {
  return "E" + std::to_string(exponent_bits) + "M" +
         std::to_string(mantissa_bits);
}

std::vector<double> QuantizedVector::reconstruct() const {
  std::vector<double> out(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) out[i] = value(i);
  return out;
}

QuantizedVector absmax_int_quantize(std::span<const double> x, IntFormat fmt) {
  if (fmt.bits < 2)
    throw std::invalid_argument("absmax_int_quantize: need at least 2 bits");
  QuantizedVector q;
  q.format = "int" + std::to_string(fmt.bits);
  q.rate_bits = fmt.bits;
  double amax = norm_inf(x);
  q.codes.assign(x.size(), 0.0);
  if (amax == 0.0) {
    q.scale = 0.0;
    return q;
  }
  q.scale = std::ldexp(amax, -(fmt.bits - 1));
  for (std::size_t i = 0; i < x.size(); ++i)
    q.codes[i] = round_even(x[i] / q.scale);
  return q;
}

double fp_quantize_scalar(double z, const FpFormat& fmt) {
  if (z == 0.0) return 0.0;
  double s = z < 0.0 ? -1.0 : 1.0;
  double a = std::fabs(z);
  int e = static_cast<int>(std::floor(std::log2(a)));
  double zbar = a / std::ldexp(1.0, e);  // in [1,2)
  double m = round_even(std::ldexp(zbar - 1.0, fmt.mantissa_bits));
  if (m == std::ldexp(1.0, fmt.mantissa_bits)) {
    m = 0.0;
    ++e;
  }
  int field = e + fmt.bias();
  if (field < 1) return 0.0;
  if (field > (1 << fmt.exponent_bits) - 2) return s * fmt.max_value();
  return s * std::ldexp(1.0 + std::ldexp(m, -fmt.mantissa_bits), e);
}

namespace {

QuantizedVector absmax_fp_with_dither(std::span<const double> x,
                                      const FpFormat& fmt, double u) {
  QuantizedVector q;
  q.format = fmt.name();
  q.rate_bits = 1 + fmt.exponent_bits + fmt.mantissa_bits;
  // Largest exponent-field value expressed relative to min_normal's field.
  int e_headroom = ((1 << fmt.exponent_bits) - 2) - (fmt.bias() - 1);
  double amax = norm_inf(x);
  q.codes.assign(x.size(), 0.0);
  if (amax == 0.0) {
    q.scale = 0.0;
    return q;
  }
  q.scale = amax * std::exp2(u - e_headroom);
  for (std::size_t i = 0; i < x.size(); ++i)
    q.codes[i] = fp_quantize_scalar(x[i] / q.scale, fmt);
  return q;
}

}  // namespace

QuantizedVector dithered_absmax_fp_quantize(std::span<const double> x,
                                            const FpFormat& fmt, Rng& rng) {
  return absmax_fp_with_dither(x, fmt, rng.next_double());
}

QuantizedVector absmax_fp_quantize(std::span<const double> x,
                                   const FpFormat& fmt) {
  return absmax_fp_with_dither(x, fmt, 1.0);
}

std::span<const double> fp4_constellation() {
  static const std::array<double, 15> pts = {-6.0, -4.0, -3.0, -2.0, -1.5,
                                             -1.0, -0.5, 0.0,  0.5,  1.0,
                                             1.5,  2.0,  3.0,  4.0,  6.0};
  return pts;
}

double nearest_fp4(double z) {
  auto pts = fp4_constellation();
  double best = pts[0];
  double best_d = std::fabs(z - best);
  for (double p : pts) {
    double d = std::fabs(z - p);
    // ties resolve toward even mantissa, i.e. the smaller magnitude point
    if (d < best_d || (d == best_d && std::fabs(p) < std::fabs(best))) {
      best = p;
      best_d = d;
    }
  }
  return best;
}

namespace {

// Positive E4M3 values, ascending, for block-scale selection.
const std::vector<double>& e4m3_positive_values() {
  static const std::vector<double> vals = [] {
    std::vector<double> v;
    FpFormat fmt = e4m3();
    for (int field = 1; field <= (1 << fmt.exponent_bits) - 2; ++field) {
      for (int m = 0; m < (1 << fmt.mantissa_bits); ++m) {
        v.push_back(std::ldexp(1.0 + std::ldexp(double(m), -fmt.mantissa_bits),
                               field - fmt.bias()));
      }
    }
    std::sort(v.begin(), v.end());
    return v;
  }();
  return vals;
}

}  // namespace

QuantizedVector nv_microscale_quantize(std::span<const double> x, NvBase base,
                                       bool nearest) {
  constexpr std::size_t kBlock = 16;
  QuantizedVector q;
  q.format = base == NvBase::Int4 ? "nvint4" : "nvfp4";
  q.rate_bits = 4.0 + 8.0 / static_cast<double>(kBlock);
  q.block_size = kBlock;
  q.scale = 1.0;
  q.codes.resize(x.size());
  double target = base == NvBase::Int4 ? 7.0 : 6.0;
  const auto& scales = e4m3_positive_values();
  std::size_t nblocks = (x.size() + kBlock - 1) / kBlock;
  q.block_scales.resize(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::size_t lo = b * kBlock;
    std::size_t hi = std::min(x.size(), lo + kBlock);
    double amax = norm_inf(x.subspan(lo, hi - lo));
    double s;
    if (amax == 0.0) {
      s = scales.front();
    } else if (nearest) {
      double raw = amax / target;
      s = scales.back();
      double best_d = std::fabs(raw - s);
      for (double c : scales) {
        double d = std::fabs(raw - c);
        if (d < best_d) {
          s = c;
          best_d = d;
        }
      }
    } else {
      double raw = amax / target;
      auto it = std::lower_bound(scales.begin(), scales.end(), raw);
      s = it == scales.end() ? scales.back() : *it;
    }
    q.block_scales[b] = s;
    for (std::size_t i = lo; i < hi; ++i) {
      double z = x[i] / s;
      if (base == NvBase::Int4) {
        double c = round_even(z);
        c = std::clamp(c, -8.0, 8.0);
        q.codes[i] = c;
      } else {
        q.codes[i] = nearest_fp4(z);
      }
    }
  }
  return q;
}

double quantized_inner_product(const QuantizedVector& qx,
                               const QuantizedVector& qy) {
  if (qx.size() != qy.size())
    throw std::invalid_argument("quantized_inner_product: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < qx.size(); ++i) sum += qx.value(i) * qy.value(i);
  return sum;
}

double delta_int(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("delta_int: length mismatch");
  double n = static_cast<double>(x.size());
  double nx = norm2_sq(x), ny = norm2_sq(y);
  if (nx == 0.0 || ny == 0.0)
    throw std::invalid_argument("delta_int: zero vector");
  double ix = norm_inf(x), iy = norm_inf(y);
  return 0.5 * (n * ix * ix / nx + n * iy * iy / ny);
}

double delta_fp(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("delta_fp: length mismatch");
  double n = static_cast<double>(x.size());
  double nx = norm2_sq(x), ny = norm2_sq(y);
  if (nx == 0.0 || ny == 0.0)
    throw std::invalid_argument("delta_fp: zero vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    sum += (x[i] * x[i] / nx) * (y[i] * y[i] / ny);
  return n * sum;
}

double c_fp() { return 0.75 / (2.0 * std::log(2.0)); }

double r_eff_int(int bits, std::size_t n) {
  return bits - 0.5 * std::log2(2.0 * std::log(static_cast<double>(n)) / 3.0);
}

double r_eff_fp(int mantissa_bits) {
  return mantissa_bits + 0.5 * std::log2(12.0 / c_fp());
}

}  // namespace qmm
