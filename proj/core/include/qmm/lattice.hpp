#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"

namespace qmm {

/// Nearest point of Z^n (round-half-to-even per coordinate).
std::vector<double> nearest_int_lattice(std::span<const double> x);

/// Nearest point of E8 = D8 union (D8 + 1/2). Exact nearest neighbor via the
/// standard parity-fix decoder run on both cosets.
std::array<double, 8> nearest_e8(std::span<const double> x);

/// A lattice paired with its generator (columns generate the lattice) and an
/// exact nearest-neighbor map.
struct LatticeSpec {
  std::string name;
  Matrix generator;
  Matrix generator_inverse;
  std::function<std::vector<double>(std::span<const double>)> nearest;
  std::size_t dim() const { return generator.rows(); }
  double covolume() const;  // |det G|
};

LatticeSpec integer_lattice(std::size_t n);
LatticeSpec e8_lattice();

/// Monte-Carlo estimate of the normalized second moment: dither uniform over
/// the fundamental parallelepiped, fold to the Voronoi region via the
/// nearest-neighbor map, average ||e||^2 / dim, normalize by covolume^(2/d).
/// Z gives 1/12, E8 about 0.0717.
double nsm_estimate(const LatticeSpec& lattice, std::size_t samples, Rng& rng);

/// Voronoi code on a nested pair L / qL: indices live in (Z mod q)^d.
/// encode(x) = G^-1 Q_L(x) mod q; decode(v) = G v - q Q_L(G v / q).
/// decode(encode(x)) == Q_L(x) whenever Q_L(x) lies inside the Voronoi
/// region of qL (no overload).
struct VoronoiCode {
  LatticeSpec lattice;
  int q;
  std::vector<std::int64_t> encode(std::span<const double> x) const;
  std::vector<double> decode(std::span<const std::int64_t> v) const;
};

struct NestQuantResult {
  std::vector<std::vector<std::int64_t>> indices;  // per chunk, d ints in [0,q)
  std::vector<int> scale_index;                    // per chunk, in [0,K)
  std::vector<double> reconstruction;              // same length as input
  double rate_bits;                                // log2 q + log2(K)/d
};

/// Nested-lattice weight quantizer: split x into chunks of 8, pick the scale
/// from a geometric bank of K values minimizing chunk squared error after the
/// E8 Voronoi roundtrip, ties to the lowest index. n must be a multiple of 8.
NestQuantResult nestquant(std::span<const double> x, int q, int num_scales);

/// The geometric scale bank used by nestquant: K values whose largest keeps a
/// 6-sigma unit-variance chunk inside the granular region, ratio sqrt(2)
/// between neighbors.
std::vector<double> nestquant_scale_bank(int q, int num_scales);

}  // namespace qmm
