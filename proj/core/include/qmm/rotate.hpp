#pragma once

#include <span>
#include <vector>

#include "qmm/matrix.hpp"
#include "qmm/rng.hpp"

namespace qmm {

bool is_power_of_two(std::size_t n);

/// Randomized Hadamard rotation (1/sqrt(n)) * H_n * diag(signs) * v.
/// Requires n to be a power of two; non-power-of-two lengths are rejected
/// rather than padded, since padding changes inner products.
std::vector<double> hadamard_rotate(std::span<const double> v,
                                    std::span<const double> signs);

/// Inverse of hadamard_rotate for the same sign vector.
std::vector<double> hadamard_unrotate(std::span<const double> v,
                                      std::span<const double> signs);

/// iid +-1 sign vector for the randomized Hadamard transform.
std::vector<double> random_signs(std::size_t n, Rng& rng);

/// Applies hadamard_rotate to every column of m (m is rows x cols, columns
/// are the vectors being rotated).
Matrix hadamard_rotate_cols(const Matrix& m, std::span<const double> signs);

/// Haar-distributed orthogonal matrix (QR of an iid Gaussian matrix with
/// sign-fixed diagonal).
Matrix random_orthogonal(std::size_t n, Rng& rng);

}  // namespace qmm
