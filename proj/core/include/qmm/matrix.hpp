#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qmm {

/// Dense real-valued matrix, row-major, 64-bit entries.
/// Columns are the unit of quantization throughout (an n x a matrix holds
/// a column vectors of dimension n).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::size_t rows, std::size_t cols,
                          std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double> col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix scaled(double s) const;

  double frobenius_norm() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);       // Euclidean norm
double norm2_sq(std::span<const double> v);    // compensated sum of squares
double norm_inf(std::span<const double> v);

std::vector<double> mat_vec(const Matrix& m, std::span<const double> v);

}  // namespace qmm
