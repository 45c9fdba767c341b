#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "pading/error.hpp"

namespace pading {

// Dense row-major matrix of doubles. The universal numeric carrier of the
// library: features, parameters, similarity matrices are all Matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix full(std::size_t rows, std::size_t cols, double value);
  static Matrix identity(std::size_t n);
  static Matrix from_row(std::span<const double> row);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& at(std::size_t flat) { return data_[flat]; }
  double at(std::size_t flat) const { return data_[flat]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double value);
  bool all_finite() const;
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Matrix& other) const = default;

  // Shape string "RxC" for error messages.
  std::string shape_str() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// --- arithmetic -------------------------------------------------------------

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& m, double s);

// Row-wise softmax at the given temperature (> 0), stabilized by per-row
// max subtraction. Every output row is nonnegative and sums to 1.
Matrix softmax_rows(const Matrix& m, double temperature = 1.0);

// Scales every row to unit Euclidean norm. Zero rows are returned unchanged;
// if zero_row_count is non-null it receives how many such rows were seen.
Matrix l2_normalize_rows(const Matrix& m, std::size_t* zero_row_count = nullptr);

double frobenius_norm(const Matrix& m);
double row_dot(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb);
double row_sqdist(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb);

// Cosine similarity matrix of the rows of m. Symmetric, unit diagonal,
// entries clamped to [-1, 1]. Rows with norm < epsilon_norm are rejected
// with a DegenerateInputError naming the row.
Matrix cosine_matrix(const Matrix& m, double epsilon_norm = 1e-12);

void check_same_shape(const Matrix& a, const Matrix& b, const char* op);

}  // namespace pading
