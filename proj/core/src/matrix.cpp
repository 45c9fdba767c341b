#include "pading/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pading {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionError("Matrix: ragged initializer rows");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::full(std::size_t rows, std::size_t cols, double value) {
  Matrix m(rows, cols);
  m.fill(value);
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_row(std::span<const double> row) {
  return Matrix(1, row.size(), std::vector<double>(row.begin(), row.end()));
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_str() +
                         " vs " + b.shape_str());
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ, " + a.shape_str() +
                         " x " + b.shape_str());
  }
  Matrix out(a.rows(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* out_row = out.row(i).data();
    const double* a_row = a.row(i).data();
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a_row[p];
      if (av == 0.0) continue;
      const double* b_row = b.row(p).data();
      for (std::size_t j = 0; j < m; ++j) out_row[j] += av * b_row[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "add");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) += b.at(i);
  return out;
}

Matrix sub(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "sub");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) -= b.at(i);
  return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "hadamard");
  Matrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= b.at(i);
  return out;
}

Matrix scale(const Matrix& m, double s) {
  Matrix out = m;
  for (std::size_t i = 0; i < out.size(); ++i) out.at(i) *= s;
  return out;
}

Matrix softmax_rows(const Matrix& m, double temperature) {
  if (!(temperature > 0.0)) {
    throw ParameterError("softmax_rows: temperature must be > 0, got " +
                         std::to_string(temperature));
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto in = m.row(i);
    auto o = out.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : in) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp((in[j] - mx) / temperature);
      sum += o[j];
    }
    for (std::size_t j = 0; j < in.size(); ++j) o[j] /= sum;
  }
  return out;
}

Matrix l2_normalize_rows(const Matrix& m, std::size_t* zero_row_count) {
  Matrix out = m;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = out.row(i);
    double sq = 0.0;
    for (double v : r) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm == 0.0) {
      ++zeros;
      continue;
    }
    for (double& v : r) v /= norm;
  }
  if (zero_row_count) *zero_row_count = zeros;
  return out;
}

double frobenius_norm(const Matrix& m) {
  double sq = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) sq += m.at(i) * m.at(i);
  return std::sqrt(sq);
}

double row_dot(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb) {
  if (a.cols() != b.cols()) {
    throw DimensionError("row_dot: width mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  const auto x = a.row(ra);
  const auto y = b.row(rb);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += x[j] * y[j];
  return s;
}

double row_sqdist(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb) {
  if (a.cols() != b.cols()) {
    throw DimensionError("row_sqdist: width mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  const auto x = a.row(ra);
  const auto y = b.row(rb);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - y[j];
    s += d * d;
  }
  return s;
}

Matrix cosine_matrix(const Matrix& m, double epsilon_norm) {
  std::vector<double> norms(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    norms[i] = std::sqrt(row_sqdist(m, i, Matrix::zeros(1, m.cols()), 0));
    if (norms[i] < epsilon_norm) {
      throw DegenerateInputError("cosine_matrix: row " + std::to_string(i) +
                                 " has near-zero norm " + std::to_string(norms[i]));
    }
  }
  Matrix out(m.rows(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double c = row_dot(m, i, m, j) / (norms[i] * norms[j]);
      c = std::clamp(c, -1.0, 1.0);
      out(i, j) = c;
      out(j, i) = c;
    }
  }
  return out;
}

}  // namespace pading
