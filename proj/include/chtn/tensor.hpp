#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace chtn {

// Dense row-major matrix of doubles. A batch of samples is stored one sample
// per row.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix row_vector(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

// a * b.
Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T. Used for affine forward passes with (out x in) weights.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a^T * b. Used for weight gradients.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// Adds `bias` to every row of `x`.
void add_row_vector(Matrix& x, std::span<const double> bias);
// Column sums as a length-cols vector.
std::vector<double> column_sums(const Matrix& x);

// Selects rows by index, in the given order.
Matrix gather_rows(const Matrix& x, std::span<const std::size_t> indices);
// Stacks a on top of b. Column counts must agree.
Matrix vstack(const Matrix& a, const Matrix& b);

Matrix relu(const Matrix& x);
// Passes `upstream` where x > 0, zero elsewhere.
Matrix relu_backward(const Matrix& x, const Matrix& upstream);

// Max-subtracted log-softmax of a single logit vector.
std::vector<double> log_softmax(std::span<const double> logits);
// Row-wise log-softmax / softmax.
Matrix log_softmax_rows(const Matrix& logits);
Matrix softmax_rows(const Matrix& logits);

double dot(std::span<const double> u, std::span<const double> v);
double squared_distance(std::span<const double> u, std::span<const double> v);
// Throws DegenerateInput when either vector has zero norm.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

double max_abs(const Matrix& x);

}  // namespace chtn
