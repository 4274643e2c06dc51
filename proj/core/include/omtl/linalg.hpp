#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace omtl {

/// Positive-definiteness floor shared by every SPD check.
inline constexpr double kSpdFloor = 1e-10;

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm(const Matrix& m);
bool all_finite(const Matrix& m);

/// Square matrix whose entries satisfy m(i,j) == m(j,i) within 1e-12.
class SymMatrix {
 public:
  /// Validates shape and symmetry; throws InvalidMatrix otherwise.
  explicit SymMatrix(Matrix m);

  static SymMatrix identity(std::size_t k);
  static SymMatrix zero(std::size_t k);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix diagonal(std::initializer_list<double> diag);

  std::size_t order() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  bool operator==(const SymMatrix&) const = default;

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  friend SymMatrix symmetrize(const Matrix& m);

  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);
double trace(const SymMatrix& m);

/// d rows by K columns; column j holds task j's weight vector.
/// Stored column-major so each task's weights are contiguous.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t dim, std::size_t tasks) : dim_(dim), tasks_(tasks), data_(dim * tasks, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t tasks() const noexcept { return tasks_; }

  std::span<double> column(std::size_t j) { return {data_.data() + j * dim_, dim_}; }
  std::span<const double> column(std::size_t j) const { return {data_.data() + j * dim_, dim_}; }

  double& operator()(std::size_t row, std::size_t task) { return data_[task * dim_ + row]; }
  double operator()(std::size_t row, std::size_t task) const { return data_[task * dim_ + row]; }

  /// Compound (task-major) vector: task 0's d entries, then task 1's, ...
  std::span<const double> compound() const noexcept { return data_; }

  bool operator==(const WeightMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::size_t tasks_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column i pairs with eigenvalues[i]
};

/// Cyclic Jacobi eigensolver. Throws InvalidMatrix on non-finite input.
EigenDecomposition eig_sym(const SymMatrix& m);

/// V f(lambda) V^T, symmetrized.
SymMatrix spectral_apply(const EigenDecomposition& eig, const std::function<double(double)>& f);

double min_eigenvalue(const SymMatrix& m);

SymMatrix spd_inverse(const SymMatrix& m);
/// Eigenvalues in (-kSpdFloor, 0) are clamped to zero.
SymMatrix spd_sqrt(const SymMatrix& m);
SymMatrix sym_exp(const SymMatrix& m);
SymMatrix spd_log(const SymMatrix& m);

/// (m + m^T) / 2. Throws InvalidMatrix for non-square or non-finite input.
SymMatrix symmetrize(const Matrix& m);

/// W^T W: entry (i, j) is dot(w_i, w_j).
SymMatrix column_gram(const WeightMatrix& w);

/// Sample covariance (divisor d - 1) of the K columns over the d rows, plus
/// ridge * I. Throws InsufficientRows when d < 2.
SymMatrix column_covariance(const WeightMatrix& w, double ridge);

}  // namespace omtl
