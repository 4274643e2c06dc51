#include "omtl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "omtl/error.hpp"
#include "omtl/log.hpp"

namespace omtl {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kJacobiTolerance = 1e-12;
constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiRelative = 1e-16;
constexpr double kJacobiFloor = 1e-300;

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::InvalidMatrix, "shape mismatch " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                              "x" + std::to_string(b.cols()));
  }
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::InvalidMatrix, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::InvalidMatrix, "inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

double frobenius_norm(const Matrix& m) {
  const auto d = m.data();
  return std::sqrt(std::inner_product(d.begin(), d.end(), d.begin(), 0.0));
}

bool all_finite(const Matrix& m) {
  const auto d = m.data();
  return std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); });
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  if (!m_.square() || m_.rows() == 0) throw Error(ErrorCode::InvalidMatrix, "symmetric matrix must be square, order >= 1");
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = i + 1; j < m_.cols(); ++j)
      if (!(std::abs(m_(i, j) - m_(j, i)) <= kSymmetryTolerance) && std::isfinite(m_(i, j)) && std::isfinite(m_(j, i)))
        throw Error(ErrorCode::InvalidMatrix,
                    "asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

SymMatrix SymMatrix::identity(std::size_t k) { return SymMatrix(Matrix::identity(k), Trusted{}); }

SymMatrix SymMatrix::zero(std::size_t k) { return SymMatrix(Matrix(k, k), Trusted{}); }

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return SymMatrix(std::move(m));
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) { return symmetrize(a.matrix() + b.matrix()); }
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) { return symmetrize(a.matrix() - b.matrix()); }
SymMatrix operator*(double s, const SymMatrix& a) { return symmetrize(s * a.matrix()); }

double trace(const SymMatrix& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.order(); ++i) t += m(i, i);
  return t;
}

EigenDecomposition eig_sym(const SymMatrix& m) {
  if (!all_finite(m.matrix())) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
  const std::size_t n = m.order();
  Matrix a = m.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = std::max(1.0, frobenius_norm(a));
  const double tol = kJacobiTolerance * scale;
  const double floor = kJacobiFloor * scale;

  // A rotation is skipped once a_pq is negligible next to sqrt(|a_pp a_qq|).
  // That keeps small eigenvalues of SPD input accurate to relative precision,
  // which the Frobenius bound alone does not.
  bool rotated = true;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && rotated; ++sweep) {
    rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double small = std::max(floor, kJacobiRelative * std::sqrt(std::abs(a(p, p) * a(q, q))));
        if (std::abs(apq) <= small) {
          if (std::abs(apq) < tol) {
            a(p, q) = 0.0;
            a(q, p) = 0.0;
          }
          continue;
        }
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  if (off_diagonal_norm(a) >= tol) log::warn("eig_sym: Jacobi stopped after " + std::to_string(kMaxJacobiSweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
  }
  return out;
}

SymMatrix spectral_apply(const EigenDecomposition& eig, const std::function<double(double)>& f) {
  const std::size_t n = eig.eigenvalues.size();
  Matrix r(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(eig.eigenvalues[k]);
    for (std::size_t i = 0; i < n; ++i) {
      const double vik = fk * eig.eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * eig.eigenvectors(j, k);
    }
  }
  return symmetrize(r);
}

double min_eigenvalue(const SymMatrix& m) { return eig_sym(m).eigenvalues.front(); }

SymMatrix spd_inverse(const SymMatrix& m) {
  const auto eig = eig_sym(m);
  if (eig.eigenvalues.front() <= kSpdFloor)
    throw Error(ErrorCode::NotPositiveDefinite, "min eigenvalue " + std::to_string(eig.eigenvalues.front()));
  return spectral_apply(eig, [](double l) { return 1.0 / l; });
}

SymMatrix spd_sqrt(const SymMatrix& m) {
  const auto eig = eig_sym(m);
  if (eig.eigenvalues.front() < -kSpdFloor)
    throw Error(ErrorCode::NotPositiveSemidefinite, "min eigenvalue " + std::to_string(eig.eigenvalues.front()));
  return spectral_apply(eig, [](double l) { return std::sqrt(std::max(l, 0.0)); });
}

SymMatrix sym_exp(const SymMatrix& m) {
  return spectral_apply(eig_sym(m), [](double l) { return std::exp(l); });
}

SymMatrix spd_log(const SymMatrix& m) {
  const auto eig = eig_sym(m);
  if (eig.eigenvalues.front() <= kSpdFloor)
    throw Error(ErrorCode::NotPositiveDefinite, "log of matrix with min eigenvalue " +
                                                    std::to_string(eig.eigenvalues.front()));
  return spectral_apply(eig, [](double l) { return std::log(l); });
}

SymMatrix symmetrize(const Matrix& m) {
  if (!m.square() || m.rows() == 0) throw Error(ErrorCode::InvalidMatrix, "symmetrize needs a non-empty square matrix");
  if (!all_finite(m)) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
  Matrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    r(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      r(i, j) = avg;
      r(j, i) = avg;
    }
  }
  return SymMatrix(std::move(r), SymMatrix::Trusted{});
}

SymMatrix column_gram(const WeightMatrix& w) {
  const std::size_t k = w.tasks();
  Matrix g(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto wi = w.column(i);
    for (std::size_t j = i; j < k; ++j) {
      const auto wj = w.column(j);
      const double dot = std::inner_product(wi.begin(), wi.end(), wj.begin(), 0.0);
      g(i, j) = dot;
      g(j, i) = dot;
    }
  }
  return SymMatrix(std::move(g));
}

SymMatrix column_covariance(const WeightMatrix& w, double ridge) {
  const std::size_t d = w.dim();
  const std::size_t k = w.tasks();
  if (d < 2) throw Error(ErrorCode::InsufficientRows, "covariance needs at least 2 rows, got " + std::to_string(d));

  std::vector<double> mean(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = w.column(j);
    mean[j] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(d);
  }
  Matrix c(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto wi = w.column(i);
    for (std::size_t j = i; j < k; ++j) {
      const auto wj = w.column(j);
      double sum = 0.0;
      for (std::size_t r = 0; r < d; ++r) sum += (wi[r] - mean[i]) * (wj[r] - mean[j]);
      const double cov = sum / static_cast<double>(d - 1);
      c(i, j) = cov;
      c(j, i) = cov;
    }
    c(i, i) += ridge;
  }
  return SymMatrix(std::move(c));
}

}  // namespace omtl
