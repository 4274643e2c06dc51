#pragma once

// Test-only reference implementations. Nothing here calls into the
// library's numerical paths; each routine is a separate, textbook route to
// the value it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

inline Dense multiply(const Dense& a, const Dense& b) {
  Dense c = zeros(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Gauss-Jordan with partial pivoting.
inline Dense gauss_jordan_inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) throw std::runtime_error("singular");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// Explicit Kd x Kd matrix A (x) I_d.
inline Dense kronecker_with_identity(const Dense& a, std::size_t d) {
  const std::size_t k = a.size();
  Dense out = zeros(k * d, k * d);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t r = 0; r < d; ++r) out[i * d + r][j * d + r] = a[i][j];
  return out;
}

// Compound-vector multitask perceptron: w <- w + y (A (x) I_d)^-1 Phi_t on
// mistakes, A held fixed.
struct CompoundPerceptron {
  std::size_t k, d;
  Dense kron_inverse;
  std::vector<double> w;
  CompoundPerceptron(const Dense& a, std::size_t d_)
      : k(a.size()), d(d_), kron_inverse(gauss_jordan_inverse(kronecker_with_identity(a, d_))), w(k * d_, 0.0) {}

  void set_interaction(const Dense& a) { kron_inverse = gauss_jordan_inverse(kronecker_with_identity(a, d)); }

  double margin(std::size_t task, const std::vector<double>& x) const {
    double m = 0.0;
    for (std::size_t r = 0; r < d; ++r) m += w[task * d + r] * x[r];
    return m;
  }

  int predict(std::size_t task, const std::vector<double>& x) const { return margin(task, x) >= 0.0 ? 1 : -1; }

  // Margin within rounding of zero, i.e. a tie (sign(0) = +1) in exact
  // arithmetic that floating point may resolve either way.
  bool tied(std::size_t task, const std::vector<double>& x, double rel = 1e-12) const {
    // Weights can cancel back to ~0 entirely, so the scale also covers one update.
    double wmax = 0.0, xsum = 0.0;
    for (double v : w) wmax = std::max(wmax, std::abs(v));
    for (const auto& row : kron_inverse)
      for (double v : row) wmax = std::max(wmax, std::abs(v));
    for (double v : x) xsum += std::abs(v);
    return std::abs(margin(task, x)) <= rel * wmax * xsum;
  }

  void update(std::size_t task, const std::vector<double>& x, int y) {
    std::vector<double> phi(k * d, 0.0);
    for (std::size_t r = 0; r < d; ++r) phi[task * d + r] = x[r];
    for (std::size_t i = 0; i < k * d; ++i) {
      double delta = 0.0;
      for (std::size_t j = 0; j < k * d; ++j) delta += kron_inverse[i][j] * phi[j];
      w[i] += y * delta;
    }
  }

  bool step(std::size_t task, const std::vector<double>& x, int y) {
    if (predict(task, x) == y) return false;
    update(task, x, y);
    return true;
  }
};

// Textbook single-task perceptron with unit step, sign(0) = +1.
struct Perceptron {
  std::vector<double> w;
  explicit Perceptron(std::size_t d) : w(d, 0.0) {}
  bool step(const std::vector<double>& x, int y) {
    double m = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * x[i];
    const int pred = m >= 0.0 ? 1 : -1;
    if (pred == y) return false;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += y * x[i];
    return true;
  }
};

// One-sided periodogram |X_k|^2 / (fs * N) by direct DFT, doubled off the edges.
inline std::vector<double> direct_periodogram(const std::vector<double>& x, double fs) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n));
    p[k] = std::norm(acc) / (fs * static_cast<double>(n));
    if (k != 0 && k != n / 2) p[k] *= 2.0;
  }
  return p;
}

// Fisher-Yates exactly as documented for omtl::permute, written from the
// description: i = n-1..1, j = u mod (i+1) after rejecting u < 2^64 mod (i+1).
inline std::vector<std::size_t> reference_permutation(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::mt19937_64 gen(mix(seed ^ mix(index)));
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  for (std::size_t i = n - 1; n > 1 && i >= 1; --i) {
    const std::uint64_t range = i + 1;
    const std::uint64_t reject_below = (~std::uint64_t{0} - range + 1) % range;
    std::uint64_t u;
    do {
      u = gen();
    } while (u < reject_below);
    std::swap(v[i], v[u % range]);
  }
  return v;
}

}  // namespace oracle
