#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/jet.hpp"

namespace affsph {

/// Row-major dense matrix over double or Jet.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

inline constexpr double kPivotThreshold = 1e-12;

inline double reciprocal(double x) { return 1.0 / x; }

/// PA = LU with partial pivoting chosen on the value part only; derivative
/// parts of jets follow the chosen pivots.
template <class T>
struct LUFactors {
  Matrix<T> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

template <class T>
LUFactors<T> lu_factor(Matrix<T> a, double pivot_threshold = kPivotThreshold) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw InvalidArgument("lu_factor needs a square matrix");
  LUFactors<T> f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(value_of(a(k, k)));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(value_of(a(i, k)));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best >= pivot_threshold)) {
      throw SingularSystemError("pivot " + std::to_string(best) + " below threshold in column " +
                                std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    const T inv = reciprocal(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      T factor = a(i, k) * inv;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
      a(i, k) = std::move(factor);
    }
  }
  f.lu = std::move(a);
  return f;
}

template <class T>
std::vector<T> lu_solve(const LUFactors<T>& f, const std::vector<T>& rhs) {
  const std::size_t n = f.lu.rows();
  if (rhs.size() != n) throw InvalidArgument("right-hand side has wrong length");
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu(ii, j) * x[j];
    x[ii] = x[ii] * reciprocal(f.lu(ii, ii));
  }
  return x;
}

template <class T>
T determinant(const LUFactors<T>& f) {
  T det = f.lu(0, 0);
  for (std::size_t i = 1; i < f.lu.rows(); ++i) det = det * f.lu(i, i);
  return f.sign < 0 ? T(-det) : det;
}

template <class T>
T determinant(const Matrix<T>& a) {
  try {
    return determinant(lu_factor(a, std::numeric_limits<double>::min()));
  } catch (const SingularSystemError&) {
    if constexpr (std::is_same_v<T, Jet>) {
      return Jet::constant(a(0, 0).dim(), a(0, 0).order(), 0.0);
    } else {
      return T(0);
    }
  }
}

/// Solves A x = rhs. For jet entries the identity holds as jets truncated at
/// the common order, so x carries exact derivatives of the solution.
template <class T>
std::vector<T> jet_solve(const Matrix<T>& a, const std::vector<T>& rhs) {
  return lu_solve(lu_factor(a), rhs);
}

template <class T>
std::vector<T> mat_vec(const Matrix<T>& a, const std::vector<T>& x) {
  std::vector<T> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T acc = a(i, 0) * x[0];
    for (std::size_t j = 1; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = std::move(acc);
  }
  return y;
}

}  // namespace affsph
