#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/multi_index.hpp"

namespace affsph {

/// Truncated multivariate jet of a scalar function.
///
/// Coefficient k holds the mixed partial derivative d^alpha f for the k-th
/// multi-index of the graded table (not the Taylor coefficient d^alpha f / alpha!).
/// Binary operations between jets of different order truncate to the lower one.
class Jet {
 public:
  Jet() = default;

  static Jet constant(int dim, int order, double v) {
    Jet j(dim, order);
    j.c_[0] = v;
    return j;
  }

  /// Coordinate function x_axis evaluated at `v`.
  static Jet variable(int dim, int order, int axis, double v) {
    Jet j(dim, order);
    j.c_[0] = v;
    if (order >= 1) j.c_[1 + axis] = 1.0;
    return j;
  }

  int dim() const { return table_ ? table_->dim() : 0; }
  int order() const { return order_; }
  bool empty() const { return table_ == nullptr; }

  double value() const { return c_[0]; }
  std::span<const double> coefficients() const { return c_; }
  std::span<double> coefficients() { return c_; }

  double partial(const MultiIndex& alpha) const {
    std::size_t k = table_->find(alpha);
    if (k >= c_.size()) throw OrderError("partial derivative above jet order");
    return c_[k];
  }
  /// First partial d_i.
  double d(int i) const {
    if (order_ < 1) throw OrderError("first derivative of an order-0 jet");
    return c_[1 + i];
  }
  /// Second partial d_i d_j.
  double d(int i, int j) const {
    MultiIndex a{};
    ++a[i];
    ++a[j];
    return partial(a);
  }

  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet r = *this;
    r.order_ = order;
    r.c_.resize(table_->size(order));
    return r;
  }

  /// Jet of d f / d x_axis, one order lower.
  Jet derivative(int axis) const {
    if (order_ < 1) throw OrderError("cannot differentiate an order-0 jet");
    Jet r(dim(), order_ - 1);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = c_[table_->shifted(k, axis)];
    return r;
  }

  bool finite() const {
    return std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
  }

  Jet& operator+=(const Jet& o) {
    align(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    align(o);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_same_dim(a, b);
    Jet r(a.dim(), std::min(a.order_, b.order_));
    for (std::size_t k = 0; k < r.c_.size(); ++k) {
      double acc = 0.0;
      for (const auto& t : a.table_->leibniz(k)) acc += t.coeff * a.c_[t.lhs] * b.c_[t.rhs];
      r.c_[k] = acc;
    }
    return r;
  }

  /// f(u) for a univariate f given its derivatives f^(k)(u0), k = 0..order,
  /// at u0 = u.value(). Truncated Taylor composition; exact for the jet.
  friend Jet compose(const Jet& u, std::span<const double> derivs) {
    Jet delta = u;
    delta.c_[0] = 0.0;
    Jet result = Jet::constant(u.dim(), u.order_, derivs[0]);
    if (u.order_ == 0) return result;
    Jet power = delta;
    double factorial = 1.0;
    for (int k = 1; k <= u.order_; ++k) {
      factorial *= k;
      const double w = derivs[k] / factorial;
      for (std::size_t i = 0; i < result.c_.size(); ++i) result.c_[i] += w * power.c_[i];
      if (k < u.order_) power = power * delta;
    }
    return result;
  }

 private:
  Jet(int dim, int order) : table_(&MultiIndexTable::get(dim)), order_(order) {
    if (order < 0 || order > kMaxOrder) {
      throw OrderError("jet order must lie in [0, " + std::to_string(kMaxOrder) + "]");
    }
    c_.assign(table_->size(order), 0.0);
  }

  static void check_same_dim(const Jet& a, const Jet& b) {
    if (a.table_ != b.table_) throw InvalidArgument("jets over different domains");
  }

  void align(const Jet& o) {
    check_same_dim(*this, o);
    if (o.order_ < order_) {
      order_ = o.order_;
      c_.resize(o.c_.size());
    }
  }

  const MultiIndexTable* table_ = nullptr;
  int order_ = 0;
  std::vector<double> c_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a += -s; }
inline Jet operator-(double s, Jet a) { return (a *= -1.0) += s; }

inline Jet exp(const Jet& u) {
  std::array<double, kMaxOrder + 1> d;
  d.fill(std::exp(u.value()));
  return compose(u, d);
}

inline Jet sin(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const std::array<double, kMaxOrder + 1> d{s, c, -s, -c, s};
  return compose(u, d);
}

inline Jet cos(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  const std::array<double, kMaxOrder + 1> d{c, -s, -c, s, c};
  return compose(u, d);
}

inline Jet sinh(const Jet& u) {
  const double s = std::sinh(u.value()), c = std::cosh(u.value());
  const std::array<double, kMaxOrder + 1> d{s, c, s, c, s};
  return compose(u, d);
}

inline Jet cosh(const Jet& u) {
  const double s = std::sinh(u.value()), c = std::cosh(u.value());
  const std::array<double, kMaxOrder + 1> d{c, s, c, s, c};
  return compose(u, d);
}

/// u^p for real p. Non-integer p needs u > 0.
inline Jet pow(const Jet& u, double p) {
  const double u0 = u.value();
  std::array<double, kMaxOrder + 1> d{};
  double falling = 1.0;
  for (int k = 0; k <= u.order(); ++k) {
    d[k] = falling * std::pow(u0, p - k);
    falling *= (p - k);
  }
  Jet r = compose(u, d);
  if (!r.finite()) throw NonFiniteError("pow of jet produced a non-finite value");
  return r;
}

inline Jet sqrt(const Jet& u) { return pow(u, 0.5); }

inline Jet reciprocal(const Jet& u) {
  if (u.value() == 0.0) throw NonFiniteError("reciprocal of a jet with zero value");
  return pow(u, -1.0);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(Jet a, double s) { return a *= (1.0 / s); }
inline Jet operator/(double s, const Jet& b) { return s * reciprocal(b); }

/// |u|, smooth away from u = 0.
inline Jet abs(const Jet& u) { return u.value() < 0.0 ? -u : u; }

inline double value_of(double x) { return x; }
inline double value_of(const Jet& j) { return j.value(); }

}  // namespace affsph
