#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/jet.hpp"

namespace affsph {

/// Scalar expression over the coordinates of a parameter domain.
///
/// Nodes are immutable and shared, so an expression is a DAG. Evaluation
/// memoizes per node within one call.
class Expr {
 public:
  enum class Op { kConstant, kCoordinate, kAdd, kSub, kMul, kNeg, kPow, kExp, kSin, kCos, kSinh, kCosh };

  struct Node {
    Op op;
    double scalar = 0.0;
    int index = -1;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  Expr(double c) : node_(make(Op::kConstant, c)) {}  // NOLINT(google-explicit-constructor)
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Expr coordinate(int i) {
    auto n = std::make_shared<Node>();
    n->op = Op::kCoordinate;
    n->index = i;
    return Expr(std::move(n));
  }

  const Node& node() const { return *node_; }
  const std::shared_ptr<const Node>& ptr() const { return node_; }

  bool is_constant() const { return node_->op == Op::kConstant; }
  bool is_constant(double v) const { return is_constant() && node_->scalar == v; }
  double constant_value() const { return node_->scalar; }

  static Expr unary(Op op, const Expr& a, double scalar = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->scalar = scalar;
    n->a = a.node_;
    return Expr(std::move(n));
  }
  static Expr binary(Op op, const Expr& a, const Expr& b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = a.node_;
    n->b = b.node_;
    return Expr(std::move(n));
  }

 private:
  static std::shared_ptr<const Node> make(Op op, double c) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->scalar = c;
    return n;
  }

  std::shared_ptr<const Node> node_;
};

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() + b.constant_value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::binary(Expr::Op::kAdd, a, b);
}
inline Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.constant_value());
  return Expr::unary(Expr::Op::kNeg, a);
}
inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() - b.constant_value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::binary(Expr::Op::kSub, a, b);
}
inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.constant_value() * b.constant_value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr::binary(Expr::Op::kMul, a, b);
}
inline Expr pow(const Expr& a, double p) {
  if (p == 1.0) return a;
  if (p == 0.0) return Expr(1.0);
  if (a.is_constant()) return Expr(std::pow(a.constant_value(), p));
  return Expr::unary(Expr::Op::kPow, a, p);
}
inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant()) return a * Expr(1.0 / b.constant_value());
  return a * pow(b, -1.0);
}
inline Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr(std::exp(a.constant_value()));
  return Expr::unary(Expr::Op::kExp, a);
}
inline Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr(std::sin(a.constant_value()));
  return Expr::unary(Expr::Op::kSin, a);
}
inline Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr(std::cos(a.constant_value()));
  return Expr::unary(Expr::Op::kCos, a);
}
inline Expr sinh(const Expr& a) {
  if (a.is_constant()) return Expr(std::sinh(a.constant_value()));
  return Expr::unary(Expr::Op::kSinh, a);
}
inline Expr cosh(const Expr& a) {
  if (a.is_constant()) return Expr(std::cosh(a.constant_value()));
  return Expr::unary(Expr::Op::kCosh, a);
}

namespace detail {

using JetCache = std::unordered_map<const Expr::Node*, Jet>;

inline Jet evaluate(const Expr::Node& n, std::span<const Jet> coords, JetCache& cache) {
  if (n.op == Expr::Op::kCoordinate) {
    if (n.index < 0 || static_cast<std::size_t>(n.index) >= coords.size()) {
      throw InvalidArgument("expression refers to coordinate " + std::to_string(n.index) +
                            " outside the domain");
    }
    return coords[n.index];
  }
  if (n.op == Expr::Op::kConstant) {
    return Jet::constant(coords[0].dim(), coords[0].order(), n.scalar);
  }
  if (auto it = cache.find(&n); it != cache.end()) return it->second;
  Jet r;
  switch (n.op) {
    case Expr::Op::kAdd:
      r = evaluate(*n.a, coords, cache) + evaluate(*n.b, coords, cache);
      break;
    case Expr::Op::kSub:
      r = evaluate(*n.a, coords, cache) - evaluate(*n.b, coords, cache);
      break;
    case Expr::Op::kMul: {
      // Constant factors scale instead of running a full Leibniz product.
      if (n.a->op == Expr::Op::kConstant) {
        r = evaluate(*n.b, coords, cache) * n.a->scalar;
      } else if (n.b->op == Expr::Op::kConstant) {
        r = evaluate(*n.a, coords, cache) * n.b->scalar;
      } else {
        r = evaluate(*n.a, coords, cache) * evaluate(*n.b, coords, cache);
      }
      break;
    }
    case Expr::Op::kNeg:
      r = -evaluate(*n.a, coords, cache);
      break;
    case Expr::Op::kPow:
      r = pow(evaluate(*n.a, coords, cache), n.scalar);
      break;
    case Expr::Op::kExp:
      r = exp(evaluate(*n.a, coords, cache));
      break;
    case Expr::Op::kSin:
      r = sin(evaluate(*n.a, coords, cache));
      break;
    case Expr::Op::kCos:
      r = cos(evaluate(*n.a, coords, cache));
      break;
    case Expr::Op::kSinh:
      r = sinh(evaluate(*n.a, coords, cache));
      break;
    case Expr::Op::kCosh:
      r = cosh(evaluate(*n.a, coords, cache));
      break;
    default:
      throw InvalidArgument("unknown expression node");
  }
  cache.emplace(&n, r);
  return r;
}

using SubstCache = std::unordered_map<const Expr::Node*, Expr>;

inline Expr substitute(const std::shared_ptr<const Expr::Node>& n, std::span<const Expr> args,
                       SubstCache& cache) {
  switch (n->op) {
    case Expr::Op::kConstant:
      return Expr(n);
    case Expr::Op::kCoordinate:
      if (static_cast<std::size_t>(n->index) >= args.size()) {
        throw InvalidArgument("substitution is missing coordinate " + std::to_string(n->index));
      }
      return args[n->index];
    default:
      break;
  }
  if (auto it = cache.find(n.get()); it != cache.end()) return it->second;
  Expr a = substitute(n->a, args, cache);
  Expr r(0.0);
  switch (n->op) {
    case Expr::Op::kAdd:
      r = a + substitute(n->b, args, cache);
      break;
    case Expr::Op::kSub:
      r = a - substitute(n->b, args, cache);
      break;
    case Expr::Op::kMul:
      r = a * substitute(n->b, args, cache);
      break;
    case Expr::Op::kNeg:
      r = -a;
      break;
    case Expr::Op::kPow:
      r = pow(a, n->scalar);
      break;
    case Expr::Op::kExp:
      r = exp(a);
      break;
    case Expr::Op::kSin:
      r = sin(a);
      break;
    case Expr::Op::kCos:
      r = cos(a);
      break;
    case Expr::Op::kSinh:
      r = sinh(a);
      break;
    case Expr::Op::kCosh:
      r = cosh(a);
      break;
    default:
      throw InvalidArgument("unknown expression node");
  }
  cache.emplace(n.get(), r);
  return r;
}

}  // namespace detail

/// Replaces coordinate i of `e` by args[i].
inline Expr substitute(const Expr& e, std::span<const Expr> args) {
  detail::SubstCache cache;
  return detail::substitute(e.ptr(), args, cache);
}

/// Open axis-aligned box of parameters.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<std::pair<double, double>> ranges) : ranges_(std::move(ranges)) {
    for (const auto& [lo, hi] : ranges_) {
      if (!(lo < hi)) throw InvalidArgument("box range must satisfy lo < hi");
    }
  }

  int dim() const { return static_cast<int>(ranges_.size()); }
  const std::vector<std::pair<double, double>>& ranges() const { return ranges_; }
  std::pair<double, double> range(int i) const { return ranges_[i]; }

  bool contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i) {
      if (!(p[i] > ranges_[i].first && p[i] < ranges_[i].second)) return false;
    }
    return true;
  }

  std::vector<double> center() const {
    std::vector<double> c;
    for (const auto& [lo, hi] : ranges_) c.push_back(0.5 * (lo + hi));
    return c;
  }

  Box product(const Box& other) const {
    auto r = ranges_;
    r.insert(r.end(), other.ranges_.begin(), other.ranges_.end());
    return Box(std::move(r));
  }

 private:
  std::vector<std::pair<double, double>> ranges_;
};

/// Value and all mixed partials (up to `order`) of a vector-valued map at a point.
class JetTensor {
 public:
  JetTensor() = default;
  explicit JetTensor(std::vector<Jet> components) : components_(std::move(components)) {}

  std::size_t size() const { return components_.size(); }
  int domain_dim() const { return components_.empty() ? 0 : components_[0].dim(); }
  int order() const {
    int o = kMaxOrder;
    for (const Jet& j : components_) o = std::min(o, j.order());
    return o;
  }

  const Jet& operator[](std::size_t i) const { return components_[i]; }
  Jet& operator[](std::size_t i) { return components_[i]; }
  const std::vector<Jet>& components() const { return components_; }

  std::vector<double> value() const {
    std::vector<double> v;
    for (const Jet& j : components_) v.push_back(j.value());
    return v;
  }
  std::vector<double> partial(const MultiIndex& alpha) const {
    std::vector<double> v;
    for (const Jet& j : components_) v.push_back(j.partial(alpha));
    return v;
  }
  std::vector<double> d(int i) const {
    std::vector<double> v;
    for (const Jet& j : components_) v.push_back(j.d(i));
    return v;
  }
  std::vector<double> d(int i, int k) const {
    std::vector<double> v;
    for (const Jet& j : components_) v.push_back(j.d(i, k));
    return v;
  }

  JetTensor derivative(int axis) const {
    std::vector<Jet> out;
    for (const Jet& j : components_) out.push_back(j.derivative(axis));
    return JetTensor(std::move(out));
  }
  JetTensor truncated(int order) const {
    std::vector<Jet> out;
    for (const Jet& j : components_) out.push_back(j.truncated(order));
    return JetTensor(std::move(out));
  }

 private:
  std::vector<Jet> components_;
};

/// Coordinate jets (x_0, ..., x_{d-1}) seeded at `point`.
inline std::vector<Jet> coordinate_jets(std::span<const double> point, int order) {
  const int d = static_cast<int>(point.size());
  std::vector<Jet> coords;
  coords.reserve(d);
  for (int i = 0; i < d; ++i) coords.push_back(Jet::variable(d, order, i, point[i]));
  return coords;
}

/// Smooth map R^m -> R^k given by one expression per component on an open box.
class SmoothMap {
 public:
  SmoothMap() = default;
  SmoothMap(std::vector<Expr> components, Box domain, bool immersion = false)
      : components_(std::move(components)), domain_(std::move(domain)), immersion_(immersion) {
    if (components_.empty()) throw InvalidArgument("map needs at least one component");
  }

  int domain_dim() const { return domain_.dim(); }
  int codomain_dim() const { return static_cast<int>(components_.size()); }
  const Box& domain() const { return domain_; }
  bool immersion() const { return immersion_; }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& component(int i) const { return components_[i]; }

  /// All mixed partials up to `order` at `point`; exact up to rounding.
  JetTensor jet(std::span<const double> point, int order) const {
    if (order < 0 || order > kMaxOrder) {
      throw OrderError("jet order " + std::to_string(order) + " outside [0, 4]");
    }
    if (!domain_.contains(point)) throw DomainError("point outside the domain of the map");
    const auto coords = coordinate_jets(point, order);
    detail::JetCache cache;
    std::vector<Jet> out;
    out.reserve(components_.size());
    for (const Expr& e : components_) {
      Jet j = detail::evaluate(e.node(), coords, cache);
      if (!j.finite()) throw NonFiniteError("map evaluation produced a non-finite value");
      out.push_back(std::move(j));
    }
    return JetTensor(std::move(out));
  }

  std::vector<double> operator()(std::span<const double> point) const { return jet(point, 0).value(); }

  SmoothMap with_domain(Box domain) const { return SmoothMap(components_, std::move(domain), immersion_); }
  SmoothMap with_immersion(bool flag) const { return SmoothMap(components_, domain_, flag); }

 private:
  std::vector<Expr> components_;
  Box domain_;
  bool immersion_ = false;
};

inline JetTensor jet_eval(const SmoothMap& map, std::span<const double> point, int order) {
  return map.jet(point, order);
}

/// Coordinate expressions x_offset, ..., x_{offset+count-1}.
inline std::vector<Expr> coordinates(int offset, int count) {
  std::vector<Expr> c;
  for (int i = 0; i < count; ++i) c.push_back(Expr::coordinate(offset + i));
  return c;
}

/// map ∘ args: each coordinate i of `map` is replaced by args[i].
inline SmoothMap reparametrize(const SmoothMap& map, std::span<const Expr> args, Box new_domain) {
  if (static_cast<int>(args.size()) != map.domain_dim()) {
    throw InvalidArgument("reparametrization needs one expression per coordinate");
  }
  std::vector<Expr> out;
  for (const Expr& e : map.components()) out.push_back(substitute(e, args));
  return SmoothMap(std::move(out), std::move(new_domain), map.immersion());
}

/// Linear map application x -> A x on the codomain.
inline SmoothMap apply_linear(const std::vector<std::vector<double>>& a, const SmoothMap& map) {
  std::vector<Expr> out;
  for (const auto& row : a) {
    if (static_cast<int>(row.size()) != map.codomain_dim()) {
      throw InvalidArgument("linear map has the wrong number of columns");
    }
    Expr acc(0.0);
    for (std::size_t j = 0; j < row.size(); ++j) acc = acc + Expr(row[j]) * map.component(j);
    out.push_back(acc);
  }
  return SmoothMap(std::move(out), map.domain(), map.immersion());
}

/// Stacks the components of two maps defined on the same domain.
inline SmoothMap concat(const SmoothMap& a, const SmoothMap& b) {
  if (a.domain_dim() != b.domain_dim()) throw InvalidArgument("concat needs a common domain");
  auto out = a.components();
  out.insert(out.end(), b.components().begin(), b.components().end());
  return SmoothMap(std::move(out), a.domain());
}

inline SmoothMap scaled(double s, const SmoothMap& map) {
  std::vector<Expr> out;
  for (const Expr& e : map.components()) out.push_back(Expr(s) * e);
  return SmoothMap(std::move(out), map.domain(), map.immersion());
}

/// Ambient vector field along a parameter domain, evaluable to jets.
///
/// Either backed by a closed-form SmoothMap (order up to 4) or by an
/// evaluator with a reduced maximum order, e.g. a normalized field expressed
/// over a trial frame.
class TransversalField {
 public:
  using Evaluator = std::function<JetTensor(std::span<const double>, int)>;

  /// Coefficients of the field over a base frame: C = a * C0 + f_* W.
  struct FrameCoefficients {
    Jet a;
    std::vector<Jet> w;
  };
  using FrameEvaluator = std::function<FrameCoefficients(std::span<const double>, int)>;

  struct FrameRelative {
    std::shared_ptr<const TransversalField> base;
    FrameEvaluator coefficients;
    int max_order;
  };

  TransversalField() = default;
  TransversalField(SmoothMap map)  // NOLINT(google-explicit-constructor)
      : map_(std::make_shared<SmoothMap>(std::move(map))), max_order_(kMaxOrder), label_("closed-form") {}
  TransversalField(Evaluator eval, int max_order, std::string label)
      : eval_(std::move(eval)), max_order_(max_order), label_(std::move(label)) {}

  JetTensor jet(std::span<const double> point, int order) const {
    if (order > max_order_) {
      throw OrderError("transversal field '" + label_ + "' only supports order <= " +
                       std::to_string(max_order_));
    }
    if (map_) return map_->jet(point, order);
    return eval_(point, order);
  }

  int max_order() const { return max_order_; }
  const std::string& label() const { return label_; }
  const SmoothMap* closed_form() const { return map_.get(); }

  const std::shared_ptr<const FrameRelative>& relative() const { return relative_; }
  TransversalField with_relative(FrameRelative rel) const {
    TransversalField t = *this;
    t.relative_ = std::make_shared<const FrameRelative>(std::move(rel));
    return t;
  }

 private:
  std::shared_ptr<const SmoothMap> map_;
  Evaluator eval_;
  int max_order_ = 0;
  std::string label_;
  std::shared_ptr<const FrameRelative> relative_;
};

}  // namespace affsph
