#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/hypersurface.hpp"
#include "affsph/linalg.hpp"
#include "affsph/paracomplex.hpp"
#include "affsph/smooth_map.hpp"

namespace affsph {

inline constexpr double kTrigHalfWidth = std::numbers::pi / 2 - 0.1;
inline constexpr double kHypHalfWidth = 1.5;
inline constexpr double kSuspensionHalfWidth = 1.0;

/// f = J~g cosh z - g sinh z on domain(g) x (-1, 1); z is the last coordinate.
inline SmoothMap suspend(const SmoothMap& g) {
  const int m = g.domain_dim();
  if (g.codomain_dim() % 2 != 0) throw InvalidArgument("suspension needs an even ambient dimension");
  const Expr z = Expr::coordinate(m);
  const auto jg = jtilde<Expr>(std::span(g.components()));
  std::vector<Expr> out;
  for (int r = 0; r < g.codomain_dim(); ++r) out.push_back(jg[r] * cosh(z) - g.component(r) * sinh(z));
  Box box = g.domain().product(Box({{-kSuspensionHalfWidth, kSuspensionHalfWidth}}));
  return SmoothMap(std::move(out), std::move(box), true);
}

namespace detail {

inline void check_same_sphere_dims(const SmoothMap& f1, const SmoothMap& f2) {
  if (f1.codomain_dim() != f1.domain_dim() + 1 || f2.codomain_dim() != f2.domain_dim() + 1) {
    throw InvalidArgument("sources must be hypersurfaces R^n -> R^{n+1}");
  }
  if (f1.domain_dim() != f2.domain_dim()) throw InvalidArgument("sources must have equal dimension");
}

/// Components of f1(x) and f2(y) as expressions on R^{n1 + n2 (+ extra)}.
inline std::pair<std::vector<Expr>, std::vector<Expr>> split_sources(const SmoothMap& f1, const SmoothMap& f2) {
  const int n1 = f1.domain_dim(), n2 = f2.domain_dim();
  const auto xs = coordinates(0, n1);
  const auto ys = coordinates(n1, n2);
  std::vector<Expr> a, b;
  for (const Expr& e : f1.components()) a.push_back(substitute(e, xs));
  for (const Expr& e : f2.components()) b.push_back(substitute(e, ys));
  return {a, b};
}

}  // namespace detail

/// g(x, y) = (f1(x) - f2(y), f1(x) + f2(y)), i.e. f1 x f2 + J~(f1 x (-f2)).
inline SmoothMap pair(const SmoothMap& f1, const SmoothMap& f2) {
  detail::check_same_sphere_dims(f1, f2);
  const auto [a, b] = detail::split_sources(f1, f2);
  std::vector<Expr> out;
  for (std::size_t r = 0; r < a.size(); ++r) out.push_back(a[r] - b[r]);
  for (std::size_t r = 0; r < a.size(); ++r) out.push_back(a[r] + b[r]);
  return SmoothMap(std::move(out), f1.domain().product(f2.domain()), true);
}

/// (J~(f1 x f2) + f1 x (-f2)) cosh z - (f1 x f2 + J~(f1 x (-f2))) sinh z,
/// built directly from the sources.
inline SmoothMap sphere_from_pair(const SmoothMap& f1, const SmoothMap& f2) {
  detail::check_same_sphere_dims(f1, f2);
  const auto [a, b] = detail::split_sources(f1, f2);
  const Expr z = Expr::coordinate(f1.domain_dim() + f2.domain_dim());
  const std::size_t k = a.size();
  std::vector<Expr> out(2 * k, Expr(0.0));
  for (std::size_t r = 0; r < k; ++r) {
    // J~(f1 x f2) = (f2, f1), f1 x (-f2) = (f1, -f2), J~(f1 x (-f2)) = (-f2, f1).
    out[r] = (b[r] + a[r]) * cosh(z) - (a[r] - b[r]) * sinh(z);
    out[k + r] = (a[r] - b[r]) * cosh(z) - (b[r] + a[r]) * sinh(z);
  }
  Box box = f1.domain().product(f2.domain()).product(Box({{-kSuspensionHalfWidth, kSuspensionHalfWidth}}));
  return SmoothMap(std::move(out), std::move(box), true);
}

/// (c1 e^{s a z} f1(x), c2 e^{-s a z} f2(y)) with s = sqrt((n2 + 1) / (n1 + 1)).
inline SmoothMap calabi_product(const SmoothMap& f1, const SmoothMap& f2, double c1, double c2, double a) {
  if (c1 == 0.0 || c2 == 0.0 || a == 0.0) throw InvalidArgument("Calabi product constants must be nonzero");
  if (f1.codomain_dim() != f1.domain_dim() + 1 || f2.codomain_dim() != f2.domain_dim() + 1) {
    throw InvalidArgument("sources must be hypersurfaces R^n -> R^{n+1}");
  }
  const int n1 = f1.domain_dim(), n2 = f2.domain_dim();
  const auto [u, v] = detail::split_sources(f1, f2);
  const Expr z = Expr::coordinate(n1 + n2);
  const double s = std::sqrt(static_cast<double>(n2 + 1) / (n1 + 1));
  const Expr e1 = Expr(c1) * exp(Expr(s * a) * z);
  const Expr e2 = Expr(c2) * exp(Expr(-s * a) * z);
  std::vector<Expr> out;
  for (const Expr& e : u) out.push_back(e1 * e);
  for (const Expr& e : v) out.push_back(e2 * e);
  Box box = f1.domain().product(f2.domain()).product(Box({{-kSuspensionHalfWidth, kSuspensionHalfWidth}}));
  return SmoothMap(std::move(out), std::move(box), true);
}

/// CP(f1, f2)(x, y, z) = (2 e^{-z} f1(x), e^{z} f2(y)).
inline SmoothMap cp(const SmoothMap& f1, const SmoothMap& f2) {
  detail::check_same_sphere_dims(f1, f2);
  return calabi_product(f1, f2, 2.0, 1.0, -1.0);
}

/// [[I/2, I], [I/2, -I]] with blocks of size n+1.
inline std::vector<std::vector<double>> matrix_A(int n) {
  if (n < 0) throw InvalidArgument("matrix_A needs n >= 0");
  const int k = n + 1;
  std::vector<std::vector<double>> a(2 * k, std::vector<double>(2 * k, 0.0));
  for (int i = 0; i < k; ++i) {
    a[i][i] = 0.5;
    a[i][k + i] = 1.0;
    a[k + i][i] = 0.5;
    a[k + i][k + i] = -1.0;
  }
  return a;
}

/// |lambda| = |alpha|^{(2n+4)/(2n+3)}.
inline double lambda_from_alpha(double alpha, int n) {
  if (alpha == 0.0) throw InvalidArgument("alpha must be nonzero");
  return std::pow(std::abs(alpha), (2.0 * n + 4.0) / (2.0 * n + 3.0));
}

/// lambda = [(alpha beta)^{n+2} / 2^{4n+4}]^{1/(2n+3)}.
inline double calabi_lambda(double alpha, double beta, int n) {
  if (alpha == 0.0 || beta == 0.0) throw InvalidArgument("alpha and beta must be nonzero");
  return std::pow(std::pow(alpha * beta, n + 2) / std::pow(2.0, 4 * n + 4), 1.0 / (2 * n + 3));
}

/// Normalized J~-tangency residual |det[f_*d, J~C]| / |det[f_*d, C]| at p.
inline double jtangency_check(const Hypersurface& s, std::span<const double> p) {
  const JetTensor F = s.f.jet(p, 1);
  const JetTensor C = s.C.jet(p, 0);
  const JetTensor* extra[] = {&C};
  const auto lu = detail::factor_frame(detail::frame_matrix(F, extra, 0));
  const auto x = lu_solve(lu, jtilde(C.components()));
  return std::abs(x.back().value());
}

/// Standard complex structure J(x) = (-x_{n+2..2n+2}, x_{1..n+1}).
inline std::vector<double> jcomplex(std::span<const double> x) {
  if (x.size() % 2 != 0) throw InvalidArgument("complex structure needs an even dimension");
  const std::size_t h = x.size() / 2;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = -x[h + i];
    out[h + i] = x[i];
  }
  return out;
}

/// Gradient of prod_k (x_k^2 + x_{n+1+k}^2) = 1 divided by the product:
/// G_k = 2 x_k / (x_k^2 + x_{n+1+k}^2).
inline std::vector<double> torus_quadric_gradient(std::span<const double> x) {
  const std::size_t h = x.size() / 2;
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < h; ++k) {
    const double rho = x[k] * x[k] + x[h + k] * x[h + k];
    g[k] = 2.0 * x[k] / rho;
    g[h + k] = 2.0 * x[h + k] / rho;
  }
  return g;
}

inline double torus_quadric_equation(std::span<const double> x) {
  const std::size_t h = x.size() / 2;
  double prod = 1.0;
  for (std::size_t k = 0; k < h; ++k) prod *= x[k] * x[k] + x[h + k] * x[h + k];
  return prod - 1.0;
}

/// |G . Jx| at a point of the quadric.
inline double jtangency_complex_check(std::span<const double> x) {
  const auto g = torus_quadric_gradient(x);
  const auto jx = jcomplex(x);
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += g[i] * jx[i];
  return std::abs(dot);
}

/// A registered immersion with its designated trial transversal field.
struct Family {
  enum class Kind { kHypersurface, kCodimTwo };

  std::string name;
  std::string description;
  Kind kind = Kind::kHypersurface;
  SmoothMap f;
  TransversalField C;  // trial field (codim 1) or zeta (codim 2)
  std::vector<std::string> coordinate_names;
  std::map<std::string, double> parameters;

  // Composite families remember their sources.
  std::string left;
  std::string right;
  std::string construction;  // "pair", "sphere", "cp", "calabi", "suspension" or empty

  bool centro_affine = false;  // C = -f
  bool sphere = false;         // expected affine sphere
  bool jtangent = false;       // expected J~-tangent
  bool involutive = false;     // expected involutive D
  bool flat = false;           // expected flat affine metric
  bool parallel_cubic = false; // expected parallel cubic form
  bool torus_quadric = false;

  int dim() const { return f.domain_dim(); }
  Hypersurface hypersurface() const { return Hypersurface{f, C}; }
  CodimTwoSurface codim_two() const { return CodimTwoSurface{f, C}; }
};

namespace detail {

inline SmoothMap neg(const SmoothMap& f) { return scaled(-1.0, f); }

inline Box trig_box(int k) {
  return Box(std::vector<std::pair<double, double>>(k, {-kTrigHalfWidth, kTrigHalfWidth}));
}
inline Box hyp_box(int k) { return Box(std::vector<std::pair<double, double>>(k, {-kHypHalfWidth, kHypHalfWidth})); }

/// 1- and 2-dimensional proper affine spheres centred at the origin.
inline std::optional<SmoothMap> base_sphere(const std::string& name) {
  const Expr t = Expr::coordinate(0);
  const Expr u = Expr::coordinate(0), v = Expr::coordinate(1);
  if (name == "ellipse") return SmoothMap({cos(t), sin(t)}, trig_box(1), true);
  if (name == "hyperbola") return SmoothMap({cosh(t), sinh(t)}, hyp_box(1), true);
  if (name == "sphere2") return SmoothMap({cos(u) * cos(v), cos(u) * sin(v), sin(u)}, trig_box(2), true);
  if (name == "hyperboloid1") {
    return SmoothMap({cosh(u) * cos(v), cosh(u) * sin(v), sinh(u)},
                     Box({{-kHypHalfWidth, kHypHalfWidth}, {-kTrigHalfWidth, kTrigHalfWidth}}), true);
  }
  if (name == "hyperboloid2") return SmoothMap({sinh(u), cosh(u) * sinh(v), cosh(u) * cosh(v)}, hyp_box(2), true);
  if (name == "xyz") return SmoothMap({exp(u), exp(v), exp(-u - v)}, hyp_box(2), true);
  if (name == "x2y2z") {
    return SmoothMap({exp(u) * cos(v), exp(u) * sin(v), exp(Expr(-2.0) * u)},
                     Box({{-kHypHalfWidth, kHypHalfWidth}, {-kTrigHalfWidth, kTrigHalfWidth}}), true);
  }
  return std::nullopt;
}

inline const std::vector<std::string>& base_sphere_names() {
  static const std::vector<std::string> names = {"ellipse", "hyperbola", "sphere2", "hyperboloid1",
                                                 "hyperboloid2", "xyz", "x2y2z"};
  return names;
}

inline bool flat_source(const std::string& name) {
  return name == "ellipse" || name == "hyperbola" || name == "xyz" || name == "x2y2z";
}

inline std::vector<std::string> default_coordinate_names(int dim, const std::string& construction) {
  if (construction == "sphere" || construction == "cp" || construction == "calabi" ||
      construction == "suspension") {
    if (dim == 3) return {"x", "y", "z"};
    const int n = (dim - 1) / 2;
    std::vector<std::string> c;
    for (int i = 1; i <= n; ++i) c.push_back("x" + std::to_string(i));
    for (int i = 1; i <= dim - 1 - n; ++i) c.push_back("y" + std::to_string(i));
    c.push_back("z");
    return c;
  }
  if (construction == "pair") {
    if (dim == 2) return {"x", "y"};
    const int n = dim / 2;
    std::vector<std::string> c;
    for (int i = 1; i <= n; ++i) c.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) c.push_back("y" + std::to_string(i));
    return c;
  }
  if (dim == 1) return {"t"};
  if (dim == 2) return {"u", "v"};
  if (dim == 3) return {"x", "y", "z"};
  std::vector<std::string> c;
  for (int i = 1; i <= dim; ++i) c.push_back("x" + std::to_string(i));
  return c;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a = {
      {"f1", "sphere:ellipse:ellipse"},   {"f2", "sphere:hyperbola:hyperbola"},
      {"f3", "sphere:ellipse:hyperbola"}, {"f4", "sphere:hyperbola:ellipse"},
      {"flat1", "flat:xyz:xyz"},           {"flat2", "flat:x2y2z:x2y2z"},
      {"flat3", "flat:x2y2z:xyz"},
  };
  return a;
}

/// Chart of prod_k (X_k^2 + X_{n+1+k}^2) = 1 with coordinates (v_1..v_{n+1}, u_1..u_n):
/// X_k = r_k cos v_k, X_{n+1+k} = r_k sin v_k, r_k = e^{u_k}, r_{n+1} = e^{-u_1-...-u_n}.
inline SmoothMap torus_quadric(int n) {
  if (n < 1) throw InvalidArgument("torus quadric needs n >= 1");
  std::vector<Expr> r;
  Expr sum(0.0);
  for (int k = 0; k < n; ++k) {
    const Expr u = Expr::coordinate(n + 1 + k);
    r.push_back(exp(u));
    sum = sum + u;
  }
  r.push_back(exp(-sum));
  std::vector<Expr> out(2 * n + 2, Expr(0.0));
  for (int k = 0; k <= n; ++k) {
    const Expr v = Expr::coordinate(k);
    out[k] = r[k] * cos(v);
    out[n + 1 + k] = r[k] * sin(v);
  }
  Box box = trig_box(n + 1).product(Box(std::vector<std::pair<double, double>>(n, {-1.0, 1.0})));
  return SmoothMap(std::move(out), std::move(box), true);
}

}  // namespace detail

/// Named family. Accepts base sphere names, the aliases f1..f4 and
/// flat1..flat3, composites "pair:a:b", "sphere:a:b", "cp:a:b", "flat:a:b",
/// "example-noninvolutive", "paraboloid", "torus-quadric-1", "torus-quadric-2".
inline Family named_family(const std::string& requested) {
  std::string name = requested;
  if (auto it = detail::aliases().find(name); it != detail::aliases().end()) name = it->second;

  Family fam;
  fam.name = requested;
  if (auto base = detail::base_sphere(name)) {
    fam.f = *base;
    fam.C = detail::neg(fam.f);
    fam.description = "proper affine sphere " + name + " centred at the origin";
    fam.centro_affine = fam.sphere = true;
    fam.flat = detail::flat_source(name);
    fam.parallel_cubic = true;
    fam.coordinate_names = detail::default_coordinate_names(fam.dim(), "");
    return fam;
  }
  if (name == "example-noninvolutive") {
    const Expr x = Expr::coordinate(0), y = Expr::coordinate(1);
    const SmoothMap g({x * y, x - Expr(0.5) * y, x * y + Expr(1.0), x + Expr(0.5) * y},
                      Box({{-1.0, 1.0}, {-1.0, 1.0}}), true);
    fam.f = suspend(g);
    fam.C = detail::neg(fam.f);
    fam.description = "J~-tangent affine sphere with non-involutive D";
    fam.construction = "suspension";
    fam.centro_affine = fam.sphere = fam.jtangent = true;
    fam.coordinate_names = {"x", "y", "z"};
    return fam;
  }
  if (name == "paraboloid") {
    const Expr x = Expr::coordinate(0), y = Expr::coordinate(1);
    fam.f = SmoothMap({x, y, x * x + y * y}, Box({{-1.0, 1.0}, {-1.0, 1.0}}), true);
    fam.C = SmoothMap({Expr(0.0), Expr(0.0), Expr(1.0)}, fam.f.domain());
    fam.description = "graph paraboloid with constant transversal field";
    fam.sphere = true;
    fam.coordinate_names = {"x", "y"};
    return fam;
  }
  if (name == "torus-quadric-1" || name == "torus-quadric-2") {
    const int n = name.back() - '0';
    fam.f = detail::torus_quadric(n);
    fam.C = detail::neg(fam.f);
    fam.description = "product quadric prod (x_k^2 + x_{n+1+k}^2) = 1";
    fam.centro_affine = fam.sphere = fam.torus_quadric = true;
    fam.flat = fam.parallel_cubic = true;
    fam.parameters["n"] = n;
    for (int k = 1; k <= n + 1; ++k) fam.coordinate_names.push_back("v" + std::to_string(k));
    for (int k = 1; k <= n; ++k) fam.coordinate_names.push_back("u" + std::to_string(k));
    return fam;
  }

  const auto parts = detail::split(name, ':');
  if (parts.size() == 3) {
    const auto& op = parts[0];
    const auto a = detail::base_sphere(parts[1]);
    const auto b = detail::base_sphere(parts[2]);
    if (a && b && (op == "pair" || op == "sphere" || op == "cp" || op == "flat")) {
      if (a->domain_dim() != b->domain_dim()) {
        throw InvalidArgument("sources of '" + requested + "' have different dimensions");
      }
      const int n = a->domain_dim();
      fam.left = parts[1];
      fam.right = parts[2];
      fam.parameters["n"] = n;
      const bool flat = detail::flat_source(parts[1]) && detail::flat_source(parts[2]);
      if (op == "pair") {
        fam.kind = Family::Kind::kCodimTwo;
        fam.f = pair(*a, *b);
        fam.construction = "pair";
        fam.description = "para-complex affine sphere from " + parts[1] + " and " + parts[2];
      } else if (op == "cp") {
        fam.f = cp(*a, *b);
        fam.construction = "cp";
        fam.description = "Calabi product CP(" + parts[1] + ", " + parts[2] + ")";
        fam.parameters["c1"] = 2.0;
        fam.parameters["c2"] = 1.0;
        fam.parameters["a"] = -1.0;
      } else if (op == "flat") {
        fam.f = apply_linear(matrix_A(n), cp(*a, *b));
        fam.construction = "sphere";
        fam.description = "A o CP(" + parts[1] + ", " + parts[2] + ")";
        fam.jtangent = fam.involutive = true;
      } else {
        fam.f = sphere_from_pair(*a, *b);
        fam.construction = "sphere";
        fam.description = "J~-tangent affine sphere from " + parts[1] + " and " + parts[2];
        fam.jtangent = fam.involutive = true;
      }
      fam.C = detail::neg(fam.f);
      fam.centro_affine = fam.sphere = true;
      fam.flat = flat;
      fam.parallel_cubic = true;
      fam.coordinate_names = detail::default_coordinate_names(fam.dim(), fam.construction);
      return fam;
    }
  }
  throw UnknownFamilyError("unknown family '" + requested + "'");
}

struct FamilyInfo {
  std::string name;
  std::string description;
  int domain_dim;
  int ambient_dim;
};

/// Registered names: bases, aliases and the special families. Composite
/// names "pair:a:b", "sphere:a:b", "cp:a:b", "flat:a:b" are accepted for any
/// two bases of equal dimension.
inline std::vector<FamilyInfo> list_families() {
  std::vector<std::string> names = detail::base_sphere_names();
  for (const auto& [alias, target] : detail::aliases()) names.push_back(alias);
  for (const char* s : {"example-noninvolutive", "paraboloid", "torus-quadric-1", "torus-quadric-2",
                        "pair:ellipse:ellipse", "pair:hyperbola:hyperbola", "pair:ellipse:hyperbola",
                        "pair:hyperbola:ellipse", "cp:ellipse:hyperbola"}) {
    names.push_back(s);
  }
  std::vector<FamilyInfo> out;
  for (const auto& n : names) {
    const Family f = named_family(n);
    std::string desc = f.description;
    if (auto it = detail::aliases().find(n); it != detail::aliases().end()) desc += " (" + it->second + ")";
    out.push_back({n, desc, f.f.domain_dim(), f.f.codomain_dim()});
  }
  return out;
}

}  // namespace affsph
