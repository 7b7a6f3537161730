#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/families.hpp"
#include "affsph/grid.hpp"
#include "affsph/hypersurface.hpp"
#include "affsph/paracomplex.hpp"

namespace affsph {

struct Witness {
  std::vector<double> point;
  double value = 0.0;
};

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::optional<Witness> witness;
};

struct VerificationReport {
  std::string family;
  std::map<std::string, double> parameters;
  std::vector<int> grid_counts;
  std::vector<std::pair<double, double>> grid_ranges;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::map<std::string, double> constants;
  double wall_time_s = 0.0;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline constexpr double kFailedResidual = std::numeric_limits<double>::infinity();

/// Max-reduction of one named residual over grid points, in grid order.
class Accumulator {
 public:
  Accumulator(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

  void add(const std::vector<double>& p, double residual, double value) {
    const double v = std::isfinite(residual) ? residual : kFailedResidual;
    if (!seen_ || v > max_) {
      max_ = v;
      witness_ = Witness{p, value};
    }
    seen_ = true;
  }
  void add(const std::vector<double>& p, double residual) { add(p, residual, residual); }

  bool seen() const { return seen_; }

  CheckResult result() const {
    CheckResult r;
    r.name = name_;
    r.tolerance = tol_;
    r.max_residual = seen_ ? max_ : kFailedResidual;
    r.pass = seen_ && r.max_residual < tol_;
    if (seen_) r.witness = witness_;
    return r;
  }

 private:
  std::string name_;
  double tol_;
  double max_ = 0.0;
  bool seen_ = false;
  Witness witness_;
};

inline CheckResult scalar_check(const std::string& name, double residual, double tol) {
  CheckResult r;
  r.name = name;
  r.tolerance = tol;
  r.max_residual = std::isfinite(residual) ? residual : kFailedResidual;
  r.pass = r.max_residual < tol;
  return r;
}

/// 1 / det(J^T J) of the Jacobian; large means close to rank loss.
inline double inverse_gram(const SmoothMap& f, std::span<const double> p) {
  const JetTensor F = f.jet(p, 1);
  const int m = f.domain_dim();
  Matrix<double> g(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < F.size(); ++r) acc += F[r].d(i) * F[r].d(j);
      g(i, j) = acc;
    }
  const double det = determinant(g);
  return det > 0.0 ? 1.0 / det : kFailedResidual;
}

/// C + eps (1 + x_m) f_* d_1: tau != 0 and, for m >= 2, d tau != 0.
inline TransversalField perturbed_field(const SmoothMap& f, const TransversalField& C, double eps) {
  auto eval = [f, C, eps](std::span<const double> p, int order) {
    const JetTensor base = C.jet(p, order);
    const JetTensor F = f.jet(p, order + 1);
    const int m = f.domain_dim();
    const Jet coef = (1.0 + Jet::variable(m, order, m - 1, p[m - 1])) * eps;
    std::vector<Jet> out;
    for (std::size_t r = 0; r < F.size(); ++r) out.push_back(base[r] + F[r].derivative(0) * coef);
    return JetTensor(std::move(out));
  };
  return TransversalField(eval, std::min(C.max_order(), kMaxOrder - 1), "perturbed");
}

/// lambda of a centro-affine sphere from Blaschke normalization of -f.
inline double sphere_constant(const SmoothMap& f, int per_axis) {
  const Grid g = Grid::uniform(f.domain(), per_axis);
  const TransversalField C = blaschke_normalize(f, scaled(-1.0, f), g);
  const auto r = is_affine_sphere(Hypersurface{f, C}, g);
  if (!r.sphere) throw StructureError("source is not an affine sphere");
  return r.lambda;
}

/// alpha of the para-complex sphere pair(a, b) with zeta = -g.
inline double paracomplex_alpha(const SmoothMap& a, const SmoothMap& b, int per_axis) {
  const SmoothMap g = pair(a, b);
  const auto r = normalize_affine_normal2(CodimTwoSurface{g, scaled(-1.0, g)}, Grid::uniform(g.domain(), per_axis));
  return r.alpha;
}

inline int source_dim(const Family& fam) { return static_cast<int>(fam.parameters.at("n")); }

inline std::vector<double> slice(const std::vector<double>& p, int from, int count) {
  return std::vector<double>(p.begin() + from, p.begin() + from + count);
}

}  // namespace detail

/// Relations between the sphere constants of the sources of a pair and the
/// constant of the resulting J~-tangent sphere, from independent pipelines.
struct CrossRelation {
  double lambda = 0.0;             // sphere_from_pair via Blaschke normalization
  double alpha = 0.0;              // left source
  double beta = 0.0;               // right source
  double alpha_paracomplex = 0.0;  // pair(left, right) via normalize_affine_normal2
  CheckResult lambda_alpha;        // |lambda| vs |alpha_pc|^{(2n+4)/(2n+3)}
  CheckResult calabi_lambda;       // lambda vs [(alpha beta)^{n+2} / 2^{4n+4}]^{1/(2n+3)}
};

inline constexpr double kRelationTolerance = 1e-8;

inline CrossRelation cross_relation(const SmoothMap& left, const SmoothMap& right, int per_axis = 3) {
  CrossRelation cr;
  const int n = left.domain_dim();
  cr.lambda = detail::sphere_constant(sphere_from_pair(left, right), per_axis);
  cr.alpha = detail::sphere_constant(left, 5);
  cr.beta = detail::sphere_constant(right, 5);
  cr.alpha_paracomplex = detail::paracomplex_alpha(left, right, per_axis);
  cr.lambda_alpha = detail::scalar_check(
      "lambda_alpha_relation", std::abs(std::abs(cr.lambda) - lambda_from_alpha(cr.alpha_paracomplex, n)),
      kRelationTolerance);
  cr.calabi_lambda = detail::scalar_check(
      "calabi_lambda_relation", std::abs(cr.lambda - affsph::calabi_lambda(cr.alpha, cr.beta, n)),
      kRelationTolerance);
  return cr;
}

/// Both relations as one check; the residual is the larger disagreement.
inline CheckResult cross_relation_check(const std::string& left, const std::string& right) {
  const Family a = named_family(left);
  const Family b = named_family(right);
  const CrossRelation cr = cross_relation(a.f, b.f);
  return detail::scalar_check("cross_relation",
                              std::max(cr.lambda_alpha.max_residual, cr.calabi_lambda.max_residual),
                              kRelationTolerance);
}

namespace detail {

struct PointRecord {
  bool skipped = false;
  std::map<std::string, std::pair<double, double>> values;  // residual, signed value
  std::vector<double> shape;                                // S at the point (phase one)
  std::vector<double> normal;                               // normalized field value
  double lambda = 0.0;
  double pick = 0.0;
};

inline void put(PointRecord& r, const std::string& name, double residual) { r.values[name] = {residual, residual}; }
inline void put(PointRecord& r, const std::string& name, double residual, double value) {
  r.values[name] = {residual, value};
}

/// Check names with tolerances, in report order.
inline const std::vector<std::pair<std::string, double>>& check_catalogue() {
  static const std::vector<std::pair<std::string, double>> c = {
      {"immersion", 1e12},
      {"gauss_reconstruction", 1e-10},
      {"blaschke_tau", 1e-8},
      {"blaschke_volume", 1e-8},
      {"affine_sphere", 1e-8},
      {"blaschke_closed_form", 1e-8},
      {"gauss_equation", 1e-8},
      {"codazzi_h", 1e-8},
      {"codazzi_s", 1e-8},
      {"ricci_equation", 1e-8},
      {"gauss_equation_nonequiaffine", 1e-8},
      {"codazzi_h_nonequiaffine", 1e-8},
      {"codazzi_s_nonequiaffine", 1e-8},
      {"ricci_equation_nonequiaffine", 1e-8},
      {"jtangency", 1e-12},
      {"paracontact_frame", 1e-10},
      {"paracontact_eq1", 1e-8},
      {"paracontact_eq2", 1e-8},
      {"paracontact_eq3", 1e-8},
      {"paracontact_eq4", 1e-8},
      {"paracontact_eq5", 1e-8},
      {"paracontact_eq6", 1e-8},
      {"d_equals_ker_eta", 1e-10},
      {"involutivity", 1e-9},
      {"xi_xi_equals_minus_lambda", 1e-8},
      {"lambda_bounded_away_from_zero", 1.0},
      {"affine_metric_flat", 1e-6},
      {"cubic_form_parallel", 1e-6},
      {"cubic_form_symmetric", 1e-9},
      {"suspension_ode", 1e-14},
      {"sphere_decomposition", 1e-14},
      {"calabi_equiaffine", 1e-12},
      {"lambda_alpha_relation", 1e-8},
      {"calabi_lambda_relation", 1e-8},
      {"calabi_metric", 1e-9},
      {"calabi_connection", 1e-9},
      {"calabi_omega", 1e-8},
      {"calabi_theta", 1e-8},
      {"paraholomorphic", 1e-12},
      {"lemma_h1h2", 1e-10},
      {"h_zeta_basis_invariance", 1e-10},
      {"affine_normal", 1e-8},
      {"paracomplex_sphere", 1e-8},
      {"torus_quadric_equation", 1e-12},
      {"jtangency_complex", 1e-12},
      {"skipped_points", 0.05},
  };
  return c;
}

inline double tolerance_of(const std::string& name) {
  for (const auto& [n, t] : check_catalogue()) {
    if (n == name) return t;
  }
  throw InvalidArgument("unknown check " + name);
}

/// Phase one for hypersurfaces: immersion, reconstruction, Blaschke
/// normalization of the trial field and its shape operator.
inline PointRecord hypersurface_phase_one(const Family& fam, const TransversalField& normal,
                                          const std::vector<double>& p) {
  PointRecord r;
  try {
    put(r, "immersion", inverse_gram(fam.f, p));
    put(r, "gauss_reconstruction", reconstruction_residual(fam.hypersurface(), p));
    const InducedObjects io = decompose(Hypersurface{fam.f, normal}, p, 0);
    const auto b = blaschke_residuals(io);
    put(r, "blaschke_tau", b.tau);
    put(r, "blaschke_volume", b.volume);
    const int m = io.dim;
    double tr = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) r.shape.push_back(io.shape(i, j).value());
    for (int i = 0; i < m; ++i) tr += io.shape(i, i).value();
    r.lambda = tr / m;
    r.normal = normal.jet(p, 0).value();
  } catch (const Error&) {
    r.skipped = true;
  }
  return r;
}

inline void fundamental_into(PointRecord& r, const InducedObjects& io, const std::string& suffix) {
  const auto fr = fundamental_residuals(io);
  put(r, "gauss_equation" + suffix, fr.gauss);
  put(r, "codazzi_h" + suffix, fr.codazzi_h);
  put(r, "codazzi_s" + suffix, fr.codazzi_s);
  put(r, "ricci_equation" + suffix, fr.ricci);
}

struct SuiteContext {
  const Family* fam = nullptr;
  TransversalField blaschke;  // closed form when available
  bool closed_form = false;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  bool curvature = false;
  // Calabi product sources.
  std::optional<SmoothMap> left, right;
  double alpha = 0.0, beta = 0.0;
};

inline void calabi_into(PointRecord& r, const SuiteContext& ctx, const std::vector<double>& p) {
  const int n = source_dim(*ctx.fam);
  const auto x = slice(p, 0, n), y = slice(p, n, n);
  const InducedObjects cp_io = decompose(Hypersurface{ctx.fam->f, ctx.blaschke}, p, 0);
  const InducedObjects s1 = decompose(Hypersurface{*ctx.left, scaled(-ctx.alpha, *ctx.left)}, x, 0);
  const InducedObjects s2 = decompose(Hypersurface{*ctx.right, scaled(-ctx.beta, *ctx.right)}, y, 0);
  const double lam = ctx.lambda, al = ctx.alpha, be = ctx.beta;
  const int m = 2 * n + 1, z = 2 * n;

  // Expected metric and connection of the product in (x, y, z) coordinates.
  std::vector<double> h(m * m, 0.0), G(m * m * m, 0.0);
  auto g = [&](int k, int i, int j) -> double& { return G[(k * m + i) * m + j]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      h[i * m + j] = 0.5 * al / lam * s1.h(i, j).value();
      h[(n + i) * m + n + j] = 0.5 * be / lam * s2.h(i, j).value();
      for (int k = 0; k < n; ++k) {
        g(k, i, j) = s1.gamma(k, i, j).value();
        g(n + k, n + i, n + j) = s2.gamma(k, i, j).value();
      }
      g(z, i, j) = 0.5 * al * s1.h(i, j).value();
      g(z, n + i, n + j) = -0.5 * be * s2.h(i, j).value();
    }
  h[z * m + z] = -1.0 / lam;
  for (int i = 0; i < n; ++i) {
    g(i, i, z) = g(i, z, i) = -1.0;
    g(n + i, n + i, z) = g(n + i, z, n + i) = 1.0;
  }
  double hr = 0.0, gr = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      hr = std::max(hr, std::abs(cp_io.h(i, j).value() - h[i * m + j]));
      for (int k = 0; k < m; ++k) gr = std::max(gr, std::abs(cp_io.gamma(k, i, j).value() - g(k, i, j)));
    }
  put(r, "calabi_metric", hr);
  put(r, "calabi_connection", gr);
  const double omega = std::sqrt(std::pow(al * be, n) / (std::pow(2.0, 2 * n) * std::pow(lam, 2 * n + 1))) *
                       s1.omega_h.value() * s2.omega_h.value();
  put(r, "calabi_omega", std::abs(cp_io.omega_h.value() - omega) / std::max(1.0, std::abs(omega)));
  const double theta = std::pow(-2.0, n + 2) * lam / (al * be) * s1.theta.value() * s2.theta.value();
  put(r, "calabi_theta", std::abs(cp_io.theta.value() - theta) / std::max(1.0, std::abs(theta)));
}

/// Phase two for hypersurfaces, using the Blaschke field (closed form when
/// the family is centro-affine).
inline PointRecord hypersurface_phase_two(const SuiteContext& ctx, const std::vector<double>& p) {
  const Family& fam = *ctx.fam;
  PointRecord r;
  try {
    const Hypersurface hs{fam.f, ctx.blaschke};
    if (ctx.closed_form) {
      const InducedObjects io1 = decompose(hs, p, ctx.curvature ? 2 : 1);
      fundamental_into(r, io1, "");
      if (ctx.curvature) {
        const CurvatureData cd = curvature(io1);
        if (fam.flat) put(r, "affine_metric_flat", cd.metric_curvature_max);
        if (fam.parallel_cubic) put(r, "cubic_form_parallel", cd.cubic_parallel_residual);
        put(r, "cubic_form_symmetric", cd.cubic_asymmetry);
        r.pick = cd.pick;
      }
    }
    const TransversalField& equi = ctx.closed_form ? ctx.blaschke : fam.C;
    const InducedObjects io2 = decompose(Hypersurface{fam.f, detail::perturbed_field(fam.f, equi, 0.1)}, p, 1);
    fundamental_into(r, io2, "_nonequiaffine");

    if (fam.f.codomain_dim() % 2 == 0 && fam.dim() % 2 == 1) {
      const double jt = jtangency_check(hs, p);
      if (fam.jtangent) put(r, "jtangency", jt);
      if (fam.jtangent && jt <= kJTangentTolerance) {
        const InducedObjects io0 = decompose(hs, p, 0);
        const ParacontactFrame pf = induced_paracontact(hs, p, 1);
        put(r, "paracontact_frame", paracontact_frame_residual(pf));
        const DistributionBasis db = distribution_D(pf);
        const auto res = paracontact_residuals(io0, pf, test_fields(io0.dim, 1, 3, ctx.seed, db.all()));
        for (int k = 0; k < 6; ++k) put(r, "paracontact_eq" + std::to_string(k + 1), res.eq[k]);
        put(r, "d_equals_ker_eta", d_kernel_residual(pf, db));
        const auto w = max_eta_bracket(pf, db);
        put(r, "involutivity", std::abs(w.value), w.value);
        if (ctx.closed_form) {
          double hxx = 0.0;
          for (int i = 0; i < io0.dim; ++i)
            for (int j = 0; j < io0.dim; ++j) hxx += io0.h(i, j).value() * pf.xi[i].value() * pf.xi[j].value();
          put(r, "xi_xi_equals_minus_lambda", std::abs(hxx + ctx.lambda), hxx);
        }
      }
    }

    if (fam.construction == "sphere" || fam.construction == "suspension") {
      const JetTensor F = fam.f.jet(p, 1);
      const auto jf = jtilde(F.value());
      double res = 0.0;
      for (std::size_t c = 0; c < jf.size(); ++c) res = std::max(res, std::abs(F[c].d(fam.dim() - 1) + jf[c]));
      put(r, "suspension_ode", res);
    }
    if (fam.construction == "sphere" && ctx.left) {
      const auto a = fam.f(p);
      const auto b = suspend(pair(*ctx.left, *ctx.right))(p);
      const auto c = apply_linear(matrix_A(source_dim(fam)), cp(*ctx.left, *ctx.right))(p);
      double d1 = 0.0, d2 = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        d1 = std::max(d1, std::abs(a[i] - b[i]));
        d2 = std::max(d2, std::abs(a[i] - c[i]));
      }
      put(r, "sphere_decomposition", d1);
      put(r, "calabi_equiaffine", d2);
    }
    if (fam.construction == "cp" && ctx.closed_form) calabi_into(r, ctx, p);
    if (fam.torus_quadric) {
      const auto x = fam.f(p);
      put(r, "torus_quadric_equation", std::abs(torus_quadric_equation(x)));
      put(r, "jtangency_complex", jtangency_complex_check(x));
    }
  } catch (const Error&) {
    r.skipped = true;
  }
  return r;
}

inline PointRecord codim_two_point(const Family& fam, const AffineNormal2Result& an, std::uint64_t seed,
                                   const std::vector<double>& p) {
  PointRecord r;
  try {
    put(r, "immersion", inverse_gram(fam.f, p));
    const CodimTwoInduced ci = decompose2(fam.codim_two(), p, 0);
    put(r, "paraholomorphic", ci.paraholomorphic_residual);
    put(r, "lemma_h1h2", lemma_h1h2_residual(ci));
    put(r, "h_zeta_basis_invariance", h_zeta_basis_residual(ci, seed));
    const CodimTwoInduced cn = decompose2(CodimTwoSurface{fam.f, an.zeta}, p, 0);
    double tau = 0.0, shape = 0.0;
    for (int i = 0; i < cn.dim; ++i) {
      tau = std::max({tau, std::abs(cn.tau1(i)), std::abs(cn.tau2(i))});
      for (int j = 0; j < cn.dim; ++j) shape = std::max(shape, std::abs(cn.shape(i, j) - (i == j ? an.alpha : 0.0)));
    }
    put(r, "affine_normal", std::max(std::abs(std::abs(cn.H_zeta) - 1.0), tau));
    put(r, "paracomplex_sphere", shape);
  } catch (const Error&) {
    r.skipped = true;
  }
  return r;
}

inline void reduce_into(VerificationReport& rep, const Grid& grid, const std::vector<PointRecord>& records,
                        std::map<std::string, Accumulator>& acc, std::size_t& skipped) {
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (records[k].skipped) {
      ++skipped;
      continue;
    }
    const auto p = grid.point(k);
    for (const auto& [name, rv] : records[k].values) {
      auto it = acc.find(name);
      if (it == acc.end()) it = acc.emplace(name, Accumulator(name, tolerance_of(name))).first;
      it->second.add(p, rv.first, rv.second);
    }
  }
  (void)rep;
}

}  // namespace detail

/// Runs every check applicable to the family over the grid. Degenerate
/// points are skipped and counted; more than 5% skipped fails the suite.
inline VerificationReport run_suite(const Family& fam, const Grid& grid, std::uint64_t seed = 0) {
  using namespace detail;
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.family = fam.name;
  rep.parameters = fam.parameters;
  rep.grid_counts = grid.counts();
  rep.grid_ranges = grid.box().ranges();
  rep.seed = seed;
  if (grid.dim() != fam.dim()) throw InvalidArgument("grid dimension does not match the family");

  std::map<std::string, Accumulator> acc;
  std::vector<CheckResult> scalars;
  std::size_t skipped = 0;
  const std::size_t total = grid.size();

  if (fam.kind == Family::Kind::kCodimTwo) {
    AffineNormal2Result an;
    try {
      an = normalize_affine_normal2(fam.codim_two(), grid);
    } catch (const Error&) {
      an.zeta = fam.C.closed_form() ? *fam.C.closed_form() : fam.f;
    }
    const auto records = parallel_map(total, [&](std::size_t k) { return codim_two_point(fam, an, seed, grid.point(k)); });
    reduce_into(rep, grid, records, acc, skipped);
    if (an.alpha != 0.0) {
      rep.constants["alpha_paracomplex"] = an.alpha;
      scalars.push_back(scalar_check("paracomplex_sphere_constant", an.alpha_spread, 1e-8));
      if (!fam.left.empty()) rep.constants["lambda"] = lambda_from_alpha(an.alpha, source_dim(fam));
    }
  } else {
    const TransversalField normal = blaschke_field(fam.f, fam.C);
    const auto first =
        parallel_map(total, [&](std::size_t k) { return hypersurface_phase_one(fam, normal, grid.point(k)); });
    reduce_into(rep, grid, first, acc, skipped);

    SuiteContext ctx;
    ctx.fam = &fam;
    ctx.seed = seed;
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& r : first) {
      if (!r.skipped) {
        sum += r.lambda;
        ++used;
      }
    }
    ctx.lambda = used ? sum / used : 0.0;
    if (fam.sphere && used) {
      Accumulator sphere("affine_sphere", tolerance_of("affine_sphere"));
      double var = 0.0;
      for (const auto& r : first)
        if (!r.skipped) var += (r.lambda - ctx.lambda) * (r.lambda - ctx.lambda);
      const double spread = std::sqrt(var / used);
      for (std::size_t k = 0; k < first.size(); ++k) {
        if (first[k].skipped) continue;
        const int m = fam.dim();
        double res = spread;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            res = std::max(res, std::abs(first[k].shape[i * m + j] - (i == j ? ctx.lambda : 0.0)));
        sphere.add(grid.point(k), res, first[k].lambda);
      }
      acc.emplace("affine_sphere", sphere);
      rep.constants["lambda"] = ctx.lambda;
      rep.constants["lambda_std"] = spread;
    }

    if (fam.centro_affine && used) {
      Accumulator cf("blaschke_closed_form", tolerance_of("blaschke_closed_form"));
      for (std::size_t k = 0; k < first.size(); ++k) {
        if (first[k].skipped) continue;
        const auto fv = fam.f(grid.point(k));
        double res = 0.0, scale = 1.0;
        for (std::size_t c = 0; c < fv.size(); ++c) {
          res = std::max(res, std::abs(first[k].normal[c] + ctx.lambda * fv[c]));
          scale = std::max(scale, std::abs(first[k].normal[c]));
        }
        cf.add(grid.point(k), res / scale);
      }
      acc.emplace("blaschke_closed_form", cf);
      ctx.blaschke = scaled(-ctx.lambda, fam.f);
      ctx.closed_form = ctx.lambda != 0.0;
    } else {
      ctx.blaschke = normal;
    }
    ctx.curvature = ctx.closed_form && (fam.flat || fam.parallel_cubic);

    if (!fam.left.empty()) {
      ctx.left = named_family(fam.left).f;
      ctx.right = named_family(fam.right).f;
      try {
        ctx.alpha = sphere_constant(*ctx.left, 5);
        ctx.beta = sphere_constant(*ctx.right, 5);
        rep.constants["alpha"] = ctx.alpha;
        rep.constants["beta"] = ctx.beta;
        const int n = source_dim(fam);
        scalars.push_back(scalar_check("calabi_lambda_relation",
                                       std::abs(ctx.lambda - calabi_lambda(ctx.alpha, ctx.beta, n)),
                                       tolerance_of("calabi_lambda_relation")));
        if (fam.construction == "sphere") {
          const double apc = paracomplex_alpha(*ctx.left, *ctx.right, 3);
          rep.constants["alpha_paracomplex"] = apc;
          scalars.push_back(scalar_check("lambda_alpha_relation",
                                         std::abs(std::abs(ctx.lambda) - lambda_from_alpha(apc, n)),
                                         tolerance_of("lambda_alpha_relation")));
        }
      } catch (const Error&) {
        scalars.push_back(scalar_check("calabi_lambda_relation", kFailedResidual, 1e-8));
      }
    }

    if (ctx.closed_form || !fam.centro_affine) {
      const auto second =
          parallel_map(total, [&](std::size_t k) { return hypersurface_phase_two(ctx, grid.point(k)); });
      std::size_t skipped_two = 0;
      reduce_into(rep, grid, second, acc, skipped_two);
      skipped = std::max(skipped, skipped_two);
      if (ctx.curvature) {
        double pick = 0.0;
        std::size_t cnt = 0;
        for (const auto& r : second)
          if (!r.skipped) {
            pick += r.pick;
            ++cnt;
          }
        if (cnt) rep.constants["pick"] = pick / cnt;
      }
    }
    if (fam.jtangent && fam.sphere && ctx.closed_form) {
      scalars.push_back(scalar_check("lambda_bounded_away_from_zero",
                                     std::abs(ctx.lambda) > 0 ? 1e-3 / std::abs(ctx.lambda) : kFailedResidual,
                                     tolerance_of("lambda_bounded_away_from_zero")));
    }
  }

  for (const auto& [name, tol] : check_catalogue()) {
    if (auto it = acc.find(name); it != acc.end()) rep.checks.push_back(it->second.result());
    for (const auto& s : scalars) {
      if (s.name == name) rep.checks.push_back(s);
    }
  }
  for (const auto& s : scalars) {
    if (s.name == "paracomplex_sphere_constant") rep.checks.push_back(s);
  }
  rep.checks.push_back(scalar_check("skipped_points", total ? static_cast<double>(skipped) / total : 0.0,
                                    tolerance_of("skipped_points")));
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline VerificationReport run_suite(const std::string& family, const Grid& grid, std::uint64_t seed = 0) {
  return run_suite(named_family(family), grid, seed);
}

}  // namespace affsph
