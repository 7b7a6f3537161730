#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/grid.hpp"
#include "affsph/hypersurface.hpp"
#include "affsph/jet.hpp"
#include "affsph/linalg.hpp"
#include "affsph/smooth_map.hpp"

namespace affsph {

/// Standard para-complex structure on R^{2n+2}: (x, y) -> (y, x) with blocks
/// of length n+1.
struct ParaStructure {
  int half_dim = 1;

  explicit ParaStructure(int half) : half_dim(half) {
    if (half < 1) throw InvalidArgument("para-complex structure needs half dimension >= 1");
  }

  std::vector<std::vector<double>> matrix() const {
    const int n = 2 * half_dim;
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < half_dim; ++i) {
      m[i][half_dim + i] = 1.0;
      m[half_dim + i][i] = 1.0;
    }
    return m;
  }

  /// det J~ = (-1)^{half_dim}: one transposition per coordinate pair.
  int determinant() const { return half_dim % 2 == 0 ? 1 : -1; }
};

/// Block swap of an even-length vector.
template <class T>
std::vector<T> jtilde(std::span<const T> v) {
  if (v.size() % 2 != 0 || v.empty()) {
    throw InvalidArgument("para-complex structure needs an even ambient dimension (got " +
                          std::to_string(v.size()) + ")");
  }
  const std::size_t h = v.size() / 2;
  std::vector<T> out(v.begin() + h, v.end());
  out.insert(out.end(), v.begin(), v.begin() + h);
  return out;
}

inline std::vector<double> jtilde(const std::vector<double>& v) { return jtilde<double>(std::span(v)); }
inline std::vector<Jet> jtilde(const std::vector<Jet>& v) { return jtilde<Jet>(std::span(v)); }

/// Tangent vector field given by jet-valued coordinate components X^i.
struct VectorField {
  std::vector<Jet> c;
  std::string label;

  int dim() const { return static_cast<int>(c.size()); }
};

/// Constant field sum_i w_i d_i as jets of the given order.
inline VectorField constant_field(std::span<const double> w, int order, std::string label = {}) {
  VectorField v;
  const int m = static_cast<int>(w.size());
  for (double x : w) v.c.push_back(Jet::constant(m, order, x));
  v.label = std::move(label);
  return v;
}

inline VectorField coordinate_field(int m, int i, int order) {
  std::vector<double> w(m, 0.0);
  w[i] = 1.0;
  return constant_field(w, order, "d" + std::to_string(i + 1));
}

/// Field with components given by a map R^m -> R^m.
inline VectorField field_from_map(const SmoothMap& map, std::span<const double> p, int order,
                                  std::string label = {}) {
  if (map.codomain_dim() != map.domain_dim()) throw InvalidArgument("vector field map must be R^m -> R^m");
  VectorField v;
  v.c = map.jet(p, order).components();
  v.label = std::move(label);
  return v;
}

/// X(g) for a jet-valued scalar g: one order lower.
inline Jet directional(const VectorField& X, const Jet& g) {
  Jet acc = X.c[0] * g.derivative(0);
  for (int i = 1; i < X.dim(); ++i) acc += X.c[i] * g.derivative(i);
  return acc;
}

/// [X, Y]^k = X(Y^k) - Y(X^k).
inline VectorField bracket(const VectorField& X, const VectorField& Y) {
  VectorField r;
  for (int k = 0; k < X.dim(); ++k) r.c.push_back(directional(X, Y.c[k]) - directional(Y, X.c[k]));
  return r;
}

/// Induced almost paracontact structure at a point. phi(i, j) = phi^i_j.
///
/// J~ f_* X = f_* phi X + eta(X) C and J~ C = f_* xi + mu C, so mu is the
/// normalized J~-tangency residual det[f_*d, J~C] / det[f_*d, C].
struct ParacontactFrame {
  int dim = 0;
  int order = 0;
  std::vector<Jet> phi_;
  std::vector<Jet> xi;
  std::vector<Jet> eta;
  double mu = 0.0;

  const Jet& phi(int i, int j) const { return phi_[i * dim + j]; }

  VectorField apply_phi(const VectorField& X) const {
    VectorField r;
    for (int i = 0; i < dim; ++i) {
      Jet acc = phi(i, 0) * X.c[0];
      for (int j = 1; j < dim; ++j) acc += phi(i, j) * X.c[j];
      r.c.push_back(acc);
    }
    return r;
  }
  Jet apply_eta(const VectorField& X) const {
    Jet acc = eta[0] * X.c[0];
    for (int j = 1; j < dim; ++j) acc += eta[j] * X.c[j];
    return acc;
  }
  VectorField xi_field() const { return VectorField{xi, "xi"}; }
};

inline constexpr double kJTangentTolerance = 1e-10;

/// Jet-valued (order <= 1 for closed-form fields) induced structure at p.
/// Throws NotJTangentError when J~C is not tangent.
inline ParacontactFrame induced_paracontact(const Hypersurface& s, std::span<const double> p, int order = 1) {
  const int m = s.f.domain_dim();
  if (s.f.codomain_dim() % 2 != 0) throw InvalidArgument("ambient dimension must be even");
  const JetTensor F = s.f.jet(p, order + 1);
  const JetTensor C = s.C.jet(p, order);
  const JetTensor* extra[] = {&C};
  const auto lu = detail::factor_frame(detail::frame_matrix(F, extra, order));

  ParacontactFrame pf;
  pf.dim = m;
  pf.order = order;
  pf.phi_.resize(m * m);
  pf.eta.resize(m);
  for (int j = 0; j < m; ++j) {
    std::vector<Jet> col;
    for (std::size_t r = 0; r < F.size(); ++r) col.push_back(F[r].derivative(j));
    const auto x = lu_solve(lu, jtilde(col));
    for (int i = 0; i < m; ++i) pf.phi_[i * m + j] = x[i];
    pf.eta[j] = x[m];
  }
  const auto x = lu_solve(lu, jtilde(C.components()));
  pf.xi.assign(x.begin(), x.begin() + m);
  pf.mu = x[m].value();
  if (std::abs(pf.mu) > kJTangentTolerance) {
    throw NotJTangentError("J~C is not tangent (normalized residual " + std::to_string(std::abs(pf.mu)) + ")");
  }
  return pf;
}

/// Residuals of the almost paracontact identities at the point:
/// phi^2 = Id - eta (x) xi, eta(xi) = 1, phi xi = 0, eta o phi = 0.
inline double paracontact_frame_residual(const ParacontactFrame& pf) {
  const int m = pf.dim;
  double r = 0.0;
  auto phiv = [&](int i, int j) { return pf.phi(i, j).value(); };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double sq = 0.0;
      for (int k = 0; k < m; ++k) sq += phiv(i, k) * phiv(k, j);
      const double target = (i == j ? 1.0 : 0.0) - pf.eta[j].value() * pf.xi[i].value();
      r = std::max(r, std::abs(sq - target));
    }
  double eta_xi = 0.0;
  for (int i = 0; i < m; ++i) eta_xi += pf.eta[i].value() * pf.xi[i].value();
  r = std::max(r, std::abs(eta_xi - 1.0));
  for (int i = 0; i < m; ++i) {
    double phi_xi = 0.0, eta_phi = 0.0;
    for (int k = 0; k < m; ++k) {
      phi_xi += phiv(i, k) * pf.xi[k].value();
      eta_phi += pf.eta[k].value() * phiv(k, i);
    }
    r = std::max({r, std::abs(phi_xi), std::abs(eta_phi)});
  }
  return r;
}

/// Basis of D = ker eta split into D+ and D- (n fields each).
struct DistributionBasis {
  std::vector<VectorField> plus;
  std::vector<VectorField> minus;

  std::vector<VectorField> all() const {
    auto v = plus;
    v.insert(v.end(), minus.begin(), minus.end());
    return v;
  }
};

namespace detail {

/// Threshold-pivoted choice of `count` independent fields among the
/// candidates: the first candidate (in coordinate order) whose residual norm
/// is at least kSelectThreshold times the largest one. Fields are returned
/// unnormalized.
inline constexpr double kSelectThreshold = 0.1;

inline std::vector<VectorField> select_independent(const std::vector<VectorField>& cands, int count) {
  const int m = cands.empty() ? 0 : cands[0].dim();
  std::vector<std::vector<double>> resid;
  for (const auto& c : cands) {
    std::vector<double> v;
    for (const Jet& j : c.c) v.push_back(j.value());
    resid.push_back(v);
  }
  std::vector<VectorField> out;
  std::vector<bool> used(cands.size(), false);
  double scale = 0.0;
  for (const auto& v : resid)
    for (double x : v) scale = std::max(scale, std::abs(x));
  auto norm2 = [&](std::size_t c) {
    double n2 = 0.0;
    for (double x : resid[c]) n2 += x * x;
    return n2;
  };
  for (int k = 0; k < count; ++k) {
    double largest = 0.0;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (!used[c]) largest = std::max(largest, norm2(c));
    }
    int best = -1;
    for (std::size_t c = 0; c < cands.size() && best < 0; ++c) {
      if (!used[c] && norm2(c) >= kSelectThreshold * kSelectThreshold * largest) best = static_cast<int>(c);
    }
    const double best_norm = best < 0 ? 0.0 : norm2(best);
    if (best < 0 || std::sqrt(best_norm) < 1e-9 * std::max(1.0, scale)) {
      throw StructureError("eigen-projection of phi has rank below " + std::to_string(count));
    }
    used[best] = true;
    out.push_back(cands[best]);
    std::vector<double> q = resid[best];
    const double nq = std::sqrt(best_norm);
    for (double& x : q) x /= nq;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (used[c]) continue;
      double dot = 0.0;
      for (int i = 0; i < m; ++i) dot += q[i] * resid[c][i];
      for (int i = 0; i < m; ++i) resid[c][i] -= dot * q[i];
    }
  }
  return out;
}

}  // namespace detail

/// D+ / D- basis from the projections (phi^2 +- phi) / 2 of the coordinate fields.
///
/// The projections are smooth fields, so brackets of the returned fields are
/// exact from their jets. Throws StructureError if either eigenspace does not
/// have dimension n.
inline DistributionBasis distribution_D(const ParacontactFrame& pf) {
  const int m = pf.dim;
  if (m % 2 == 0) throw StructureError("D needs an odd-dimensional hypersurface");
  const int n = (m - 1) / 2;
  std::vector<VectorField> plus, minus;
  for (int i = 0; i < m; ++i) {
    const VectorField e = coordinate_field(m, i, pf.order);
    const VectorField pe = pf.apply_phi(e);
    const VectorField ppe = pf.apply_phi(pe);
    VectorField a, b;
    for (int k = 0; k < m; ++k) {
      a.c.push_back((ppe.c[k] + pe.c[k]) * 0.5);
      b.c.push_back((ppe.c[k] - pe.c[k]) * 0.5);
    }
    a.label = "P+d" + std::to_string(i + 1);
    b.label = "P-d" + std::to_string(i + 1);
    plus.push_back(a);
    minus.push_back(b);
  }
  DistributionBasis db;
  db.plus = detail::select_independent(plus, n);
  db.minus = detail::select_independent(minus, n);
  return db;
}

inline DistributionBasis distribution_D(const Hypersurface& s, std::span<const double> p) {
  return distribution_D(induced_paracontact(s, p, 1));
}

/// Max residual of each identity of the induced structure over the given
/// field pairs.
struct ParacontactResiduals {
  std::array<double, 6> eq{};

  double max() const { return *std::max_element(eq.begin(), eq.end()); }
};

namespace detail {

/// Value and first partials of a field: grad[k * m + i] = d_i F^k.
struct FieldValues {
  std::vector<double> v;
  std::vector<double> grad;
};

inline FieldValues values_of(const VectorField& X) {
  const int m = X.dim();
  FieldValues f;
  for (int k = 0; k < m; ++k) {
    f.v.push_back(X.c[k].value());
    for (int i = 0; i < m; ++i) f.grad.push_back(X.c[k].d(i));
  }
  return f;
}

/// nabla_X Y = X(Y^k) + Gamma^k_ij X^i Y^j at the point.
inline std::vector<double> covariant(const InducedObjects& io, const FieldValues& X, const FieldValues& Y) {
  const int m = io.dim;
  std::vector<double> r(m, 0.0);
  for (int k = 0; k < m; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      acc += X.v[i] * Y.grad[k * m + i];
      for (int j = 0; j < m; ++j) acc += io.gamma(k, i, j).value() * X.v[i] * Y.v[j];
    }
    r[k] = acc;
  }
  return r;
}

inline double form(const InducedObjects& io, std::span<const double> X, std::span<const double> Y) {
  double acc = 0.0;
  for (int i = 0; i < io.dim; ++i)
    for (int j = 0; j < io.dim; ++j) acc += io.h(i, j).value() * X[i] * Y[j];
  return acc;
}

inline std::vector<double> shape_of(const InducedObjects& io, std::span<const double> X) {
  std::vector<double> r(io.dim, 0.0);
  for (int i = 0; i < io.dim; ++i)
    for (int j = 0; j < io.dim; ++j) r[i] += io.shape(i, j).value() * X[j];
  return r;
}

inline double tau_of(const InducedObjects& io, std::span<const double> X) {
  double acc = 0.0;
  for (int i = 0; i < io.dim; ++i) acc += io.tau(i).value() * X[i];
  return acc;
}

inline double eta_value(const ParacontactFrame& pf, std::span<const double> X) {
  double acc = 0.0;
  for (int i = 0; i < pf.dim; ++i) acc += pf.eta[i].value() * X[i];
  return acc;
}
inline double eta_value(const ParacontactFrame& pf, const VectorField& X) {
  std::vector<double> v;
  for (const auto& c : X.c) v.push_back(c.value());
  return eta_value(pf, v);
}

inline std::vector<double> phi_value(const ParacontactFrame& pf, std::span<const double> X) {
  std::vector<double> r(pf.dim, 0.0);
  for (int i = 0; i < pf.dim; ++i)
    for (int j = 0; j < pf.dim; ++j) r[i] += pf.phi(i, j).value() * X[j];
  return r;
}

}  // namespace detail

/// Residuals of the six identities relating (phi, xi, eta) to (nabla, h, S, tau)
/// for every ordered pair of `fields` (order >= 1 jets at the point).
inline ParacontactResiduals paracontact_residuals(const InducedObjects& io, const ParacontactFrame& pf,
                                                  const std::vector<VectorField>& fields) {
  using namespace detail;
  const int m = io.dim;
  ParacontactResiduals out;
  auto upd = [&](int k, double v) { out.eq[k] = std::max(out.eq[k], std::abs(v)); };

  struct Prepared {
    FieldValues x, phi;
    double eta;
    std::vector<double> deta;  // d_i eta(X)
    std::vector<double> S;
    double tau;
  };
  std::vector<Prepared> prep;
  for (const auto& X : fields) {
    Prepared p;
    p.x = values_of(X);
    p.phi = values_of(pf.apply_phi(X));
    const Jet e = pf.apply_eta(X);
    p.eta = e.value();
    for (int i = 0; i < m; ++i) p.deta.push_back(e.d(i));
    p.S = shape_of(io, p.x.v);
    p.tau = tau_of(io, p.x.v);
    prep.push_back(std::move(p));
  }
  const FieldValues xi = values_of(pf.xi_field());

  for (const auto& X : prep) {
    upd(4, eta_value(pf, covariant(io, X.x, xi)) - X.tau);
    upd(5, eta_value(pf, X.S) + form(io, X.x.v, xi.v));
    for (const auto& Y : prep) {
      double XetaY = 0.0, YetaX = 0.0;
      for (int i = 0; i < m; ++i) {
        XetaY += X.x.v[i] * Y.deta[i];
        YetaX += Y.x.v[i] * X.deta[i];
      }
      const auto nXY = covariant(io, X.x, Y.x);
      const auto nXphiY = covariant(io, X.x, Y.phi);
      const auto nYphiX = covariant(io, Y.x, X.phi);
      std::vector<double> br(m, 0.0);
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i) br[k] += X.x.v[i] * Y.x.grad[k * m + i] - Y.x.v[i] * X.x.grad[k * m + i];
      const double hXY = form(io, X.x.v, Y.x.v);
      const double hXphiY = form(io, X.x.v, Y.phi.v);
      const double hYphiX = form(io, Y.x.v, X.phi.v);

      upd(0, eta_value(pf, nXY) - hXphiY - XetaY - Y.eta * X.tau);
      upd(2, eta_value(pf, br) - (hXphiY - hYphiX + XetaY - YetaX + Y.eta * X.tau - X.eta * Y.tau));
      const auto phi_n = phi_value(pf, nXY);
      const auto phi_b = phi_value(pf, br);
      for (int k = 0; k < m; ++k) {
        upd(1, phi_n[k] - nXphiY[k] + Y.eta * X.S[k] + hXY * xi.v[k]);
        upd(3, phi_b[k] - nXphiY[k] + nYphiX[k] - X.eta * Y.S[k] + Y.eta * X.S[k]);
      }
    }
  }
  return out;
}

/// Coordinate fields, `random_count` seeded constant combinations with
/// coefficients in [-1, 1] and the extra fields.
inline std::vector<VectorField> test_fields(int m, int order, int random_count, std::uint64_t seed,
                                            const std::vector<VectorField>& extra = {}) {
  std::vector<VectorField> fields;
  for (int i = 0; i < m; ++i) fields.push_back(coordinate_field(m, i, order));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int r = 0; r < random_count; ++r) {
    std::vector<double> w(m);
    for (double& x : w) x = u(rng);
    fields.push_back(constant_field(w, order, "random" + std::to_string(r)));
  }
  fields.insert(fields.end(), extra.begin(), extra.end());
  return fields;
}

inline ParacontactResiduals paracontact_residuals(const Hypersurface& s, std::span<const double> p,
                                                  const std::vector<VectorField>& extra = {},
                                                  std::uint64_t seed = 0) {
  const InducedObjects io = decompose(s, p, 0);
  const ParacontactFrame pf = induced_paracontact(s, p, 1);
  return paracontact_residuals(io, pf, test_fields(io.dim, 1, 3, seed, extra));
}

/// max |eta(v)| over the D basis at the point.
inline double d_kernel_residual(const ParacontactFrame& pf, const DistributionBasis& db) {
  double r = 0.0;
  for (const auto& v : db.all()) r = std::max(r, std::abs(detail::eta_value(pf, v)));
  return r;
}

struct BracketWitness {
  double value = 0.0;  // signed eta([X, Y]) of largest magnitude
  std::string first;
  std::string second;
};

/// Largest |eta([D_i, D_j])| among basis pairs at the point.
inline BracketWitness max_eta_bracket(const ParacontactFrame& pf, const DistributionBasis& db) {
  const auto basis = db.all();
  BracketWitness w;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const double v = detail::eta_value(pf, bracket(basis[i], basis[j]));
      if (std::abs(v) > std::abs(w.value) || w.first.empty()) {
        w.value = v;
        w.first = basis[i].label;
        w.second = basis[j].label;
      }
    }
  return w;
}

struct InvolutivityResult {
  bool involutive = true;
  double max_value = 0.0;      // max |eta([D_i, D_j])|
  double witness_value = 0.0;  // signed value at the maximum
  std::vector<double> witness_point;
};

inline constexpr double kInvolutivityTolerance = 1e-9;

inline InvolutivityResult involutivity_check(const Hypersurface& s, const Grid& region) {
  InvolutivityResult r;
  const auto per_point = parallel_map(region.size(), [&](std::size_t k) {
    const auto p = region.point(k);
    const auto pf = induced_paracontact(s, p, 1);
    return max_eta_bracket(pf, distribution_D(pf)).value;
  });
  for (std::size_t k = 0; k < per_point.size(); ++k) {
    if (std::abs(per_point[k]) > r.max_value || r.witness_point.empty()) {
      r.max_value = std::abs(per_point[k]);
      r.witness_value = per_point[k];
      r.witness_point = region.point(k);
    }
  }
  r.involutive = r.max_value < kInvolutivityTolerance;
  return r;
}

/// Para-holomorphic immersion g: R^{2n} -> R^{2n+2} with transversal zeta;
/// the transversal frame is {zeta, J~ zeta}.
struct CodimTwoSurface {
  SmoothMap g;
  TransversalField zeta;
};

struct CodimTwoInduced {
  int dim = 0;
  int order = 0;
  std::vector<Jet> gamma_;  // (k*m + i)*m + j
  std::vector<Jet> h1_;
  std::vector<Jet> h2_;
  std::vector<Jet> shape_;  // S^i_j at i*m + j
  std::vector<Jet> tau1_;
  std::vector<Jet> tau2_;
  std::vector<double> jt_;  // tangent part of J~: J~ g_*d_j = g_* J^i_j d_i at i*m + j
  double paraholomorphic_residual = 0.0;  // max normal part of J~ g_*d_j
  Jet theta_zeta;
  double H_zeta = 0.0;  // det h1 / theta_zeta^2

  const Jet& gamma(int k, int i, int j) const { return gamma_[(k * dim + i) * dim + j]; }
  double h1(int i, int j) const { return h1_[i * dim + j].value(); }
  double h2(int i, int j) const { return h2_[i * dim + j].value(); }
  double shape(int i, int j) const { return shape_[i * dim + j].value(); }
  double tau1(int i) const { return tau1_[i].value(); }
  double tau2(int i) const { return tau2_[i].value(); }
  double jt(int i, int j) const { return jt_[i * dim + j]; }

  /// det h1(X_i, X_j) / theta(X_1, ..., X_m)^2 for X_j = sum_i B(i, j) d_i.
  double H_in_basis(const std::vector<std::vector<double>>& B) const {
    const int m = dim;
    Matrix<double> hb(m, m), bm(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        bm(i, j) = B[i][j];
        double acc = 0.0;
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) acc += B[a][i] * h1(a, b) * B[b][j];
        hb(i, j) = acc;
      }
    const double th = determinant(bm) * theta_zeta.value();
    return determinant(hb) / (th * th);
  }
};

/// Codimension-2 Gauss/Weingarten decomposition at p (order <= 2).
inline CodimTwoInduced decompose2(const CodimTwoSurface& gs, std::span<const double> p, int order = 0) {
  if (order < 0 || order > kMaxOrder - 2) throw OrderError("decompose2 supports orders 0..2");
  const int m = gs.g.domain_dim();
  if (gs.g.codomain_dim() != m + 2 || m % 2 != 0) {
    throw InvalidArgument("codimension-2 surface needs g: R^{2n} -> R^{2n+2}");
  }
  const JetTensor G = gs.g.jet(p, order + 2);
  const JetTensor Z = gs.zeta.jet(p, order + 1);
  const JetTensor JZ(jtilde(Z.components()));
  const JetTensor* extra[] = {&Z, &JZ};
  const auto lu = detail::factor_frame(detail::frame_matrix(G, extra, order + 1));

  CodimTwoInduced ci;
  ci.dim = m;
  ci.order = order;
  ci.gamma_.resize(m * m * m);
  ci.h1_.resize(m * m);
  ci.h2_.resize(m * m);
  ci.shape_.resize(m * m);
  ci.tau1_.resize(m);
  ci.tau2_.resize(m);
  ci.jt_.resize(m * m);
  std::vector<Jet> rhs(m + 2);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      for (int r = 0; r < m + 2; ++r) rhs[r] = G[r].derivative(i).derivative(j);
      const auto x = lu_solve(lu, rhs);
      for (int k = 0; k < m; ++k) {
        ci.gamma_[(k * m + i) * m + j] = x[k];
        ci.gamma_[(k * m + j) * m + i] = x[k];
      }
      ci.h1_[i * m + j] = ci.h1_[j * m + i] = x[m];
      ci.h2_[i * m + j] = ci.h2_[j * m + i] = x[m + 1];
    }
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < m + 2; ++r) rhs[r] = Z[r].derivative(i);
    const auto x = lu_solve(lu, rhs);
    for (int k = 0; k < m; ++k) ci.shape_[k * m + i] = -x[k];
    ci.tau1_[i] = x[m];
    ci.tau2_[i] = x[m + 1];
  }
  for (int j = 0; j < m; ++j) {
    std::vector<Jet> col;
    for (int r = 0; r < m + 2; ++r) col.push_back(G[r].derivative(j));
    const auto x = lu_solve(lu, jtilde(col));
    for (int i = 0; i < m; ++i) ci.jt_[i * m + j] = x[i].value();
    ci.paraholomorphic_residual =
        std::max({ci.paraholomorphic_residual, std::abs(x[m].value()), std::abs(x[m + 1].value())});
  }
  ci.theta_zeta = determinant(lu).truncated(order);
  std::vector<double> h1v;
  for (const Jet& j : ci.h1_) h1v.push_back(j.value());
  const double th = ci.theta_zeta.value();
  ci.H_zeta = detail::det_of(h1v, m) / (th * th);
  return ci;
}

/// Max of |h1(X, JY) - h2(X, Y)|, |h1(JX, Y) - h2(X, Y)|, |h2(X, JY) - h1(X, Y)|
/// over coordinate fields.
inline double lemma_h1h2_residual(const CodimTwoInduced& ci) {
  const int m = ci.dim;
  double r = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double h1J = 0.0, Jh1 = 0.0, h2J = 0.0;
      for (int k = 0; k < m; ++k) {
        h1J += ci.h1(i, k) * ci.jt(k, j);
        Jh1 += ci.jt(k, i) * ci.h1(k, j);
        h2J += ci.h2(i, k) * ci.jt(k, j);
      }
      r = std::max({r, std::abs(h1J - ci.h2(i, j)), std::abs(Jh1 - ci.h2(i, j)), std::abs(h2J - ci.h1(i, j))});
    }
  return r;
}

/// |H in a random basis - H in the coordinate basis| relative to |H|.
inline double h_zeta_basis_residual(const CodimTwoInduced& ci, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> B(ci.dim, std::vector<double>(ci.dim));
  for (int i = 0; i < ci.dim; ++i)
    for (int j = 0; j < ci.dim; ++j) B[i][j] = u(rng) + (i == j ? 2.0 : 0.0);
  const double other = ci.H_in_basis(B);
  return std::abs(other - ci.H_zeta) / std::max(1.0, std::abs(ci.H_zeta));
}

struct AffineNormal2Result {
  double alpha = 0.0;         // zeta' = -alpha g
  double rescale = 0.0;       // alpha / c for the input zeta = -c g
  double alpha_spread = 0.0;  // standard deviation of the pointwise alpha
  bool sphere = false;        // S = alpha Id with constant alpha
  SmoothMap zeta;             // -alpha g
  double h_residual = 0.0;    // max ||H_zeta'| - 1|
  double tau_residual = 0.0;  // max |tau1|, |tau2|
  double shape_residual = 0.0;  // max |S - alpha Id|
};

inline constexpr double kRadialTolerance = 1e-10;

/// Affine normal field -alpha g for a centro-affine para-complex surface with
/// radial zeta = -c g (c constant). Throws NonCentroAffineError otherwise.
inline AffineNormal2Result normalize_affine_normal2(const CodimTwoSurface& gs, const Grid& region) {
  const int m = gs.g.domain_dim();
  std::vector<double> cs, alphas;
  for (std::size_t k = 0; k < region.size(); ++k) {
    const auto p = region.point(k);
    const auto gv = gs.g(p);
    const auto zv = gs.zeta.jet(p, 0).value();
    double gg = 0.0, zg = 0.0, zz = 0.0;
    for (std::size_t r = 0; r < gv.size(); ++r) {
      gg += gv[r] * gv[r];
      zg += zv[r] * gv[r];
      zz += zv[r] * zv[r];
    }
    const double c = -zg / gg;
    double off = 0.0;
    for (std::size_t r = 0; r < gv.size(); ++r) off = std::max(off, std::abs(zv[r] + c * gv[r]));
    if (off > kRadialTolerance * std::max(1.0, std::sqrt(zz))) {
      throw NonCentroAffineError("transversal field is not a multiple of the position vector");
    }
    cs.push_back(c);
    const auto ci = decompose2(gs, p, 0);
    alphas.push_back(c * std::pow(std::abs(ci.H_zeta), 1.0 / (m + 4)));
  }
  const auto [cmin, cmax] = std::minmax_element(cs.begin(), cs.end());
  if (*cmax - *cmin > kRadialTolerance * std::max(1.0, std::abs(*cmax))) {
    throw NonCentroAffineError("radial scaling of the transversal field is not constant");
  }
  AffineNormal2Result out;
  double sum = 0.0;
  for (double a : alphas) sum += a;
  out.alpha = sum / alphas.size();
  double var = 0.0;
  for (double a : alphas) var += (a - out.alpha) * (a - out.alpha);
  out.alpha_spread = std::sqrt(var / alphas.size());
  out.rescale = out.alpha / cs.front();
  out.zeta = scaled(-out.alpha, gs.g);

  const CodimTwoSurface normalized{gs.g, out.zeta};
  for (std::size_t k = 0; k < region.size(); ++k) {
    const auto ci = decompose2(normalized, region.point(k), 0);
    out.h_residual = std::max(out.h_residual, std::abs(std::abs(ci.H_zeta) - 1.0));
    for (int i = 0; i < m; ++i) {
      out.tau_residual = std::max({out.tau_residual, std::abs(ci.tau1(i)), std::abs(ci.tau2(i))});
      for (int j = 0; j < m; ++j) {
        out.shape_residual =
            std::max(out.shape_residual, std::abs(ci.shape(i, j) - (i == j ? out.alpha : 0.0)));
      }
    }
  }
  out.sphere = out.alpha_spread < 1e-8 && out.shape_residual < 1e-8;
  return out;
}

}  // namespace affsph
