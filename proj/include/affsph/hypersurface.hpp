#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "affsph/errors.hpp"
#include "affsph/grid.hpp"
#include "affsph/jet.hpp"
#include "affsph/linalg.hpp"
#include "affsph/smooth_map.hpp"

namespace affsph {

/// Immersion f: R^m -> R^{m+1} with a transversal field C.
struct Hypersurface {
  SmoothMap f;
  TransversalField C;
};

/// Induced affine objects at a point in the coordinate basis d_1..d_m.
///
/// Every entry is a jet of order `order`, so derivatives of the induced objects
/// are available for the fundamental equations and curvature.
struct InducedObjects {
  int dim = 0;
  int order = 0;
  std::vector<Jet> gamma_;  // Gamma^k_ij at (k*m + i)*m + j
  std::vector<Jet> h_;      // h_ij at i*m + j
  std::vector<Jet> shape_;  // S^i_j at i*m + j, S d_j = S^i_j d_i
  std::vector<Jet> tau_;    // tau_i
  Jet theta;                // Theta(d_1, ..., d_m) = det[f_*d_1, ..., f_*d_m, C]
  Jet det_h;
  Jet omega_h;              // |det h|^{1/2}

  const Jet& gamma(int k, int i, int j) const { return gamma_[(k * dim + i) * dim + j]; }
  const Jet& h(int i, int j) const { return h_[i * dim + j]; }
  const Jet& shape(int i, int j) const { return shape_[i * dim + j]; }
  const Jet& tau(int i) const { return tau_[i]; }
};

namespace detail {

inline void check_hypersurface_dims(const SmoothMap& f, int transversal_dim) {
  if (f.codomain_dim() != f.domain_dim() + 1) {
    throw InvalidArgument("hypersurface needs codomain dimension = domain dimension + 1");
  }
  if (transversal_dim != f.codomain_dim()) {
    throw InvalidArgument("transversal field lives in the wrong ambient dimension");
  }
}

/// Frame [f_*d_1, ..., f_*d_m, extra...] as a jet matrix truncated to `order`.
inline Matrix<Jet> frame_matrix(const JetTensor& F, std::span<const JetTensor* const> extra, int order) {
  const std::size_t n = F.size();
  const int m = F.domain_dim();
  Matrix<Jet> a(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (int k = 0; k < m; ++k) a(r, k) = F[r].derivative(k).truncated(order);
    for (std::size_t e = 0; e < extra.size(); ++e) a(r, m + e) = (*extra[e])[r].truncated(order);
  }
  return a;
}

inline LUFactors<Jet> factor_frame(const Matrix<Jet>& frame) {
  try {
    return lu_factor(frame);
  } catch (const SingularSystemError& e) {
    throw FrameError(std::string("transversal frame is singular: ") + e.what());
  }
}

inline Jet zero_jet(int dim, int order) { return Jet::constant(dim, order, 0.0); }

template <class T>
T det_of(const std::vector<T>& sq, int m) {
  Matrix<T> a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = sq[i * m + j];
  return determinant(a);
}

}  // namespace detail

/// Gauss and Weingarten decomposition at p with jet-valued results of order
/// `order` (<= 2). Needs f to order+2 and C to order+1.
inline InducedObjects decompose(const Hypersurface& s, std::span<const double> p, int order = 0) {
  if (order < 0 || order > kMaxOrder - 2) throw OrderError("decompose supports orders 0..2");
  const int m = s.f.domain_dim();
  const JetTensor F = s.f.jet(p, order + 2);
  const JetTensor C = s.C.jet(p, order + 1);
  detail::check_hypersurface_dims(s.f, static_cast<int>(C.size()));

  const JetTensor* extra[] = {&C};
  const Matrix<Jet> frame = detail::frame_matrix(F, extra, order + 1);
  const LUFactors<Jet> lu = detail::factor_frame(frame);

  InducedObjects io;
  io.dim = m;
  io.order = order;
  io.gamma_.resize(m * m * m);
  io.h_.resize(m * m);
  io.shape_.resize(m * m);
  io.tau_.resize(m);
  std::vector<Jet> rhs(m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (int r = 0; r <= m; ++r) rhs[r] = F[r].derivative(i).derivative(j);
      const auto x = lu_solve(lu, rhs);
      for (int k = 0; k < m; ++k) {
        io.gamma_[(k * m + i) * m + j] = x[k];
        io.gamma_[(k * m + j) * m + i] = x[k];
      }
      io.h_[i * m + j] = x[m];
      io.h_[j * m + i] = x[m];
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r <= m; ++r) rhs[r] = C[r].derivative(i);
    const auto x = lu_solve(lu, rhs);
    for (int k = 0; k < m; ++k) io.shape_[k * m + i] = -x[k];
    io.tau_[i] = x[m];
  }
  io.theta = determinant(lu).truncated(order);
  io.det_h = detail::det_of(io.h_, m);
  io.omega_h = std::abs(io.det_h.value()) > 1e-300 ? sqrt(abs(io.det_h))
                                                  : detail::zero_jet(m, order);
  return io;
}

/// Max-norm residuals of the four fundamental equations (Gauss, Codazzi for h,
/// Codazzi for S, Ricci) over all coordinate index combinations.
struct FundamentalResiduals {
  double gauss = 0.0;
  double codazzi_h = 0.0;
  double codazzi_s = 0.0;
  double ricci = 0.0;

  double max() const { return std::max({gauss, codazzi_h, codazzi_s, ricci}); }
};

/// Components R^l_{k i j} of R(d_i, d_j) d_k = R^l_{kij} d_l for a connection
/// with jet-valued Christoffels (order >= 1), at (((l*m + k)*m + i)*m + j).
template <class GammaFn>
std::vector<double> riemann_from(int m, GammaFn gamma) {
  std::vector<double> r(m * m * m * m);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double v = gamma(l, j, k).d(i) - gamma(l, i, k).d(j);
          for (int a = 0; a < m; ++a) {
            v += gamma(l, i, a).value() * gamma(a, j, k).value() -
                 gamma(l, j, a).value() * gamma(a, i, k).value();
          }
          r[((l * m + k) * m + i) * m + j] = v;
        }
  return r;
}

inline FundamentalResiduals fundamental_residuals(const InducedObjects& io) {
  if (io.order < 1) throw OrderError("fundamental residuals need induced objects of order >= 1");
  const int m = io.dim;
  FundamentalResiduals out;
  auto G = [&](int k, int i, int j) -> const Jet& { return io.gamma(k, i, j); };
  const auto R = riemann_from(m, G);
  auto hv = [&](int i, int j) { return io.h(i, j).value(); };
  auto Sv = [&](int i, int j) { return io.shape(i, j).value(); };
  auto tv = [&](int i) { return io.tau(i).value(); };

  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const double rhs = hv(j, k) * Sv(l, i) - hv(i, k) * Sv(l, j);
          out.gauss = std::max(out.gauss, std::abs(R[((l * m + k) * m + i) * m + j] - rhs));
        }

  // (nabla_i h)_{jk} = d_i h_jk - Gamma^a_ij h_ak - Gamma^a_ik h_ja
  auto nabla_h = [&](int i, int j, int k) {
    double v = io.h(j, k).d(i);
    for (int a = 0; a < m; ++a) {
      v -= io.gamma(a, i, j).value() * hv(a, k) + io.gamma(a, i, k).value() * hv(j, a);
    }
    return v;
  };
  // ((nabla_i S) d_j)^l = d_i S^l_j + Gamma^l_ia S^a_j - S^l_a Gamma^a_ij
  auto nabla_S = [&](int i, int j, int l) {
    double v = io.shape(l, j).d(i);
    for (int a = 0; a < m; ++a) {
      v += io.gamma(l, i, a).value() * Sv(a, j) - Sv(l, a) * io.gamma(a, i, j).value();
    }
    return v;
  };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double ch = nabla_h(i, j, k) + tv(i) * hv(j, k) - nabla_h(j, i, k) - tv(j) * hv(i, k);
        out.codazzi_h = std::max(out.codazzi_h, std::abs(ch));
        const double cs = nabla_S(i, j, k) - tv(i) * Sv(k, j) - nabla_S(j, i, k) + tv(j) * Sv(k, i);
        out.codazzi_s = std::max(out.codazzi_s, std::abs(cs));
      }
  // h(X, SY) - h(SX, Y) = 2 dtau(X, Y) = X tau(Y) - Y tau(X) on coordinate fields.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double lhs = 0.0;
      for (int a = 0; a < m; ++a) lhs += hv(i, a) * Sv(a, j) - Sv(a, i) * hv(a, j);
      const double dtau2 = io.tau(j).d(i) - io.tau(i).d(j);
      out.ricci = std::max(out.ricci, std::abs(lhs - dtau2));
    }
  return out;
}

inline FundamentalResiduals fundamental_residuals(const Hypersurface& s, std::span<const double> p) {
  return fundamental_residuals(decompose(s, p, 1));
}

inline constexpr double kDegeneracyThreshold = 1e-12;
inline constexpr double kBlaschkeTolerance = 1e-8;

namespace detail {

/// Blaschke coefficients over the base frame of `trial`, at order `order`.
///
/// trial = a C0 + f_* W. A transversal change C = phi * trial + f_* Z gives
/// h = h_t / phi, Theta = phi Theta_t and tau = tau_t + d log phi + h_t(Z, .) / phi,
/// so phi = (|det h_t| / Theta_t^2)^{1/(m+2)} and h_t(Z, .) = -(d phi + phi tau_t).
inline TransversalField::FrameCoefficients blaschke_coefficients(const SmoothMap& f,
                                                                 const TransversalField& trial,
                                                                 std::span<const double> p,
                                                                 int order) {
  const int m = f.domain_dim();
  const auto& rel = trial.relative();
  const TransversalField& base = rel ? *rel->base : trial;
  TransversalField::FrameCoefficients in;
  if (rel) {
    in = rel->coefficients(p, order + 1);
  } else {
    in.a = Jet::constant(m, order + 1, 1.0);
    in.w.assign(m, Jet::constant(m, order + 1, 0.0));
  }
  const InducedObjects io = decompose(Hypersurface{f, base}, p, order + 1);

  const Jet inv_a = reciprocal(in.a);
  std::vector<Jet> ht(m * m);
  for (int i = 0; i < m * m; ++i) ht[i] = io.h_[i] * inv_a;
  const Jet theta_t = io.theta * in.a;
  std::vector<Jet> tau_t(m);
  for (int i = 0; i < m; ++i) {
    Jet hw = io.h(i, 0) * in.w[0];
    for (int k = 1; k < m; ++k) hw += io.h(i, k) * in.w[k];
    tau_t[i] = io.tau(i) + in.a.derivative(i) * inv_a + hw * inv_a;
  }
  const Jet det_t = det_of(ht, m);
  if (std::abs(det_t.value()) < kDegeneracyThreshold) {
    throw DegeneracyError("second fundamental form is degenerate (|det h| = " +
                          std::to_string(std::abs(det_t.value())) + ")");
  }
  const Jet phi = pow(abs(det_t) / (theta_t * theta_t), 1.0 / (m + 2));

  Matrix<Jet> hm(m, m);
  std::vector<Jet> rhs(m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) hm(i, k) = ht[i * m + k].truncated(order);
    rhs[i] = -(phi.derivative(i) + phi * tau_t[i]);
  }
  const std::vector<Jet> z = jet_solve(hm, rhs);

  TransversalField::FrameCoefficients out;
  out.a = (phi * in.a).truncated(order);
  for (int k = 0; k < m; ++k) out.w.push_back((phi * in.w[k] + z[k]).truncated(order));
  return out;
}

/// C = a C0 + f_* W as ambient jets of order `order`.
inline JetTensor field_from_frame(const SmoothMap& f, const TransversalField& base,
                                  const TransversalField::FrameCoefficients& c,
                                  std::span<const double> p, int order) {
  const int m = f.domain_dim();
  const JetTensor F = f.jet(p, order + 1);
  const JetTensor C0 = base.jet(p, order);
  std::vector<Jet> out;
  for (std::size_t r = 0; r < F.size(); ++r) {
    Jet v = c.a * C0[r];
    for (int k = 0; k < m; ++k) v += c.w[k] * F[r].derivative(k);
    out.push_back(v.truncated(order));
  }
  return JetTensor(std::move(out));
}

}  // namespace detail

/// Residuals of the two Blaschke conditions for a field at one point:
/// max |tau_i| and | omega_h - |Theta| | relative to max(1, |Theta|).
struct BlaschkeResiduals {
  double tau = 0.0;
  double volume = 0.0;
};

inline BlaschkeResiduals blaschke_residuals(const InducedObjects& io) {
  BlaschkeResiduals r;
  for (int i = 0; i < io.dim; ++i) r.tau = std::max(r.tau, std::abs(io.tau(i).value()));
  const double theta = std::abs(io.theta.value());
  r.volume = std::abs(io.omega_h.value() - theta) / std::max(1.0, theta);
  return r;
}

inline BlaschkeResiduals blaschke_residuals(const Hypersurface& s, const Grid& region) {
  BlaschkeResiduals worst;
  const auto all = parallel_map(region.size(), [&](std::size_t k) {
    return blaschke_residuals(decompose(s, region.point(k), 0));
  });
  for (const auto& r : all) {
    worst.tau = std::max(worst.tau, r.tau);
    worst.volume = std::max(worst.volume, r.volume);
  }
  return worst;
}

/// Affine normal field C = phi * trial + f_* Z (phi > 0, so the orientation of
/// the trial field is kept), expressed over the trial's base frame. It can be
/// evaluated to order min(1, order of the trial coefficients - 1). Failures
/// (degenerate h, singular frame) surface when the field is evaluated.
inline TransversalField blaschke_field(const SmoothMap& f, const TransversalField& trial) {
  const auto& rel = trial.relative();
  auto base = rel ? rel->base : std::make_shared<const TransversalField>(trial);
  const int base_limit = std::min(1, base->max_order() - 2);
  const int max_order = rel ? std::min(base_limit, rel->max_order - 1) : base_limit;
  if (max_order < 0) {
    throw OrderError("trial field '" + trial.label() + "' has too few derivatives for normalization");
  }
  auto coeffs = [f, trial](std::span<const double> p, int order) {
    return detail::blaschke_coefficients(f, trial, p, order);
  };
  auto eval = [f, base, coeffs](std::span<const double> p, int order) {
    return detail::field_from_frame(f, *base, coeffs(p, order), p, order);
  };
  TransversalField field(eval, max_order, "blaschke(" + trial.label() + ")");
  return field.with_relative({base, coeffs, max_order});
}

/// blaschke_field validated on a region. Throws DegeneracyError when
/// |det h| < 1e-12 on the region and NotBlaschkeError if the a-posteriori
/// check of both Blaschke conditions fails.
inline TransversalField blaschke_normalize(const SmoothMap& f, const TransversalField& trial,
                                           const Grid& region) {
  TransversalField field = blaschke_field(f, trial);
  const auto check = blaschke_residuals(Hypersurface{f, field}, region);
  if (check.tau >= kBlaschkeTolerance || check.volume >= kBlaschkeTolerance) {
    throw NotBlaschkeError("normalized field fails the Blaschke conditions (tau " +
                           std::to_string(check.tau) + ", volume " + std::to_string(check.volume) + ")");
  }
  return field;
}

/// max_ij |d_i d_j f - Gamma^k_ij f_* d_k - h_ij C| relative to max(1, |d_i d_j f|).
inline double reconstruction_residual(const Hypersurface& s, std::span<const double> p) {
  const InducedObjects io = decompose(s, p, 0);
  const JetTensor F = s.f.jet(p, 2);
  const JetTensor C = s.C.jet(p, 0);
  const int m = io.dim;
  double r = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const auto fij = F.d(i, j);
      double scale = 1.0;
      for (double v : fij) scale = std::max(scale, std::abs(v));
      for (std::size_t c = 0; c < fij.size(); ++c) {
        double v = fij[c] - io.h(i, j).value() * C[c].value();
        for (int k = 0; k < m; ++k) v -= io.gamma(k, i, j).value() * F[c].d(k);
        r = std::max(r, std::abs(v) / scale);
      }
    }
  return r;
}

struct AffineSphereResult {
  bool sphere = false;
  bool improper = false;
  double lambda = 0.0;
  double shape_residual = 0.0;  // max |S - lambda Id|
  double lambda_spread = 0.0;   // standard deviation of the pointwise mean eigenvalue
  std::vector<double> lambdas;  // per grid point
};

inline constexpr double kSphereTolerance = 1e-8;

/// Sphere test S = lambda Id with lambda constant over the region. The field
/// must be Blaschke; otherwise NotBlaschkeError.
inline AffineSphereResult is_affine_sphere(const Hypersurface& s, const Grid& region) {
  AffineSphereResult out;
  const std::vector<InducedObjects> ios =
      parallel_map(region.size(), [&](std::size_t k) { return decompose(s, region.point(k), 0); });
  for (const auto& io : ios) {
    const auto b = blaschke_residuals(io);
    if (b.tau >= kBlaschkeTolerance || b.volume >= kBlaschkeTolerance) {
      throw NotBlaschkeError("transversal field is not Blaschke (tau " + std::to_string(b.tau) +
                             ", volume " + std::to_string(b.volume) + ")");
    }
  }
  const int m = s.f.domain_dim();
  double sum = 0.0;
  for (const auto& io : ios) {
    double tr = 0.0;
    for (int i = 0; i < m; ++i) tr += io.shape(i, i).value();
    out.lambdas.push_back(tr / m);
    sum += tr / m;
  }
  out.lambda = sum / ios.size();
  double var = 0.0;
  for (double l : out.lambdas) var += (l - out.lambda) * (l - out.lambda);
  out.lambda_spread = std::sqrt(var / ios.size());
  for (const auto& io : ios)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double target = i == j ? out.lambda : 0.0;
        out.shape_residual = std::max(out.shape_residual, std::abs(io.shape(i, j).value() - target));
      }
  out.sphere = out.shape_residual < kSphereTolerance && out.lambda_spread < kSphereTolerance;
  out.improper = out.sphere && std::abs(out.lambda) < kSphereTolerance;
  return out;
}

/// Curvature quantities of the induced connection and of the affine metric h.
struct CurvatureData {
  int dim = 0;
  std::vector<double> riemann_affine;  // R^l_{kij} of nabla
  double gauss_residual = 0.0;         // max |R(X,Y)Z - h(Y,Z)SX + h(X,Z)SY|
  std::vector<double> levi_civita;     // hat Gamma^k_ij at (k*m + i)*m + j
  std::vector<double> riemann_metric;  // R^l_{kij} of hat nabla
  double metric_curvature_max = 0.0;   // max |hat R|
  std::vector<double> cubic;           // C_ijk = (nabla_i h)_jk
  double cubic_asymmetry = 0.0;        // max |C_ijk - C_jik|, |C_ijk - C_ikj|
  double cubic_parallel_residual = 0.0;  // max |(hat nabla C)|
  double pick = 0.0;                   // |K|_h^2 / (m (m - 1)), K = nabla - hat nabla
  std::vector<double> h;               // affine metric at the point

  double riemann_metric_at(int l, int k, int i, int j) const {
    return riemann_metric[((l * dim + k) * dim + i) * dim + j];
  }

  /// h(R(e_i, e_j) e_j, e_i) / (h_ii h_jj - h_ij^2) for the metric connection.
  double sectional_curvature(int i, int j) const {
    double num = 0.0;
    for (int l = 0; l < dim; ++l) num += h[i * dim + l] * riemann_metric_at(l, j, i, j);
    const double den = h[i * dim + i] * h[j * dim + j] - h[i * dim + j] * h[i * dim + j];
    return num / den;
  }
};

inline CurvatureData curvature(const InducedObjects& io) {
  if (io.order < 2) throw OrderError("curvature needs induced objects of order 2");
  const int m = io.dim;
  CurvatureData cd;
  cd.dim = m;
  for (int i = 0; i < m * m; ++i) cd.h.push_back(io.h_[i].value());
  if (std::abs(io.det_h.value()) < kDegeneracyThreshold) {
    throw DegeneracyError("affine metric is degenerate");
  }

  auto G = [&](int k, int i, int j) -> const Jet& { return io.gamma(k, i, j); };
  cd.riemann_affine = riemann_from(m, G);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const double rhs = io.h(j, k).value() * io.shape(l, i).value() -
                             io.h(i, k).value() * io.shape(l, j).value();
          cd.gauss_residual = std::max(
              cd.gauss_residual, std::abs(cd.riemann_affine[((l * m + k) * m + i) * m + j] - rhs));
        }

  // Inverse metric as jets (order 2), then Levi-Civita Christoffels (order 1).
  Matrix<Jet> hm(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) hm(i, j) = io.h(i, j);
  const auto lu = lu_factor(hm);
  std::vector<Jet> hinv(m * m);
  for (int c = 0; c < m; ++c) {
    std::vector<Jet> e(m, Jet::constant(m, io.order, 0.0));
    e[c] = Jet::constant(m, io.order, 1.0);
    const auto col = lu_solve(lu, e);
    for (int r = 0; r < m; ++r) hinv[r * m + c] = col[r];
  }
  std::vector<Jet> lc(m * m * m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Jet acc = Jet::constant(m, io.order - 1, 0.0);
        for (int l = 0; l < m; ++l) {
          acc += hinv[k * m + l] *
                 (io.h(j, l).derivative(i) + io.h(i, l).derivative(j) - io.h(i, j).derivative(l));
        }
        lc[(k * m + i) * m + j] = acc * 0.5;
      }
  for (const Jet& g : lc) cd.levi_civita.push_back(g.value());
  auto LC = [&](int k, int i, int j) -> const Jet& { return lc[(k * m + i) * m + j]; };
  cd.riemann_metric = riemann_from(m, LC);
  for (double v : cd.riemann_metric) cd.metric_curvature_max = std::max(cd.metric_curvature_max, std::abs(v));

  // Cubic form C_ijk = (nabla_i h)_jk as order-1 jets.
  std::vector<Jet> cubic(m * m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        Jet v = io.h(j, k).derivative(i);
        for (int a = 0; a < m; ++a) {
          v -= io.gamma(a, i, j) * io.h(a, k) + io.gamma(a, i, k) * io.h(j, a);
        }
        cubic[(i * m + j) * m + k] = v;
      }
  auto Cv = [&](int i, int j, int k) { return cubic[(i * m + j) * m + k].value(); };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        cd.cubic.push_back(Cv(i, j, k));
        cd.cubic_asymmetry = std::max(
            {cd.cubic_asymmetry, std::abs(Cv(i, j, k) - Cv(j, i, k)), std::abs(Cv(i, j, k) - Cv(i, k, j))});
      }
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          double v = cubic[(i * m + j) * m + k].d(l);
          for (int a = 0; a < m; ++a) {
            v -= LC(a, l, i).value() * Cv(a, j, k) + LC(a, l, j).value() * Cv(i, a, k) +
                 LC(a, l, k).value() * Cv(i, j, a);
          }
          cd.cubic_parallel_residual = std::max(cd.cubic_parallel_residual, std::abs(v));
        }

  // Pick invariant from the difference tensor K^k_ij = Gamma^k_ij - hat Gamma^k_ij.
  std::vector<double> K(m * m * m);
  for (int t = 0; t < m * m * m; ++t) K[t] = io.gamma_[t].value() - lc[t].value();
  auto hi = [&](int a, int b) { return hinv[a * m + b].value(); };
  double norm2 = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          for (int mm = 0; mm < m; ++mm)
            for (int n = 0; n < m; ++n) {
              norm2 += hi(i, l) * hi(j, mm) * io.h(k, n).value() * K[(k * m + i) * m + j] *
                       K[(n * m + l) * m + mm];
            }
  cd.pick = norm2 / std::max(1, m * (m - 1));
  return cd;
}

inline CurvatureData curvature(const Hypersurface& s, std::span<const double> p) {
  return curvature(decompose(s, p, 2));
}

}  // namespace affsph
