#include <cmath>
#include <vector>

#include "affsph/affsph.hpp"
#include "catch_amalgamated.hpp"
#include "oracles.hpp"

using namespace affsph;
using Catch::Approx;

namespace {

const Expr X = Expr::coordinate(0);
const Expr Y = Expr::coordinate(1);

SmoothMap paraboloid() { return named_family("paraboloid").f; }
SmoothMap constant_up(const SmoothMap& f) { return SmoothMap({Expr(0.0), Expr(0.0), Expr(1.0)}, f.domain()); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

}  // namespace

TEST_CASE("graph paraboloid with a constant field") {
  const SmoothMap f = paraboloid();
  const InducedObjects io = decompose({f, constant_up(f)}, std::vector<double>{0.3, -0.2});
  for (int i = 0; i < 2; ++i) {
    CHECK(io.tau(i).value() == Approx(0.0).margin(1e-14));
    for (int j = 0; j < 2; ++j) {
      CHECK(io.h(i, j).value() == Approx(i == j ? 2.0 : 0.0).margin(1e-14));
      CHECK(io.shape(i, j).value() == Approx(0.0).margin(1e-14));
      for (int k = 0; k < 2; ++k) CHECK(io.gamma(k, i, j).value() == Approx(0.0).margin(1e-14));
    }
  }
}

TEST_CASE("ellipse with the centro-affine field") {
  const Family e = named_family("ellipse");
  const InducedObjects io = decompose(e.hypersurface(), std::vector<double>{0.4});
  CHECK(io.gamma(0, 0, 0).value() == Approx(0.0).margin(1e-14));
  CHECK(io.h(0, 0).value() == Approx(1.0));
  CHECK(io.shape(0, 0).value() == Approx(1.0));
  CHECK(io.tau(0).value() == Approx(0.0).margin(1e-14));
}

TEST_CASE("non-involutive example has the closed-form second fundamental form") {
  const Family ex = named_family("example-noninvolutive");
  for (const auto& p : oracle::random_points(ex.f.domain(), 20, 3)) {
    const InducedObjects io = decompose(ex.hypersurface(), p);
    const auto h = oracle::example_h(p[0]);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(io.tau(i).value()) < 1e-10);
      for (int j = 0; j < 3; ++j) {
        CHECK(io.h(i, j).value() == Approx(h[i][j]).margin(1e-9));
        CHECK(io.shape(i, j).value() == Approx(i == j ? 1.0 : 0.0).margin(1e-9));
      }
    }
    CHECK(io.omega_h.value() == Approx(std::abs(io.theta.value())).epsilon(1e-8));
  }
}

TEST_CASE("second fundamental form matches Cramer's rule") {
  for (const char* name : {"f1", "f3", "sphere2", "xyz", "cp:ellipse:hyperbola"}) {
    const Family fam = named_family(name);
    for (const auto& p : oracle::random_points(fam.f.domain(), 3, 9)) {
      const auto ref = oracle::centro(fam.f, p);
      const InducedObjects io = decompose(fam.hypersurface(), p);
      for (int i = 0; i < fam.dim(); ++i)
        for (int j = 0; j < fam.dim(); ++j) CHECK(io.h(i, j).value() == Approx(ref.h[i][j]).margin(1e-10));
      CHECK(io.theta.value() == Approx(ref.theta).epsilon(1e-12));
    }
  }
}

TEST_CASE("induced objects are symmetric and reconstruct the second derivatives") {
  for (const char* name : {"f2", "hyperboloid1", "example-noninvolutive", "torus-quadric-1"}) {
    const Family fam = named_family(name);
    const Hypersurface s{fam.f, detail::perturbed_field(fam.f, fam.C, 0.1)};
    for (const auto& p : oracle::random_points(fam.f.domain(), 5, 4)) {
      const InducedObjects io = decompose(s, p);
      const int m = io.dim;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          CHECK(io.h(i, j).value() == Approx(io.h(j, i).value()).margin(1e-12));
          for (int k = 0; k < m; ++k)
            CHECK(io.gamma(k, i, j).value() == Approx(io.gamma(k, j, i).value()).margin(1e-12));
        }
      CHECK(reconstruction_residual(s, p) <= 1e-10);
    }
  }
}

TEST_CASE("a tangent field is not transversal") {
  const SmoothMap f = paraboloid();
  const SmoothMap tangent({Expr(1.0), Expr(0.0), Expr(2.0) * X}, f.domain());
  CHECK_THROWS_AS(decompose({f, tangent}, std::vector<double>{0.1, 0.2}), FrameError);
}

TEST_CASE("fundamental equations hold for the Blaschke field of f1") {
  const Family fam = named_family("f1");
  const double lambda = calabi_lambda(1.0, 1.0, 1);
  const Hypersurface s{fam.f, scaled(-lambda, fam.f)};
  for (const auto& p : oracle::random_points(fam.f.domain(), 10, 21)) {
    CHECK(fundamental_residuals(s, p).max() < 1e-8);
  }
}

TEST_CASE("ellipse Gauss residual vanishes") {
  const Family e = named_family("ellipse");
  const auto r = fundamental_residuals(e.hypersurface(), std::vector<double>{0.7});
  CHECK(r.gauss == 0.0);
}

TEST_CASE("fundamental equations hold for a non-equiaffine transversal field") {
  const Family fam = named_family("f1");
  const Hypersurface s{fam.f, detail::perturbed_field(fam.f, fam.C, 0.1)};
  const double step = 1e-5;
  for (const auto& p : oracle::random_points(fam.f.domain(), 6, 33, 0.8)) {
    const auto r = fundamental_residuals(s, p);
    CHECK(r.max() < 1e-8);

    // d tau from the jets against central differences of tau values.
    const InducedObjects io = decompose(s, p, 1);
    double dtau = 0.0, worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        auto lo = p, hi = p;
        lo[i] -= step;
        hi[i] += step;
        const double fd = (decompose(s, hi).tau(j).value() - decompose(s, lo).tau(j).value()) / (2 * step);
        worst = std::max(worst, std::abs(fd - io.tau(j).d(i)));
        dtau = std::max(dtau, std::abs(io.tau(j).d(i) - io.tau(i).d(j)));
      }
    CHECK(worst < 1e-7);
    CHECK(dtau > 1e-3);
  }
}

TEST_CASE("Blaschke normalization of the paraboloid") {
  const SmoothMap f = paraboloid();
  const Grid g = Grid::uniform(f.domain(), 4);
  const TransversalField n = blaschke_normalize(f, constant_up(f), g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto v = n.jet(g.point(k), 0).value();
    CHECK(max_abs_diff(v, {0.0, 0.0, std::sqrt(2.0)}) < 1e-12);
  }
  const auto sph = is_affine_sphere({f, n}, g);
  CHECK(sph.sphere);
  CHECK(sph.improper);
}

TEST_CASE("Blaschke normalization of -2f returns -f") {
  for (const char* name : {"ellipse", "example-noninvolutive"}) {
    const Family fam = named_family(name);
    const Grid g = Grid::uniform(fam.f.domain(), 3);
    const TransversalField n = blaschke_normalize(fam.f, scaled(-2.0, fam.f), g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto p = g.point(k);
      CHECK(max_abs_diff(n.jet(p, 0).value(), oracle::neg(fam.f(p))) < 1e-10);
    }
  }
}

TEST_CASE("Blaschke normalization is idempotent") {
  // The output is re-fed as its closed form (-lambda f, or the constant
  // paraboloid normal), which carries the derivatives a second pass needs.
  for (const char* name : {"f1", "hyperboloid2", "xyz", "paraboloid"}) {
    const Family fam = named_family(name);
    const Grid g = Grid::uniform(fam.f.domain(), 2);
    const TransversalField once = blaschke_normalize(fam.f, fam.C, g);
    const auto v0 = once.jet(g.point(0), 0).value();
    SmoothMap closed;
    if (fam.centro_affine) {
      const auto f0 = fam.f(g.point(0));
      double num = 0.0, den = 0.0;
      for (std::size_t c = 0; c < f0.size(); ++c) {
        num += v0[c] * f0[c];
        den += f0[c] * f0[c];
      }
      closed = scaled(num / den, fam.f);
    } else {
      closed = SmoothMap({Expr(v0[0]), Expr(v0[1]), Expr(v0[2])}, fam.f.domain());
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto p = g.point(k);
      CHECK(max_abs_diff(once.jet(p, 0).value(), closed(p)) < 1e-10);
    }
    const TransversalField twice = blaschke_normalize(fam.f, closed, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto p = g.point(k);
      CHECK(max_abs_diff(once.jet(p, 0).value(), twice.jet(p, 0).value()) < 1e-10);
    }
  }
}

TEST_CASE("Blaschke conditions separate examples from perturbed non-examples") {
  for (const char* name : {"f2", "sphere2", "x2y2z"}) {
    const Family fam = named_family(name);
    const Grid g = Grid::uniform(fam.f.domain(), 3);
    const auto n = blaschke_normalize(fam.f, fam.C, g);
    const auto r = blaschke_residuals(Hypersurface{fam.f, n}, g);
    CHECK(r.tau < 1e-8);
    CHECK(r.volume < 1e-8);
  }
  const Family e = named_family("ellipse");
  const Grid ge = Grid::uniform(e.f.domain(), 3);
  const auto scaled_r = blaschke_residuals(Hypersurface{e.f, scaled(-2.0, e.f)}, ge);
  CHECK(scaled_r.volume > 1e-3);
  const Family f1 = named_family("f1");
  const Grid g1 = Grid::uniform(f1.f.domain(), 2);
  const auto tilted = blaschke_residuals(Hypersurface{f1.f, detail::perturbed_field(f1.f, f1.C, 0.1)}, g1);
  CHECK(tilted.tau > 1e-3);
}

TEST_CASE("degenerate second fundamental form is a hard error") {
  const SmoothMap cylinder({X, Y, X * X}, Box({{-1.0, 1.0}, {-1.0, 1.0}}), true);
  const Grid g = Grid::uniform(cylinder.domain(), 2);
  CHECK_THROWS_AS(blaschke_normalize(cylinder, constant_up(cylinder), g), DegeneracyError);
}

TEST_CASE("sphere test") {
  const Family ex = named_family("example-noninvolutive");
  const auto r = is_affine_sphere(ex.hypersurface(), Grid::uniform(ex.f.domain(), 4));
  CHECK(r.sphere);
  CHECK(r.lambda == Approx(1.0).epsilon(1e-12));

  const Family f1 = named_family("f1");
  const Grid g = Grid::uniform(f1.f.domain(), 4);
  const auto n = blaschke_normalize(f1.f, f1.C, g);
  const auto s = is_affine_sphere({f1.f, n}, g);
  CHECK(s.sphere);
  CHECK(s.lambda_spread < 1e-8);
  CHECK(s.lambda == Approx(std::pow(2.0, -1.6)).epsilon(1e-10));
  CHECK(s.lambda == Approx(oracle::centro_lambda(f1.f, g.point(5))).epsilon(1e-10));

  const Family e = named_family("ellipse");
  CHECK_THROWS_AS(is_affine_sphere({e.f, scaled(-2.0, e.f)}, Grid::uniform(e.f.domain(), 3)), NotBlaschkeError);
}

TEST_CASE("f1 is flat with parallel cubic form") {
  const Family fam = named_family("f1");
  const Hypersurface s{fam.f, scaled(-calabi_lambda(1.0, 1.0, 1), fam.f)};
  for (const auto& p : oracle::random_points(fam.f.domain(), 5, 8)) {
    const CurvatureData cd = curvature(s, p);
    CHECK(cd.metric_curvature_max < 1e-6);
    CHECK(cd.cubic_parallel_residual < 1e-6);
    CHECK(cd.gauss_residual < 1e-8);
    CHECK(cd.cubic_asymmetry < 1e-9);
  }
}

TEST_CASE("affine metric of the unit sphere has curvature 1") {
  const Family fam = named_family("sphere2");
  for (const auto& p : oracle::random_points(fam.f.domain(), 5, 12)) {
    const CurvatureData cd = curvature(fam.hypersurface(), p);
    // Round metric in the chart: du^2 + cos^2 u dv^2.
    CHECK(cd.h[0] == Approx(1.0));
    CHECK(cd.h[3] == Approx(std::cos(p[0]) * std::cos(p[0])));
    CHECK(cd.sectional_curvature(0, 1) == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("xyz = 1 has nonzero Pick invariant") {
  const Family fam = named_family("xyz");
  const double lambda = oracle::centro_lambda(fam.f, {0.1, 0.2});
  const CurvatureData cd = curvature({fam.f, scaled(-lambda, fam.f)}, std::vector<double>{0.1, 0.2});
  CHECK(std::abs(cd.pick) > 1e-3);
  CHECK(cd.cubic_asymmetry < 1e-9);
}

TEST_CASE("curvature needs second-order induced objects") {
  const Family fam = named_family("ellipse");
  CHECK_THROWS_AS(curvature(decompose(fam.hypersurface(), std::vector<double>{0.1}, 1)), OrderError);
}
