#include <cmath>
#include <random>
#include <vector>

#include "affsph/affsph.hpp"
#include "catch_amalgamated.hpp"
#include "oracles.hpp"

using namespace affsph;
using Catch::Approx;

namespace {

Hypersurface blaschke_sphere(const std::string& name) {
  const Family fam = named_family(name);
  const double lambda = oracle::centro_lambda(fam.f, fam.f.domain().center());
  return {fam.f, scaled(-lambda, fam.f)};
}

// W = 2x^2 d_x + d_y + 2x d_z with exact first-order jets at p.
VectorField example_w(const std::vector<double>& p) {
  const Jet x = Jet::variable(3, 1, 0, p[0]);
  return VectorField{{2.0 * x * x, Jet::constant(3, 1, 1.0), 2.0 * x}, "W"};
}

std::vector<double> values(const VectorField& v) {
  std::vector<double> r;
  for (const auto& c : v.c) r.push_back(c.value());
  return r;
}

}  // namespace

TEST_CASE("para-complex structure swaps blocks") {
  CHECK(jtilde(std::vector<double>{1, 2, 3, 4}) == std::vector<double>{3, 4, 1, 2});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> v(2 * n + 2);
    for (double& x : v) x = u(rng);
    CHECK(jtilde(jtilde(v)) == v);
    std::vector<double> plus(v.size());
    const auto jv = jtilde(v);
    for (std::size_t i = 0; i < v.size(); ++i) plus[i] = v[i] + jv[i];
    CHECK(jtilde(plus) == plus);
  }
  CHECK_THROWS_AS(jtilde(std::vector<double>{1, 2, 3}), InvalidArgument);
}

TEST_CASE("para-complex structure invariants") {
  for (int n = 0; n <= 4; ++n) {
    const ParaStructure J(n + 1);
    const auto m = J.matrix();
    const std::size_t k = m.size();
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      trace += m[i][i];
      for (std::size_t j = 0; j < k; ++j) {
        double sq = 0.0;
        for (std::size_t l = 0; l < k; ++l) sq += m[i][l] * m[l][j];
        CHECK(sq == (i == j ? 1.0 : 0.0));
      }
    }
    CHECK(trace == 0.0);
    const int expected = (n + 1) % 2 == 0 ? 1 : -1;
    CHECK(J.determinant() == expected);
    CHECK(oracle::det_rows(m) == Approx(expected));
    // Each eigenvalue +-1 has multiplicity n+1: J + t Id has det (t^2 - 1)^{n+1}.
    auto shifted = m;
    for (std::size_t i = 0; i < k; ++i) shifted[i][i] += 2.0;
    CHECK(oracle::det_rows(shifted) == Approx(std::pow(3.0, n + 1)));
  }
}

TEST_CASE("D of f1 at the origin is spanned by d_x and d_y") {
  const Hypersurface s = blaschke_sphere("f1");
  const std::vector<double> o{0.0, 0.0, 0.0};
  const JetTensor F = s.f.jet(o, 1);
  CHECK(jtilde(F.d(0)) == F.d(0));
  const auto jy = jtilde(F.d(1));
  for (int c = 0; c < 4; ++c) CHECK(jy[c] == -F.d(1)[c]);

  const DistributionBasis db = distribution_D(s, o);
  REQUIRE(db.all().size() == 2);
  for (const auto& v : db.all()) CHECK(std::abs(v.c[2].value()) < 1e-12);
  const auto a = values(db.plus[0]), b = values(db.minus[0]);
  CHECK(std::abs(a[0] * b[1] - a[1] * b[0]) > 1e-6);
}

TEST_CASE("D of the non-involutive example contains d_x and W") {
  const Family ex = named_family("example-noninvolutive");
  for (const auto& p : oracle::random_points(ex.f.domain(), 5, 2)) {
    const ParacontactFrame pf = induced_paracontact(ex.hypersurface(), p);
    const VectorField dx = coordinate_field(3, 0, 1);
    const VectorField w = example_w(p);
    const auto pdx = values(pf.apply_phi(dx));
    const auto pw = values(pf.apply_phi(w));
    const auto wv = values(w);
    for (int i = 0; i < 3; ++i) {
      CHECK(pdx[i] == Approx(i == 0 ? 1.0 : 0.0).margin(1e-12));
      CHECK(pw[i] == Approx(-wv[i]).margin(1e-12));
    }
    const DistributionBasis db = distribution_D(pf);
    const auto plus = values(db.plus[0]);
    const auto minus = values(db.minus[0]);
    for (int i = 0; i < 3; ++i) {
      CHECK(plus[i] == Approx(i == 0 ? 1.0 : 0.0).margin(1e-12));
      CHECK(minus[i] == Approx(wv[i]).margin(1e-12));
    }
  }
}

TEST_CASE("D is the kernel of eta on f2") {
  const Hypersurface s = blaschke_sphere("f2");
  for (const auto& p : oracle::random_points(s.f.domain(), 10, 4)) {
    const ParacontactFrame pf = induced_paracontact(s, p);
    CHECK(d_kernel_residual(pf, distribution_D(pf)) <= 1e-10);
  }
}

TEST_CASE("xi of f1 is lambda d_z") {
  const Hypersurface s = blaschke_sphere("f1");
  const double lambda = calabi_lambda(1, 1, 1);
  for (const auto& p : oracle::random_points(s.f.domain(), 5, 6)) {
    const ParacontactFrame pf = induced_paracontact(s, p);
    CHECK(pf.xi[0].value() == Approx(0.0).margin(1e-12));
    CHECK(pf.xi[1].value() == Approx(0.0).margin(1e-12));
    CHECK(pf.xi[2].value() == Approx(lambda).epsilon(1e-12));
  }
}

TEST_CASE("almost paracontact identities") {
  const Family f3 = named_family("f3");
  for (const auto& p : oracle::random_points(f3.f.domain(), 50, 7)) {
    const ParacontactFrame pf = induced_paracontact(f3.hypersurface(), p);
    CHECK(detail::eta_value(pf, pf.xi_field()) == Approx(1.0).epsilon(1e-12));
  }
  const Family ex = named_family("example-noninvolutive");
  for (const auto& p : oracle::random_points(ex.f.domain(), 50, 8)) {
    const ParacontactFrame pf = induced_paracontact(ex.hypersurface(), p);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double sq = 0.0;
        for (int k = 0; k < 3; ++k) sq += pf.phi(i, k).value() * pf.phi(k, j).value();
        worst = std::max(worst, std::abs(sq - (i == j) + pf.eta[j].value() * pf.xi[i].value()));
      }
    CHECK(worst < 1e-10);
    CHECK(paracontact_frame_residual(pf) <= 1e-10);
  }
}

TEST_CASE("J~C must be tangent") {
  const Family f1 = named_family("f1");
  const SmoothMap up({Expr(0.0), Expr(0.0), Expr(1.0), Expr(0.3)}, f1.f.domain());
  const std::vector<double> p{0.1, 0.2, 0.3};
  CHECK(jtangency_check({f1.f, up}, p) > 1e-3);
  CHECK_THROWS_AS(induced_paracontact({f1.f, up}, p), NotJTangentError);
}

TEST_CASE("six identities of the induced structure") {
  for (const char* name : {"f1", "f2", "f4"}) {
    const Hypersurface s = blaschke_sphere(name);
    for (const auto& p : oracle::random_points(s.f.domain(), 5, 10)) {
      const auto pf = induced_paracontact(s, p);
      const auto r = paracontact_residuals(s, p, distribution_D(pf).all(), 3);
      CHECK(r.max() < 1e-8);
    }
  }
  const Family ex = named_family("example-noninvolutive");
  for (const auto& p : oracle::random_points(ex.f.domain(), 5, 11)) {
    const auto r = paracontact_residuals(ex.hypersurface(), p, {example_w(p)}, 4);
    CHECK(r.max() < 1e-8);
  }
}

TEST_CASE("eta of the bracket of d_x and W is 2") {
  const Family ex = named_family("example-noninvolutive");
  for (const auto& p : oracle::random_points(ex.f.domain(), 10, 12)) {
    const ParacontactFrame pf = induced_paracontact(ex.hypersurface(), p);
    const VectorField dx = coordinate_field(3, 0, 1);
    const VectorField w = example_w(p);
    CHECK(detail::eta_value(pf, bracket(dx, w)) == Approx(2.0).epsilon(1e-9));
    const InducedObjects io = decompose(ex.hypersurface(), p);
    CHECK(-2.0 * detail::form(io, values(dx), values(w)) == Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("involutivity of D") {
  for (const char* name : {"f1", "f2", "f3", "f4"}) {
    const Hypersurface s = blaschke_sphere(name);
    const auto r = involutivity_check(s, Grid::uniform(s.f.domain(), 3));
    CHECK(r.involutive);
  }
  const Family ex = named_family("example-noninvolutive");
  const auto r = involutivity_check(ex.hypersurface(), Grid::uniform(ex.f.domain(), 4));
  CHECK_FALSE(r.involutive);
  CHECK(std::abs(r.witness_value) == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("D needs an odd-dimensional hypersurface") {
  ParacontactFrame pf;
  pf.dim = 2;
  CHECK_THROWS_AS(distribution_D(pf), StructureError);
}

TEST_CASE("codimension-two decomposition of pair constructions") {
  for (const char* name : {"pair:ellipse:ellipse", "pair:hyperbola:hyperbola", "pair:ellipse:hyperbola",
                           "pair:sphere2:hyperboloid2"}) {
    const Family fam = named_family(name);
    for (const auto& p : oracle::random_points(fam.f.domain(), 5, 13)) {
      const CodimTwoInduced ci = decompose2(fam.codim_two(), p);
      for (int i = 0; i < ci.dim; ++i) {
        CHECK(ci.tau1(i) == Approx(0.0).margin(1e-12));
        CHECK(ci.tau2(i) == Approx(0.0).margin(1e-12));
        for (int j = 0; j < ci.dim; ++j) CHECK(ci.shape(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-12));
      }
      CHECK(ci.paraholomorphic_residual < 1e-12);
      CHECK(lemma_h1h2_residual(ci) < 1e-10);
      CHECK(h_zeta_basis_residual(ci, 3) < 1e-10);
    }
  }
}

TEST_CASE("radial affine normal of a pair") {
  const Family ee = named_family("pair:ellipse:ellipse");
  const Grid g = Grid::uniform(ee.f.domain(), 4);
  const auto an = normalize_affine_normal2(ee.codim_two(), g);
  CHECK(an.alpha == Approx(oracle::radial_alpha(ee.f, g.point(3))).epsilon(1e-12));
  CHECK(an.alpha == Approx(std::pow(2.0, -4.0 / 3.0)).epsilon(1e-12));
  CHECK(an.sphere);
  CHECK(an.h_residual < 1e-8);
  CHECK(an.tau_residual < 1e-8);
  CHECK(lambda_from_alpha(an.alpha, 1) == Approx(calabi_lambda(1, 1, 1)).epsilon(1e-10));

  const auto again = normalize_affine_normal2({ee.f, an.zeta}, g);
  CHECK(again.rescale == Approx(1.0).epsilon(1e-12));
  CHECK(again.alpha == Approx(an.alpha).epsilon(1e-12));

  const Family eh = named_family("pair:ellipse:hyperbola");
  const auto b = normalize_affine_normal2(eh.codim_two(), Grid::uniform(eh.f.domain(), 4));
  CHECK(b.alpha_spread < 1e-10);
  CHECK(b.h_residual < 1e-8);
}

TEST_CASE("affine normal of a non-radial field is refused") {
  const Family ee = named_family("pair:ellipse:ellipse");
  const SmoothMap tilted({Expr(1.0), Expr(0.0), Expr(0.0), Expr(1.0) + Expr::coordinate(0)}, ee.f.domain());
  CHECK_THROWS_AS(normalize_affine_normal2({ee.f, tilted}, Grid::uniform(ee.f.domain(), 2)), NonCentroAffineError);
}
