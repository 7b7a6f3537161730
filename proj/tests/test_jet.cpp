#include <cmath>
#include <random>
#include <vector>

#include "affsph/affsph.hpp"
#include "catch_amalgamated.hpp"

using namespace affsph;
using Catch::Approx;

namespace {

// Random expression over three coordinates; every primitive stays finite on [-1, 1]^3.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> axis(0, 2);
  switch (pick(rng)) {
    case 0:
      return Expr::coordinate(axis(rng));
    case 1:
      return Expr(coef(rng)) * Expr::coordinate(axis(rng)) + Expr(coef(rng));
    case 2:
      return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3:
      return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 4:
      return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 5:
      return pow(Expr(2.0) + sin(random_expr(rng, depth - 1)), 1.5 + coef(rng));
    case 6:
      return exp(sin(random_expr(rng, depth - 1)));
    case 7:
      return cos(random_expr(rng, depth - 1));
    case 8:
      return sinh(Expr(0.5) * sin(random_expr(rng, depth - 1)));
    default:
      return cosh(Expr(0.5) * cos(random_expr(rng, depth - 1)));
  }
}

Box cube() { return Box({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}); }

// Order-k partials of `map` along `axis` against central differences of order-(k-1) jets.
double fd_mismatch(const SmoothMap& map, const std::vector<double>& p, int k, int axis) {
  const double step = 1e-5;
  auto lo = p, hi = p;
  lo[axis] -= step;
  hi[axis] += step;
  const JetTensor exact = map.jet(p, k);
  const JetTensor a = map.jet(lo, k - 1);
  const JetTensor b = map.jet(hi, k - 1);
  double worst = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) {
    const Jet d = exact[c].derivative(axis);
    const auto dc = d.coefficients();
    const auto ac = a[c].coefficients();
    const auto bc = b[c].coefficients();
    for (std::size_t i = 0; i < dc.size(); ++i) {
      const double fd = (bc[i] - ac[i]) / (2.0 * step);
      worst = std::max(worst, std::abs(dc[i] - fd) / std::max(1.0, std::abs(dc[i])));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("cosh at zero has value 1, slope 0, curvature 1") {
  const SmoothMap m({cosh(Expr::coordinate(0))}, Box({{-1.0, 1.0}}));
  const JetTensor j = m.jet(std::vector<double>{0.0}, 2);
  CHECK(j[0].value() == 1.0);
  CHECK(j[0].d(0) == 0.0);
  CHECK(j[0].d(0, 0) == 1.0);
}

TEST_CASE("product rule for x*y at (2,3)") {
  const SmoothMap m({Expr::coordinate(0) * Expr::coordinate(1)}, Box({{0.0, 5.0}, {0.0, 5.0}}));
  const JetTensor j = m.jet(std::vector<double>{2.0, 3.0}, 1);
  CHECK(j[0].value() == 6.0);
  CHECK(j[0].d(0) == 3.0);
  CHECK(j[0].d(1) == 2.0);
}

TEST_CASE("first jet of the ellipse-ellipse sphere at the origin") {
  // Hand differentiation of the closed form.
  const SmoothMap f = named_family("f1").f;
  const JetTensor j = f.jet(std::vector<double>{0.0, 0.0, 0.0}, 1);
  const std::vector<double> value{2, 0, 0, 0}, fx{0, 1, 0, 1}, fy{0, 1, 0, -1}, fz{0, 0, -2, 0};
  for (int c = 0; c < 4; ++c) {
    CHECK(j[c].value() == Approx(value[c]).margin(1e-15));
    CHECK(j[c].d(0) == Approx(fx[c]).margin(1e-15));
    CHECK(j[c].d(1) == Approx(fy[c]).margin(1e-15));
    CHECK(j[c].d(2) == Approx(fz[c]).margin(1e-15));
  }
}

TEST_CASE("mixed partials are symmetric by construction") {
  const Expr x = Expr::coordinate(0), y = Expr::coordinate(1);
  const SmoothMap m({sin(x * y) * exp(y)}, Box({{-2.0, 2.0}, {-2.0, 2.0}}));
  const JetTensor j = m.jet(std::vector<double>{0.3, -0.7}, 3);
  CHECK(j[0].d(0, 1) == j[0].d(1, 0));
  CHECK(j[0].partial(multi_index({2, 1})) == j[0].derivative(1).derivative(0).d(0));
}

TEST_CASE("jet evaluation rejects bad input") {
  const SmoothMap m({pow(Expr::coordinate(0), -1.0)}, Box({{-1.0, 1.0}}));
  CHECK_THROWS_AS(m.jet(std::vector<double>{0.5}, 5), OrderError);
  CHECK_THROWS_AS(m.jet(std::vector<double>{2.0}, 1), DomainError);
  CHECK_THROWS_AS(m.jet(std::vector<double>{0.0}, 1), NonFiniteError);
}

TEST_CASE("jets agree with central differences for random compositions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const SmoothMap map({random_expr(rng, 3)}, cube());
    const std::vector<double> p{u(rng), u(rng), u(rng)};
    for (int k = 1; k <= kMaxOrder; ++k) worst = std::max(worst, fd_mismatch(map, p, k, trial % 3));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("each primitive agrees with central differences") {
  const Expr x = Expr::coordinate(0), y = Expr::coordinate(1), z = Expr::coordinate(2);
  const std::vector<Expr> prims{x + y, x - z, x * y * z, pow(Expr(2.0) + x, 2.5), exp(y), sin(z),
                                cos(x),  sinh(y), cosh(z), -x};
  const std::vector<double> p{0.2, -0.4, 0.6};
  for (const Expr& e : prims) {
    const SmoothMap map({e}, cube());
    for (int k = 1; k <= kMaxOrder; ++k)
      for (int a = 0; a < 3; ++a) CHECK(fd_mismatch(map, p, k, a) < 1e-6);
  }
}

TEST_CASE("solving with the identity returns the right-hand side") {
  Matrix<Jet> id(3, 3, Jet::constant(2, 2, 0.0));
  for (int i = 0; i < 3; ++i) id(i, i) = Jet::constant(2, 2, 1.0);
  const std::vector<Jet> rhs{Jet::variable(2, 2, 0, 0.5), Jet::variable(2, 2, 1, -1.0),
                             Jet::variable(2, 2, 0, 0.5) * Jet::variable(2, 2, 1, -1.0)};
  const auto x = jet_solve(id, rhs);
  for (int i = 0; i < 3; ++i) {
    const auto a = x[i].coefficients();
    const auto b = rhs[i].coefficients();
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  }
}

TEST_CASE("1x1 solve follows the quotient rule") {
  const Jet t = Jet::variable(1, 1, 0, 0.0);
  Matrix<Jet> a(1, 1, 1.0 + t);
  const auto x = jet_solve(a, std::vector<Jet>{t});
  CHECK(x[0].value() == 0.0);
  CHECK(x[0].d(0) == Approx(1.0));
}

TEST_CASE("jet solve round-trips at every order") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int order = 0; order <= kMaxOrder; ++order) {
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<double> p{u(rng), u(rng), u(rng)};
      const auto xs = coordinate_jets(p, order);
      auto rand_jet = [&] {
        return u(rng) + u(rng) * xs[0] + u(rng) * sin(xs[1]) + u(rng) * exp(xs[2] * xs[0]);
      };
      const int n = 4;
      Matrix<Jet> a(n, n);
      std::vector<Jet> rhs;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = rand_jet() + (i == j ? 4.0 : 0.0);
        rhs.push_back(rand_jet());
      }
      const auto x = jet_solve(a, rhs);
      const auto back = mat_vec(a, x);
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        const auto b = back[i].coefficients();
        const auto r = rhs[i].coefficients();
        for (std::size_t k = 0; k < b.size(); ++k) worst = std::max(worst, std::abs(b[k] - r[k]));
      }
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("value-part pivots below the threshold are rejected") {
  Matrix<Jet> a(2, 2, Jet::constant(1, 1, 0.0));
  a(0, 0) = Jet::variable(1, 1, 0, 0.0);  // value 0, slope 1
  a(1, 1) = Jet::constant(1, 1, 1.0);
  CHECK_THROWS_AS(jet_solve(a, std::vector<Jet>{Jet::constant(1, 1, 1.0), Jet::constant(1, 1, 1.0)}),
                  SingularSystemError);
}
