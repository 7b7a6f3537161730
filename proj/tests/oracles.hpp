#pragma once

// Independent reference computations for tests. Plain doubles and Cramer's
// rule only; nothing here goes through the decomposition engine.

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "affsph/affsph.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting; columns given as vectors.
inline double det_columns(Mat cols) {
  const std::size_t n = cols.size();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(cols[k][i]) > std::abs(cols[k][piv])) piv = i;
    if (cols[k][piv] == 0.0) return 0.0;
    if (piv != k) {
      for (auto& c : cols) std::swap(c[k], c[piv]);
      det = -det;
    }
    det *= cols[k][k];
    for (std::size_t j = k + 1; j < n; ++j) {
      const double factor = cols[j][k] / cols[k][k];
      for (std::size_t i = k; i < n; ++i) cols[j][i] -= factor * cols[k][i];
    }
  }
  return det;
}

inline double det_rows(const Mat& rows) {
  Mat cols(rows.size(), std::vector<double>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) cols[j][i] = rows[i][j];
  return det_columns(cols);
}

inline std::vector<double> neg(std::vector<double> v) {
  for (double& x : v) x = -x;
  return v;
}

// h_ij of C = -f by Cramer: h_ij = det[f_1..f_m, f_ij] / det[f_1..f_m, -f].
struct Centro {
  Mat h;
  double theta = 0.0;
};

inline Centro centro(const affsph::SmoothMap& f, const std::vector<double>& p) {
  const int m = f.domain_dim();
  const auto F = f.jet(p, 2);
  Mat base;
  for (int i = 0; i < m; ++i) base.push_back(F.d(i));
  Centro c;
  auto frame = base;
  frame.push_back(neg(F.value()));
  c.theta = det_columns(frame);
  c.h.assign(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      auto cols = base;
      cols.push_back(F.d(i, j));
      c.h[i][j] = det_columns(cols) / c.theta;
    }
  return c;
}

// Blaschke normal of a centro-affine sphere is -lambda f with
// lambda = (|det h| / theta^2)^{1/(m+2)} for the data of C = -f.
inline double centro_lambda(const affsph::SmoothMap& f, const std::vector<double>& p) {
  const Centro c = centro(f, p);
  const int m = f.domain_dim();
  return std::pow(std::abs(det_rows(c.h)) / (c.theta * c.theta), 1.0 / (m + 2));
}

// Codim-2 radial normal: for zeta = -g, alpha = |det h1 / theta^2|^{1/(m+4)}.
inline double radial_alpha(const affsph::SmoothMap& g, const std::vector<double>& p) {
  const int m = g.domain_dim();
  const auto G = g.jet(p, 2);
  const auto zeta = neg(G.value());
  const auto jz = affsph::jtilde(zeta);
  Mat base;
  for (int i = 0; i < m; ++i) base.push_back(G.d(i));
  auto frame = base;
  frame.push_back(zeta);
  frame.push_back(jz);
  const double theta = det_columns(frame);
  Mat h(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      auto cols = base;
      cols.push_back(G.d(i, j));
      cols.push_back(jz);
      h[i][j] = det_columns(cols) / theta;
    }
  return std::pow(std::abs(det_rows(h) / (theta * theta)), 1.0 / (m + 4));
}

// Second fundamental form of the non-involutive example for C = -f.
inline Mat example_h(double x) { return {{0, -1, 0}, {-1, 0, 2 * x}, {0, 2 * x, -1}}; }

inline std::vector<std::vector<double>> random_points(const affsph::Box& box, int count, unsigned seed,
                                                      double shrink = 0.95) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < count; ++k) {
    std::vector<double> p;
    for (int i = 0; i < box.dim(); ++i) {
      const auto [lo, hi] = box.range(i);
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo) * shrink;
      std::uniform_real_distribution<double> u(mid - half, mid + half);
      p.push_back(u(rng));
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace oracle
