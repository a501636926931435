#include "mhd/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace mhd {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

EdgeRule make_edge_rule(int n) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  EdgeRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = 0.5 * (x[i] + 1.0);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

QuadratureRule make_triangle_rule(int degree) {
  QuadratureRule rule;
  rule.degree = degree;
  if (degree <= 1) {
    rule.points = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    rule.weights = {0.5};
    return rule;
  }
  if (degree == 2) {
    rule.points = {{2.0 / 3, 1.0 / 6, 1.0 / 6},
                   {1.0 / 6, 2.0 / 3, 1.0 / 6},
                   {1.0 / 6, 1.0 / 6, 2.0 / 3}};
    rule.weights = {1.0 / 6, 1.0 / 6, 1.0 / 6};
    return rule;
  }
  // Collapsed tensor-product Gauss on x = u(1-v), y = v with Jacobian (1-v).
  // The (1-v) factor raises the v-degree by one, hence the extra v point.
  const int nu = (degree + 2) / 2;      // 2*nu - 1 >= degree
  const int nv = (degree + 3) / 2;      // 2*nv - 1 >= degree + 1
  const EdgeRule& gu = edge_rule(nu);
  const EdgeRule& gv = edge_rule(nv);
  for (int i = 0; i < nu; ++i) {
    for (int jj = 0; jj < nv; ++jj) {
      double u = gu.points[i], v = gv.points[jj];
      double x = u * (1.0 - v), y = v;
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(gu.weights[i] * gv.weights[jj] * (1.0 - v));
    }
  }
  return rule;
}

}  // namespace

const EdgeRule& edge_rule(int npoints) {
  if (npoints < 1 || npoints > 10)
    throw std::invalid_argument("edge_rule: supported point counts are 1..10");
  static std::array<EdgeRule, 11> cache;
  static std::once_flag flags[11];
  std::call_once(flags[npoints], [&] { cache[npoints] = make_edge_rule(npoints); });
  return cache[npoints];
}

const QuadratureRule& triangle_rule(int degree) {
  if (degree < 1 || degree > 10)
    throw std::invalid_argument("triangle_rule: supported degrees are 1..10");
  static std::array<QuadratureRule, 11> cache;
  static std::once_flag flags[11];
  std::call_once(flags[degree], [&] { cache[degree] = make_triangle_rule(degree); });
  return cache[degree];
}

}  // namespace mhd
