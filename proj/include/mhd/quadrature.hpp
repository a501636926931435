#pragma once

// Quadrature on the reference triangle {x,y >= 0, x+y <= 1} and on [0,1].

#include <vector>

#include "mhd/core.hpp"

namespace mhd {

struct QuadratureRule {
  int degree = 0;           // every monomial of total degree <= degree is exact
  std::vector<Bary> points; // barycentric (l0, l1, l2), l1 = x, l2 = y
  std::vector<double> weights;  // positive, summing to 1/2
};

// Supported degrees 1..10. The returned rule is cached and immutable.
const QuadratureRule& triangle_rule(int degree);

struct EdgeRule {
  std::vector<double> points;   // in (0,1)
  std::vector<double> weights;  // positive, summing to 1
};

// Gauss-Legendre with 1..10 points, exact for degree 2n-1.
const EdgeRule& edge_rule(int npoints);

}  // namespace mhd
