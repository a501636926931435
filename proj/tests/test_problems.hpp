#pragma once

// Shared test fixtures: small manufactured problems whose exact solutions lie
// inside the discrete spaces.

#include "mhd/problems.hpp"

namespace mhd::testing {

// u = (y^2, x^2), p = x - 1/2, b = (1, 2), r = 0 on the unit square with
// Re = Rm = S = 1; f and g derived by hand from the strong system.
inline BenchmarkProblem polynomial_problem() {
  BenchmarkProblem prob;
  prob.params = {1.0, 1.0, 1.0};
  prob.domain = DomainKind::UnitSquare;
  prob.velocity = [](Vec2 p) { return Vec2{p.y * p.y, p.x * p.x}; };
  prob.velocity_grad = [](Vec2 p) {
    Mat2 g;
    g.m[0][1] = 2.0 * p.y;
    g.m[1][0] = 2.0 * p.x;
    return g;
  };
  prob.pressure = [](Vec2 p) { return p.x - 0.5; };
  prob.magnetic = [](Vec2) { return Vec2{1.0, 2.0}; };
  prob.magnetic_curl = [](Vec2) { return 0.0; };
  prob.multiplier = [](Vec2) { return 0.0; };
  prob.multiplier_grad = [](Vec2) { return Vec2{0.0, 0.0}; };
  prob.body_force = [](Vec2 p) {
    return Vec2{2.0 * p.x * p.x * p.y - 1.0, 2.0 * p.x * p.y * p.y - 2.0};
  };
  prob.magnetic_source = [](Vec2 p) { return Vec2{-4.0 * p.y, -2.0 * p.x}; };
  return prob;
}

// all fields and sources identically zero
inline BenchmarkProblem zero_problem() {
  BenchmarkProblem prob;
  prob.params = {1.0, 1.0, 1.0};
  prob.domain = DomainKind::UnitSquare;
  auto zero_v = [](Vec2) { return Vec2{0.0, 0.0}; };
  auto zero_s = [](Vec2) { return 0.0; };
  auto zero_m = [](Vec2) { return Mat2{}; };
  prob.velocity = zero_v;
  prob.velocity_grad = zero_m;
  prob.pressure = zero_s;
  prob.magnetic = zero_v;
  prob.magnetic_curl = zero_s;
  prob.multiplier = zero_s;
  prob.multiplier_grad = zero_v;
  prob.body_force = zero_v;
  prob.magnetic_source = zero_v;
  return prob;
}

}  // namespace mhd::testing
