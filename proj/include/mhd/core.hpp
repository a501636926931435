#pragma once

// Small fixed-size vector/matrix types shared by all modules.

#include <array>
#include <cmath>
#include <functional>

namespace mhd {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// 2D cross product a x b = a1 b2 - a2 b1 (the scalar z-component).
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
// Scalar-by-vector cross product s x d = s * (-d2, d1).
inline Vec2 cross(double s, Vec2 d) { return {-s * d.y, s * d.x}; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

// 2x2 matrix, m[i][j]; for velocity gradients m[i][j] = d u_i / d x_j.
struct Mat2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static Mat2 zero() { return {}; }
  double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
};

inline Vec2 operator*(const Mat2& a, Vec2 v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y, a.m[1][0] * v.x + a.m[1][1] * v.y};
}
inline Mat2 operator-(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
  return r;
}
inline double frobenius_dot(const Mat2& a, const Mat2& b) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += a.m[i][j] * b.m[i][j];
  return s;
}
inline double trace(const Mat2& a) { return a.m[0][0] + a.m[1][1]; }

using Bary = std::array<double, 3>;

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

}  // namespace mhd
