#include "mhd/problems.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "mhd/quadrature.hpp"

namespace mhd {

namespace {

// ---------------------------------------------------------------------------
// Example 4.1: smooth fields on the unit square, Re = Rm = S = 1.
//
// u is the curl of the stream function psi = x^2(x-1)^2 y^2(y-1)^2 / 2 and
// b = (sin(pi x) cos(pi y), -sin(pi y) cos(pi x)), so both are
// divergence-free as the system requires; curl b = 2 pi sin(pi x) sin(pi y).
// ---------------------------------------------------------------------------

double poly_a(double t) { return t * t * (t - 1.0) * (t - 1.0); }          // t^2(t-1)^2
double poly_da(double t) { return 2.0 * t * (t - 1.0) * (2.0 * t - 1.0); } // derivative
double poly_dda(double t) { return 12.0 * t * t - 12.0 * t + 2.0; }
double poly_b(double t) { return t * (t - 1.0) * (2.0 * t - 1.0); }        // = a'(t)/2
double poly_db(double t) { return 6.0 * t * t - 6.0 * t + 1.0; }
double poly_ddb(double t) { return 12.0 * t - 6.0; }

Vec2 ex41_u(Vec2 p) {
  return {poly_a(p.x) * poly_b(p.y), -poly_b(p.x) * poly_a(p.y)};
}

Mat2 ex41_grad_u(Vec2 p) {
  Mat2 g;
  g.m[0][0] = poly_da(p.x) * poly_b(p.y);
  g.m[0][1] = poly_a(p.x) * poly_db(p.y);
  g.m[1][0] = -poly_db(p.x) * poly_a(p.y);
  g.m[1][1] = -poly_b(p.x) * poly_da(p.y);
  return g;
}

Vec2 ex41_lap_u(Vec2 p) {
  return {poly_dda(p.x) * poly_b(p.y) + poly_a(p.x) * poly_ddb(p.y),
          -poly_ddb(p.x) * poly_a(p.y) - poly_b(p.x) * poly_dda(p.y)};
}

double ex41_p(Vec2 p) { return (2.0 * p.x - 1.0) * (2.0 * p.y - 1.0); }
Vec2 ex41_grad_p(Vec2 p) { return {2.0 * (2.0 * p.y - 1.0), 2.0 * (2.0 * p.x - 1.0)}; }

Vec2 ex41_b(Vec2 p) {
  return {std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
          -std::sin(M_PI * p.y) * std::cos(M_PI * p.x)};
}

Mat2 ex41_grad_b(Vec2 p) {
  Mat2 g;
  g.m[0][0] = M_PI * std::cos(M_PI * p.x) * std::cos(M_PI * p.y);
  g.m[0][1] = -M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
  g.m[1][0] = M_PI * std::sin(M_PI * p.y) * std::sin(M_PI * p.x);
  g.m[1][1] = -M_PI * std::cos(M_PI * p.y) * std::cos(M_PI * p.x);
  return g;
}

double ex41_curl_b(Vec2 p) {
  return 2.0 * M_PI * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
}

// curl(curl b) = (d/dy curl b, -d/dx curl b)
Vec2 ex41_curl_curl_b(Vec2 p) {
  return {2.0 * M_PI * M_PI * std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
          -2.0 * M_PI * M_PI * std::cos(M_PI * p.x) * std::sin(M_PI * p.y)};
}

// ---------------------------------------------------------------------------
// Example 4.2: corner-singular fields on the L-shape, Re = Rm = 0.1, S = 1.
//
// All fields are built from the angular function
//   phi(theta) = sin((1+l)t) c/(1+l) - cos((1+l)t) - sin((1-l)t) c/(1-l)
//                + cos((1-l)t)
// with l = 0.54448 and c = cos(l*omega). u is the curl of rho^{1+l} phi, b is
// the gradient of rho^{2/3} sin(2 theta / 3), r = 0.
// ---------------------------------------------------------------------------

constexpr double kLambda = 0.54448;

struct AngularBasis {
  // phi = sum of a_i sin(k_i t) + b_i cos(k_i t), differentiable any order
  double k[2];
  double a[2];
  double b[2];

  double deriv(int order, double theta) const {
    double s = 0.0;
    for (int i = 0; i < 2; ++i) {
      double as = a[i], ac = b[i];
      for (int m = 0; m < order; ++m) {
        double ns = -k[i] * ac, nc = k[i] * as;
        as = ns;
        ac = nc;
      }
      s += as * std::sin(k[i] * theta) + ac * std::cos(k[i] * theta);
    }
    return s;
  }
};

struct LShapeFields {
  double lambda;
  AngularBasis phi;

  explicit LShapeFields(double omega) : lambda(kLambda) {
    double c = std::cos(lambda * omega);
    phi.k[0] = 1.0 + lambda;
    phi.k[1] = 1.0 - lambda;
    phi.a[0] = c / (1.0 + lambda);
    phi.b[0] = -1.0;
    phi.a[1] = -c / (1.0 - lambda);
    phi.b[1] = 1.0;
  }

  static void polar(Vec2 p, double& rho, double& theta) {
    rho = std::hypot(p.x, p.y);
    theta = std::atan2(p.y, p.x);
    if (theta < 0.0) theta += 2.0 * M_PI;
  }

  // alpha, beta: Cartesian velocity components divided by rho^lambda
  double alpha(double th) const {
    return (1.0 + lambda) * std::sin(th) * phi.deriv(0, th) +
           std::cos(th) * phi.deriv(1, th);
  }
  double beta(double th) const {
    return -(1.0 + lambda) * std::cos(th) * phi.deriv(0, th) +
           std::sin(th) * phi.deriv(1, th);
  }
  double alpha_d(double th) const {
    return (1.0 + lambda) * std::cos(th) * phi.deriv(0, th) +
           lambda * std::sin(th) * phi.deriv(1, th) +
           std::cos(th) * phi.deriv(2, th);
  }
  double beta_d(double th) const {
    return (1.0 + lambda) * std::sin(th) * phi.deriv(0, th) -
           lambda * std::cos(th) * phi.deriv(1, th) +
           std::sin(th) * phi.deriv(2, th);
  }

  Vec2 u(Vec2 p) const {
    double rho, th;
    polar(p, rho, th);
    if (rho == 0.0) return {0.0, 0.0};
    double rl = std::pow(rho, lambda);
    return {rl * alpha(th), rl * beta(th)};
  }

  Mat2 grad_u(Vec2 p) const {
    double rho, th;
    polar(p, rho, th);
    Mat2 g;
    if (rho == 0.0) return g;
    double r1 = std::pow(rho, lambda - 1.0);
    double c = std::cos(th), s = std::sin(th);
    double al = alpha(th), be = beta(th), ald = alpha_d(th), bed = beta_d(th);
    g.m[0][0] = r1 * (lambda * al * c - ald * s);
    g.m[0][1] = r1 * (lambda * al * s + ald * c);
    g.m[1][0] = r1 * (lambda * be * c - bed * s);
    g.m[1][1] = r1 * (lambda * be * s + bed * c);
    return g;
  }

  Vec2 lap_u(Vec2 p) const {
    // Lap u = curl(Lap psi), Lap psi = rho^{lambda-1} G with
    // G = (1+lambda)^2 phi + phi''
    double rho, th;
    polar(p, rho, th);
    if (rho == 0.0) return {0.0, 0.0};
    double r2 = std::pow(rho, lambda - 2.0);
    double c = std::cos(th), s = std::sin(th);
    double lp1 = (1.0 + lambda) * (1.0 + lambda);
    double G = lp1 * phi.deriv(0, th) + phi.deriv(2, th);
    double Gd = lp1 * phi.deriv(1, th) + phi.deriv(3, th);
    double a = lambda - 1.0;
    return {r2 * (a * G * s + Gd * c), r2 * (Gd * s - a * G * c)};
  }

  double p_raw(Vec2 p) const {
    double rho, th;
    polar(p, rho, th);
    double lp1 = (1.0 + lambda) * (1.0 + lambda);
    double q = lp1 * phi.deriv(1, th) + phi.deriv(3, th);
    return std::pow(rho, lambda - 1.0) * q / (1.0 - lambda);
  }

  Vec2 grad_p(Vec2 p) const {
    double rho, th;
    polar(p, rho, th);
    double r2 = std::pow(rho, lambda - 2.0);
    double c = std::cos(th), s = std::sin(th);
    double lp1 = (1.0 + lambda) * (1.0 + lambda);
    double q = lp1 * phi.deriv(1, th) + phi.deriv(3, th);
    double qd = lp1 * phi.deriv(2, th) + phi.deriv(4, th);
    double a = lambda - 1.0;
    return {r2 * (a * q * c - qd * s) / (1.0 - lambda),
            r2 * (a * q * s + qd * c) / (1.0 - lambda)};
  }

  Vec2 b(Vec2 p) const {
    // grad(rho^{2/3} sin(2 theta/3)) = (2/3) rho^{-1/3} (-sin(theta/3), cos(theta/3))
    double rho, th;
    polar(p, rho, th);
    if (rho == 0.0) return {0.0, 0.0};
    double f = (2.0 / 3.0) * std::pow(rho, -1.0 / 3.0);
    return {-f * std::sin(th / 3.0), f * std::cos(th / 3.0)};
  }

  Vec2 g_source(Vec2 p, double S) const {
    // g = -S curl(u x b); u x b = (2/3) rho^{lambda - 1/3} gamma(theta)
    double rho, th;
    polar(p, rho, th);
    if (rho == 0.0) return {0.0, 0.0};
    double a = lambda - 1.0 / 3.0;
    double c = std::cos(th), s = std::sin(th);
    double c3 = std::cos(th / 3.0), s3 = std::sin(th / 3.0);
    double al = alpha(th), be = beta(th);
    double gamma = al * c3 + be * s3;
    double gamma_d = alpha_d(th) * c3 - al * s3 / 3.0 + beta_d(th) * s3 + be * c3 / 3.0;
    double f = (2.0 / 3.0) * std::pow(rho, a - 1.0);
    double dx = f * (a * gamma * c - gamma_d * s);
    double dy = f * (a * gamma * s + gamma_d * c);
    return {-S * dy, S * dx};
  }
};

// Mean of the raw pressure over the L-shape, computed panel-wise in polar
// coordinates: int p = C/(1+lambda) int q(theta) R(theta)^{1+lambda} dtheta.
double lshape_pressure_mean(const LShapeFields& fields) {
  const EdgeRule& gauss = edge_rule(10);
  struct Panel {
    double t0, t1;
    int kind;  // 0: R = 1/cos, 1: R = 1/sin, 2: R = -1/cos, 3: R = -1/sin
  };
  const Panel panels[] = {{0.0, M_PI / 4, 0},
                          {M_PI / 4, 3 * M_PI / 4, 1},
                          {3 * M_PI / 4, 5 * M_PI / 4, 2},
                          {5 * M_PI / 4, 3 * M_PI / 2, 3}};
  double lp1 = (1.0 + fields.lambda) * (1.0 + fields.lambda);
  double total = 0.0;
  const int slices = 64;
  for (const Panel& panel : panels) {
    for (int sl = 0; sl < slices; ++sl) {
      double a = panel.t0 + (panel.t1 - panel.t0) * sl / slices;
      double b = panel.t0 + (panel.t1 - panel.t0) * (sl + 1) / slices;
      for (size_t q = 0; q < gauss.points.size(); ++q) {
        double th = a + (b - a) * gauss.points[q];
        double R = 0.0;
        switch (panel.kind) {
          case 0: R = 1.0 / std::cos(th); break;
          case 1: R = 1.0 / std::sin(th); break;
          case 2: R = -1.0 / std::cos(th); break;
          case 3: R = -1.0 / std::sin(th); break;
        }
        double qv = lp1 * fields.phi.deriv(1, th) + fields.phi.deriv(3, th);
        double integrand = qv / (1.0 - fields.lambda) *
                           std::pow(R, 1.0 + fields.lambda) / (1.0 + fields.lambda);
        total += integrand * (b - a) * gauss.weights[q];
      }
    }
  }
  return total / 3.0;  // domain area is 3
}

}  // namespace

BenchmarkProblem example41() {
  BenchmarkProblem prob;
  prob.params = {1.0, 1.0, 1.0};
  prob.domain = DomainKind::UnitSquare;
  prob.velocity = ex41_u;
  prob.velocity_grad = ex41_grad_u;
  prob.pressure = ex41_p;
  prob.magnetic = ex41_b;
  prob.magnetic_curl = ex41_curl_b;
  prob.multiplier = [](Vec2) { return 0.0; };
  prob.multiplier_grad = [](Vec2) { return Vec2{0.0, 0.0}; };

  const double Re = prob.params.Re, Rm = prob.params.Rm, S = prob.params.S;
  prob.body_force = [Re, S](Vec2 p) {
    Vec2 u = ex41_u(p);
    Mat2 g = ex41_grad_u(p);
    Vec2 lap = ex41_lap_u(p);
    Vec2 conv{u.x * g.m[0][0] + u.y * g.m[0][1], u.x * g.m[1][0] + u.y * g.m[1][1]};
    Vec2 gp = ex41_grad_p(p);
    Vec2 lorentz = cross(ex41_curl_b(p), ex41_b(p));
    return Vec2{-lap.x / Re + conv.x + gp.x - S * lorentz.x,
                -lap.y / Re + conv.y + gp.y - S * lorentz.y};
  };
  prob.magnetic_source = [Rm, S](Vec2 p) {
    // g = S/Rm curl(curl b) - S curl(u x b), with r = 0
    Vec2 u = ex41_u(p), b = ex41_b(p);
    Mat2 gu = ex41_grad_u(p), gb = ex41_grad_b(p);
    double dxs = gu.m[0][0] * b.y + u.x * gb.m[1][0] - gu.m[1][0] * b.x - u.y * gb.m[0][0];
    double dys = gu.m[0][1] * b.y + u.x * gb.m[1][1] - gu.m[1][1] * b.x - u.y * gb.m[0][1];
    Vec2 cc = ex41_curl_curl_b(p);
    return Vec2{S / Rm * cc.x - S * dys, S / Rm * cc.y + S * dxs};
  };
  return prob;
}

BenchmarkProblem example42(CornerAngle angle) {
  const double omega = angle == CornerAngle::Standard ? 1.5 * M_PI : 2.0 / 3.0;
  auto fields = std::make_shared<LShapeFields>(omega);
  const double mean = lshape_pressure_mean(*fields);

  BenchmarkProblem prob;
  prob.params = {0.1, 0.1, 1.0};
  prob.domain = DomainKind::LShape;
  prob.pressure_mean_shift = mean;
  prob.velocity = [fields](Vec2 p) { return fields->u(p); };
  prob.velocity_grad = [fields](Vec2 p) { return fields->grad_u(p); };
  prob.pressure = [fields, mean](Vec2 p) { return fields->p_raw(p) - mean; };
  prob.magnetic = [fields](Vec2 p) { return fields->b(p); };
  prob.magnetic_curl = [](Vec2) { return 0.0; };
  prob.multiplier = [](Vec2) { return 0.0; };
  prob.multiplier_grad = [](Vec2) { return Vec2{0.0, 0.0}; };

  const double Re = prob.params.Re, S = prob.params.S;
  prob.body_force = [fields, Re](Vec2 p) {
    Vec2 u = fields->u(p);
    Mat2 g = fields->grad_u(p);
    Vec2 lap = fields->lap_u(p);
    Vec2 gp = fields->grad_p(p);
    Vec2 conv{u.x * g.m[0][0] + u.y * g.m[0][1], u.x * g.m[1][0] + u.y * g.m[1][1]};
    return Vec2{-lap.x / Re + conv.x + gp.x, -lap.y / Re + conv.y + gp.y};
  };
  prob.magnetic_source = [fields, S](Vec2 p) { return fields->g_source(p, S); };
  return prob;
}

BenchmarkProblem problem_by_name(const std::string& name, CornerAngle angle) {
  if (name == "example41") return example41();
  if (name == "example42") return example42(angle);
  throw std::invalid_argument("unknown problem: " + name);
}

MeshFamilyKind default_family(DomainKind domain) {
  return domain == DomainKind::UnitSquare ? MeshFamilyKind::UnitSquareUniform
                                          : MeshFamilyKind::LShapeUniform;
}

}  // namespace mhd
