#pragma once

// The two manufactured benchmark problems: a smooth solution on the unit
// square and a corner-singular solution on the L-shape domain.

#include <functional>
#include <string>

#include "mhd/core.hpp"
#include "mhd/mesh.hpp"

namespace mhd {

struct PhysParams {
  double Re = 1.0;  // hydrodynamic Reynolds number
  double Rm = 1.0;  // magnetic Reynolds number
  double S = 1.0;   // coupling number
};

enum class DomainKind { UnitSquare, LShape };

struct BenchmarkProblem {
  PhysParams params;
  DomainKind domain = DomainKind::UnitSquare;

  std::function<Vec2(Vec2)> velocity;
  std::function<Mat2(Vec2)> velocity_grad;  // m[i][j] = d u_i / d x_j
  std::function<double(Vec2)> pressure;     // normalized to zero mean
  std::function<Vec2(Vec2)> magnetic;
  std::function<double(Vec2)> magnetic_curl;
  std::function<double(Vec2)> multiplier;
  std::function<Vec2(Vec2)> multiplier_grad;

  std::function<Vec2(Vec2)> body_force;      // f
  std::function<Vec2(Vec2)> magnetic_source; // g

  // Constant subtracted from the raw pressure formula so that the stored
  // pressure integrates to zero over the domain (0 when already zero-mean).
  double pressure_mean_shift = 0.0;
};

BenchmarkProblem example41();

// The printed corner parameter omega is ambiguous; Standard evaluates
// cos(lambda*omega) with the 3*pi/2 opening angle of the reentrant corner,
// PaperPrinted with the literal 2/3.
enum class CornerAngle { Standard, PaperPrinted };

BenchmarkProblem example42(CornerAngle angle = CornerAngle::Standard);

BenchmarkProblem problem_by_name(const std::string& name,
                                 CornerAngle angle = CornerAngle::Standard);

// Natural mesh family of a problem's domain.
MeshFamilyKind default_family(DomainKind domain);

}  // namespace mhd
