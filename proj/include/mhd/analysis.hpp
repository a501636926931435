#pragma once

// Error norms, the discrete negative norm, the Stokes and Maxwell
// projections, and convergence-rate reporting.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhd/forms.hpp"
#include "mhd/solver.hpp"

namespace mhd {

struct ErrorReport {
  int resolution = 0;  // family parameter (M or grading level)
  double h = 0.0;      // max triangle diameter
  int dofs = 0;        // total system size
  int newton_iterations = 0;
  double l2_u = 0.0;
  double h1semi_u = 0.0;
  double l2_p = 0.0;
  double hcurl_b = 0.0;
  double l2_b = 0.0;
  double h1_r = 0.0;
  double hminus1_b = 0.0;
};

// log2(coarse/fine); NaN when either error is at round-off level.
double rate_between(double coarse, double fine);

ErrorReport error_norms(const MhdState& state, const BenchmarkProblem& problem,
                        const MhdSpaces& spaces);

// Discrete H^-1 norm: sup over the zero-trace P2 space of (field, theta) /
// |theta|_H1, evaluated as sqrt(f^T K^-1 f) with K the H1 inner-product
// matrix and f the load vector of the field.
using CellVectorField =
    std::function<Vec2(int cell, const CellGeometry& g, const Bary& b)>;
using CellScalarField =
    std::function<double(int cell, const CellGeometry& g, const Bary& b)>;

double discrete_hminus1_vector(const Mesh& mesh, const CellVectorField& field);
double discrete_hminus1_scalar(const Mesh& mesh, const CellScalarField& field);

// Stokes projection of the exact (u, p): matches them in the Stokes form with
// a zero-mean discrete pressure.
std::pair<FeFunction, FeFunction> stokes_projection(const BenchmarkProblem& problem,
                                                    const DofMap& velocity,
                                                    const DofMap& pressure);

enum class MaxwellVariant { Standard, Modified };

// Maxwell projection of the exact (b, r); the Modified variant carries the
// coupling term c1(. ; u, c) with the exact velocity (or an override).
std::pair<FeFunction, FeFunction> maxwell_projection(
    const BenchmarkProblem& problem, const DofMap& magnetic, const DofMap& multiplier,
    MaxwellVariant variant, std::optional<VectorField> velocity_override = {});

struct ConvergenceReport {
  std::string problem;
  std::string element;   // nedelec1 | nedelec2
  std::string family;    // square | lshape | lshape-graded
  std::vector<ErrorReport> entries;
  bool aborted = false;
  std::string abort_reason;
};

ConvergenceReport convergence_study(const BenchmarkProblem& problem,
                                    MeshFamilyKind family,
                                    std::span<const int> resolutions,
                                    ElementKind magnetic_kind,
                                    const NewtonConfig& newton,
                                    int graded_base = 4);

std::string convergence_csv(const ConvergenceReport& report);
std::string convergence_markdown(const ConvergenceReport& report);

struct ProjectionEntry {
  int resolution = 0;
  double h = 0.0;
  double hcurl_xib = 0.0;     // |b - b~|_Hcurl, modified projection
  double hminus1_xib = 0.0;   // discrete H^-1 of b - b~
  double hminus1_curl_xib = 0.0;
  double r_gap = 0.0;         // max |r~ - r^| between modified and standard
  double stokes_h1_xiu = 0.0; // |grad(u - u~)|
  double stokes_l2_xiu = 0.0;
};

struct ProjectionReport {
  std::string problem;
  std::string element;
  std::vector<ProjectionEntry> entries;
};

ProjectionReport projection_study(const BenchmarkProblem& problem,
                                  std::span<const int> resolutions,
                                  ElementKind magnetic_kind,
                                  std::optional<VectorField> velocity_override = {});

std::string projection_csv(const ProjectionReport& report);
std::string projection_markdown(const ProjectionReport& report);

// "x y u1 u2 p b1 b2 r" on a uniform grid clipped to the domain.
std::string sample_field_grid(const MhdState& state, const MhdSpaces& spaces,
                              int points_per_side = 101);

}  // namespace mhd
