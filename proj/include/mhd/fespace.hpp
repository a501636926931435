#pragma once

// Reference elements, global dof maps, interpolation and essential boundary
// conditions for the five discrete spaces used by the solver.

#include <functional>
#include <utility>
#include <vector>

#include "mhd/core.hpp"
#include "mhd/mesh.hpp"
#include "mhd/quadrature.hpp"

namespace mhd {

enum class ElementKind { LagrangeP1, LagrangeP2, VectorP2, Nedelec1Low, Nedelec2Low };

int local_dof_count(ElementKind kind);        // 3, 6, 12, 3, 6
bool is_vector_element(ElementKind kind);     // VectorP2 and edge elements
bool is_edge_element(ElementKind kind);

// Reference-element basis data at one barycentric point. Scalar elements fill
// value/ref_grad; vector elements fill vec (plus vgrad for VectorP2 and curl
// for the edge elements). Edge-element entries map to physical space with the
// covariant transform: vec_phys = J^{-T} vec, curl_phys = curl / det(J).
struct Tabulation {
  int ndof = 0;
  std::array<double, 12> value{};
  std::array<Vec2, 12> ref_grad{};
  std::array<Vec2, 12> vec{};
  std::array<Mat2, 12> vgrad{};
  std::array<double, 12> curl{};
};

Tabulation tabulate(ElementKind kind, const Bary& point);

struct CellGeometry {
  Vec2 v0, v1, v2;
  double det = 0.0;  // 2 * area, positive
  Mat2 jac;          // columns v1-v0, v2-v0
  Mat2 jac_inv_t;
  Vec2 grad_lambda[3];  // physical barycentric gradients

  Vec2 point(const Bary& b) const { return b[0] * v0 + b[1] * v1 + b[2] * v2; }
};

CellGeometry cell_geometry(const Mesh& mesh, int t);

struct DofMap {
  ElementKind kind{};
  const Mesh* mesh = nullptr;
  int n_dofs = 0;
  int n_local = 0;
  std::vector<int> cell_dofs;       // t * n_local + l
  std::vector<double> cell_signs;   // +-1, nontrivial only for edge dofs
  std::vector<int> boundary_dofs;   // sorted
  std::vector<char> dof_on_boundary;

  int dof(int t, int l) const { return cell_dofs[static_cast<size_t>(t) * n_local + l]; }
  double sign(int t, int l) const {
    return cell_signs[static_cast<size_t>(t) * n_local + l];
  }
};

DofMap make_dof_map(const Mesh& mesh, ElementKind kind);

struct FeFunction {
  const DofMap* space = nullptr;
  std::vector<double> coeffs;
};

FeFunction zero_function(const DofMap& space);

// Pointwise evaluation on one cell. The geometry argument must belong to the
// same cell index.
double eval_scalar(const FeFunction& f, int t, const Bary& b);
Vec2 eval_scalar_grad(const FeFunction& f, int t, const Bary& b, const CellGeometry& g);
Vec2 eval_vector(const FeFunction& f, int t, const Bary& b, const CellGeometry& g);
Mat2 eval_vector_grad(const FeFunction& f, int t, const Bary& b, const CellGeometry& g);
double eval_vector_curl(const FeFunction& f, int t, const Bary& b, const CellGeometry& g);

// Lagrange dofs take point values; edge-element dofs take tangential edge
// moments (3-point Gauss) with respect to the global edge orientation.
FeFunction interpolate(const DofMap& space, const ScalarField& f);
FeFunction interpolate(const DofMap& space, const VectorField& f);

// Prescribed values for all boundary dofs, sorted by dof index. For the edge
// elements the value is the tangential moment of g on the boundary edge
// (5-point Gauss); in 2D the condition n x b = 0 constrains b.t.
std::vector<std::pair<int, double>> essential_bc(const DofMap& space, const ScalarField& g);
std::vector<std::pair<int, double>> essential_bc(const DofMap& space, const VectorField& g);

}  // namespace mhd
