#pragma once

// Assembly of the bilinear and trilinear forms of the mixed MHD system and of
// the Newton-linearized block systems.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mhd/fespace.hpp"
#include "mhd/linalg.hpp"
#include "mhd/problems.hpp"

namespace mhd {

// Default quadrature: degree 6 covers every polynomial integrand of the
// discrete forms; integrals against analytic exact fields use degree 8.
constexpr int kVolumeDegree = 6;
constexpr int kExactDegree = 8;

struct BlockLayout {
  int n_u = 0, n_p = 0, n_b = 0, n_r = 0;
  int u0() const { return 0; }
  int p0() const { return n_u; }
  int b0() const { return n_u + n_p; }
  int r0() const { return n_u + n_p + n_b; }
  int mu() const { return n_u + n_p + n_b + n_r; }
  int total() const { return n_u + n_p + n_b + n_r + 1; }
};

struct MhdSpaces {
  const Mesh* mesh = nullptr;
  DofMap velocity;    // VectorP2
  DofMap pressure;    // LagrangeP1
  DofMap magnetic;    // Nedelec1Low or Nedelec2Low
  DofMap multiplier;  // LagrangeP1
  BlockLayout layout() const {
    return {velocity.n_dofs, pressure.n_dofs, magnetic.n_dofs, multiplier.n_dofs};
  }
};

MhdSpaces make_spaces(const Mesh& mesh, ElementKind magnetic_kind);

struct MhdState {
  FeFunction u, p, b, r;
  double mean_multiplier = 0.0;
};

MhdState zero_state(const MhdSpaces& spaces);
std::vector<double> pack_state(const MhdState& state, const BlockLayout& layout);
MhdState unpack_state(std::span<const double> x, const MhdSpaces& spaces);

// A field frozen inside a trilinear form: either a finite element function or
// an analytic field, evaluated pointwise at quadrature points.
struct FrozenVectorField {
  const FeFunction* fe = nullptr;
  std::function<Vec2(Vec2)> value_fn;
  std::function<double(Vec2)> curl_fn;
  std::function<Mat2(Vec2)> grad_fn;

  FrozenVectorField(const FeFunction& f) : fe(&f) {}
  FrozenVectorField(std::function<Vec2(Vec2)> value,
                    std::function<double(Vec2)> curl = {},
                    std::function<Mat2(Vec2)> grad = {})
      : value_fn(std::move(value)), curl_fn(std::move(curl)), grad_fn(std::move(grad)) {}

  Vec2 value(int t, const CellGeometry& g, const Bary& b) const;
  double curl(int t, const CellGeometry& g, const Bary& b) const;
  Mat2 grad(int t, const CellGeometry& g, const Bary& b) const;
};

// a_s(u, v) = Re^-1 (grad u, grad v) on the velocity space
SparseMatrix assemble_as(const DofMap& velocity, double Re);

// a_m(b, c) = S Rm^-1 (curl b, curl c) on the magnetic space
SparseMatrix assemble_am(const DofMap& magnetic, double Rm, double S);

// c0(w; u, v) with w frozen; skew-symmetric in (u, v) by construction
SparseMatrix assemble_c0_conv(const FrozenVectorField& w, const DofMap& velocity);

// c0(u; w, v) with w frozen (the Newton transport term)
SparseMatrix assemble_c0_react(const FrozenVectorField& w, const DofMap& velocity);

// c1(d; v, c) = -S (v x d, curl c), rows on the velocity space, columns on the
// magnetic space, d frozen
SparseMatrix assemble_c1_dfrozen(const FrozenVectorField& d, const DofMap& velocity,
                                 const DofMap& magnetic, double S);

// Same matrix assembled through the adjoint identity S ((curl c) x d, v);
// kept as an independent code path for the identity test.
SparseMatrix assemble_c1_dfrozen_adjoint(const FrozenVectorField& d,
                                         const DofMap& velocity,
                                         const DofMap& magnetic, double S);

// c1(db; v, b) = S ((curl b) x db, v) with b frozen, rows velocity, cols magnetic
SparseMatrix assemble_c1_curlfrozen(const FrozenVectorField& b, const DofMap& velocity,
                                    const DofMap& magnetic, double S);

// c1(db; u, c) with u frozen, rows and columns on the magnetic space
SparseMatrix assemble_c1_ufrozen(const FrozenVectorField& u, const DofMap& magnetic,
                                 double S, int quad_degree = kVolumeDegree);

// (q_j, div v_i), rows velocity, columns pressure
SparseMatrix assemble_divergence(const DofMap& velocity, const DofMap& pressure);

// (grad s_j, c_i), rows magnetic, columns multiplier
SparseMatrix assemble_gradient(const DofMap& magnetic, const DofMap& multiplier);

// m[j] = integral of the j-th pressure basis function
std::vector<double> assemble_mean_row(const DofMap& pressure);

// full H1 inner product (theta, theta') + (grad theta, grad theta')
SparseMatrix assemble_h1_product(const DofMap& space);

std::vector<double> assemble_load(const DofMap& space, const VectorField& f,
                                  int quad_degree);
std::vector<double> assemble_load(const DofMap& space, const ScalarField& f,
                                  int quad_degree);

// Moves prescribed values to the right-hand side and replaces constrained
// rows/columns by the identity.
void apply_dirichlet(std::vector<Triplet>& triplets, std::vector<double>& rhs,
                     const std::vector<char>& constrained,
                     const std::vector<double>& values);

struct BlockSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  BlockLayout layout;
};

// Nonlinear residual of the discrete system at the given state, over the full
// dof vector [u | p | b | r | mu] without boundary elimination.
std::vector<double> assemble_residual(const MhdState& state,
                                      const BenchmarkProblem& problem,
                                      const MhdSpaces& spaces);

// Jacobian (Frechet derivative of the residual) and rhs = -residual at the
// state. With eliminate_bcs the essential dofs of u, b, r are pinned to zero
// increments.
BlockSystem assemble_newton_system(const MhdState& state,
                                   const BenchmarkProblem& problem,
                                   const MhdSpaces& spaces,
                                   bool eliminate_bcs = true);

// Euclidean norm of the load vector [ (f,v) | 0 | (g,c) | 0 | 0 ], used as the
// data scale for residual checks.
double data_norm(const BenchmarkProblem& problem, const MhdSpaces& spaces);

}  // namespace mhd
