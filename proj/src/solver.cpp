#include "mhd/solver.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace mhd {

namespace {

void set_boundary_values(MhdState& state, const BenchmarkProblem& problem,
                         const MhdSpaces& spaces) {
  for (auto [dof, value] : essential_bc(spaces.velocity, problem.velocity))
    state.u.coeffs[dof] = value;
  for (auto [dof, value] : essential_bc(spaces.magnetic, problem.magnetic))
    state.b.coeffs[dof] = value;
  for (auto [dof, value] : essential_bc(spaces.multiplier, problem.multiplier))
    state.r.coeffs[dof] = value;
}

// One linear Stokes solve (a_s and the divergence constraint only).
void stokes_seed(MhdState& state, const BenchmarkProblem& problem,
                 const MhdSpaces& spaces) {
  const DofMap& V = spaces.velocity;
  const DofMap& Q = spaces.pressure;
  const int n = V.n_dofs + Q.n_dofs + 1;
  const int p0 = V.n_dofs, mu = V.n_dofs + Q.n_dofs;

  std::vector<Triplet> trips;
  SparseMatrix as = assemble_as(V, problem.params.Re);
  for (int i = 0; i < as.n_rows; ++i)
    for (int k = as.row_offsets[i]; k < as.row_offsets[i + 1]; ++k)
      trips.push_back({i, as.col_indices[k], as.values[k]});
  SparseMatrix div = assemble_divergence(V, Q);
  for (int i = 0; i < div.n_rows; ++i) {
    for (int k = div.row_offsets[i]; k < div.row_offsets[i + 1]; ++k) {
      trips.push_back({i, p0 + div.col_indices[k], -div.values[k]});
      trips.push_back({p0 + div.col_indices[k], i, div.values[k]});
    }
  }
  std::vector<double> mean = assemble_mean_row(Q);
  for (int j = 0; j < Q.n_dofs; ++j) {
    trips.push_back({p0 + j, mu, mean[j]});
    trips.push_back({mu, p0 + j, mean[j]});
  }

  std::vector<double> rhs(n, 0.0);
  std::vector<double> load = assemble_load(V, problem.body_force, kVolumeDegree);
  std::copy(load.begin(), load.end(), rhs.begin());

  std::vector<char> constrained(n, 0);
  std::vector<double> values(n, 0.0);
  for (auto [dof, value] : essential_bc(V, problem.velocity)) {
    constrained[dof] = 1;
    values[dof] = value;
  }
  apply_dirichlet(trips, rhs, constrained, values);
  std::vector<double> x = lu_solve(from_triplets(n, n, std::move(trips)), rhs);

  std::copy(x.begin(), x.begin() + V.n_dofs, state.u.coeffs.begin());
  std::copy(x.begin() + p0, x.begin() + p0 + Q.n_dofs, state.p.coeffs.begin());
  state.mean_multiplier = x[mu];
}

// One linear Maxwell solve (a_m and the divergence-free constraint).
void maxwell_seed(MhdState& state, const BenchmarkProblem& problem,
                  const MhdSpaces& spaces) {
  const DofMap& C = spaces.magnetic;
  const DofMap& Smul = spaces.multiplier;
  const int n = C.n_dofs + Smul.n_dofs;
  const int r0 = C.n_dofs;

  std::vector<Triplet> trips;
  SparseMatrix am = assemble_am(C, problem.params.Rm, problem.params.S);
  for (int i = 0; i < am.n_rows; ++i)
    for (int k = am.row_offsets[i]; k < am.row_offsets[i + 1]; ++k)
      trips.push_back({i, am.col_indices[k], am.values[k]});
  SparseMatrix grad = assemble_gradient(C, Smul);
  for (int i = 0; i < grad.n_rows; ++i) {
    for (int k = grad.row_offsets[i]; k < grad.row_offsets[i + 1]; ++k) {
      trips.push_back({i, r0 + grad.col_indices[k], -grad.values[k]});
      trips.push_back({r0 + grad.col_indices[k], i, grad.values[k]});
    }
  }

  std::vector<double> rhs(n, 0.0);
  std::vector<double> load = assemble_load(C, problem.magnetic_source, kVolumeDegree);
  std::copy(load.begin(), load.end(), rhs.begin());

  std::vector<char> constrained(n, 0);
  std::vector<double> values(n, 0.0);
  for (auto [dof, value] : essential_bc(C, problem.magnetic)) {
    constrained[dof] = 1;
    values[dof] = value;
  }
  for (auto [dof, value] : essential_bc(Smul, problem.multiplier)) {
    constrained[r0 + dof] = 1;
    values[r0 + dof] = value;
  }
  apply_dirichlet(trips, rhs, constrained, values);
  std::vector<double> x = lu_solve(from_triplets(n, n, std::move(trips)), rhs);

  std::copy(x.begin(), x.begin() + C.n_dofs, state.b.coeffs.begin());
  std::copy(x.begin() + r0, x.end(), state.r.coeffs.begin());
}

}  // namespace

double h1_seminorm(const FeFunction& w) {
  const DofMap& map = *w.space;
  const Mesh& mesh = *map.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  double s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double wq = rule.weights[q] * g.det;
      if (map.kind == ElementKind::VectorP2) {
        Mat2 grad = eval_vector_grad(w, t, rule.points[q], g);
        s += wq * frobenius_dot(grad, grad);
      } else {
        Vec2 grad = eval_scalar_grad(w, t, rule.points[q], g);
        s += wq * dot(grad, grad);
      }
    }
  }
  return std::sqrt(s);
}

double l2_norm(const FeFunction& w) {
  const DofMap& map = *w.space;
  const Mesh& mesh = *map.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  double s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double wq = rule.weights[q] * g.det;
      if (is_vector_element(map.kind)) {
        Vec2 v = eval_vector(w, t, rule.points[q], g);
        s += wq * dot(v, v);
      } else {
        double v = eval_scalar(w, t, rule.points[q]);
        s += wq * v * v;
      }
    }
  }
  return std::sqrt(s);
}

MhdState initial_state(const BenchmarkProblem& problem, const MhdSpaces& spaces,
                       InitialGuess guess) {
  MhdState state = zero_state(spaces);
  set_boundary_values(state, problem, spaces);
  if (guess == InitialGuess::DecoupledLinear) {
    stokes_seed(state, problem, spaces);
    maxwell_seed(state, problem, spaces);
    set_boundary_values(state, problem, spaces);
  }
  return state;
}

NewtonResult newton_solve(const BenchmarkProblem& problem, const MhdSpaces& spaces,
                          const NewtonConfig& config) {
  if (config.tol <= 0.0 || config.max_iter < 1)
    throw std::invalid_argument("newton_solve: invalid configuration");

  NewtonResult result;
  result.state = initial_state(problem, spaces, config.initial_guess);
  BlockLayout layout = spaces.layout();
  std::vector<double> x = pack_state(result.state, layout);

  std::unique_ptr<SparseLu> lu;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    BlockSystem sys = assemble_newton_system(result.state, problem, spaces);
    if (!config.dump_dir.empty()) {
      std::ofstream os(config.dump_dir + "/newton_system_" + std::to_string(iter) +
                       ".txt");
      write_matrix_coordinate(sys.matrix, os);
    }
    if (!lu)
      lu = std::make_unique<SparseLu>(sys.matrix);
    else
      lu->refactorize(sys.matrix);
    std::vector<double> delta = lu->solve(sys.rhs);

    // solver harness contract: relative residual of every solve <= 1e-10
    std::vector<double> res = sys.matrix.multiply(delta);
    for (size_t i = 0; i < res.size(); ++i) res[i] -= sys.rhs[i];
    double rhs_norm = norm2(sys.rhs);
    double rel = norm2(res) / (rhs_norm > 0.0 ? rhs_norm : 1.0);
    if (!(rel <= 1e-10))
      throw std::runtime_error("newton_solve: linear solve residual " +
                               std::to_string(rel) + " exceeds 1e-10");

    for (size_t i = 0; i < x.size(); ++i) x[i] += delta[i];
    result.state = unpack_state(x, spaces);
    FeFunction du{&spaces.velocity,
                  std::vector<double>(delta.begin() + layout.u0(),
                                      delta.begin() + layout.u0() + layout.n_u)};
    double increment = h1_seminorm(du);
    result.increments.push_back(increment);
    result.iterations = iter;

    if (increment <= config.tol) {
      // converged; check the residual against the data scale
      std::vector<double> residual = assemble_residual(result.state, problem, spaces);
      double rnorm = 0.0;
      for (int d = 0; d < layout.n_u; ++d)
        if (!spaces.velocity.dof_on_boundary[d])
          rnorm += residual[layout.u0() + d] * residual[layout.u0() + d];
      for (int d = 0; d < layout.n_p; ++d)
        rnorm += residual[layout.p0() + d] * residual[layout.p0() + d];
      for (int d = 0; d < layout.n_b; ++d)
        if (!spaces.magnetic.dof_on_boundary[d])
          rnorm += residual[layout.b0() + d] * residual[layout.b0() + d];
      for (int d = 0; d < layout.n_r; ++d)
        if (!spaces.multiplier.dof_on_boundary[d])
          rnorm += residual[layout.r0() + d] * residual[layout.r0() + d];
      rnorm = std::sqrt(rnorm);
      double scale = data_norm(problem, spaces);
      if (scale == 0.0) scale = 1.0;
      if (!(rnorm <= 1e-8 * scale))
        throw std::runtime_error("newton_solve: converged increment but residual " +
                                 std::to_string(rnorm / scale) +
                                 " above 1e-8 of the data norm");
      double pmean = 0.0;
      std::vector<double> mean = assemble_mean_row(spaces.pressure);
      for (int d = 0; d < layout.n_p; ++d) pmean += mean[d] * result.state.p.coeffs[d];
      double pnorm = l2_norm(result.state.p);
      if (pnorm > 0.0 && !(std::abs(pmean) <= 1e-10 * pnorm))
        throw std::runtime_error("newton_solve: pressure mean " +
                                 std::to_string(pmean) + " not zero");
      return result;
    }
  }
  std::string message = "newton_solve: no convergence within " +
                        std::to_string(config.max_iter) + " iterations; history:";
  for (double inc : result.increments) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.3e", inc);
    message += buf;
  }
  throw NonconvergenceError(message, std::move(result.increments));
}

}  // namespace mhd
