#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <future>
#include <random>

#include "mhd/forms.hpp"
#include "test_problems.hpp"

using namespace mhd;

namespace {

std::vector<std::vector<double>> to_dense(const SparseMatrix& a) {
  std::vector<std::vector<double>> d(a.n_rows, std::vector<double>(a.n_cols, 0.0));
  for (int i = 0; i < a.n_rows; ++i)
    for (int k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
      d[i][a.col_indices[k]] += a.values[k];
  return d;
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

double max_entry_diff(const SparseMatrix& a, const SparseMatrix& b) {
  auto da = to_dense(a), db = to_dense(b);
  double m = 0.0;
  for (int i = 0; i < a.n_rows; ++i)
    for (int j = 0; j < a.n_cols; ++j) m = std::max(m, std::abs(da[i][j] - db[i][j]));
  return m;
}

// dense block of the Newton matrix
std::vector<std::vector<double>> dense_block(const SparseMatrix& j, int r0, int nr,
                                             int c0, int nc) {
  std::vector<std::vector<double>> d(nr, std::vector<double>(nc, 0.0));
  for (int i = 0; i < j.n_rows; ++i) {
    if (i < r0 || i >= r0 + nr) continue;
    for (int k = j.row_offsets[i]; k < j.row_offsets[i + 1]; ++k) {
      int c = j.col_indices[k];
      if (c < c0 || c >= c0 + nc) continue;
      d[i - r0][c - c0] += j.values[k];
    }
  }
  return d;
}

double block_vs_sparse(const std::vector<std::vector<double>>& block,
                       const SparseMatrix& ref, double scale = 1.0) {
  auto dref = to_dense(ref);
  double m = 0.0;
  for (size_t i = 0; i < block.size(); ++i)
    for (size_t j = 0; j < block[i].size(); ++j)
      m = std::max(m, std::abs(block[i][j] - scale * dref[i][j]));
  return m;
}

FeFunction random_function(const DofMap& space, unsigned seed, double amp = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> val(-amp, amp);
  FeFunction f = zero_function(space);
  for (double& c : f.coeffs) c = val(rng);
  return f;
}

// coefficients of the discrete gradient of a P1 function in the edge space
FeFunction discrete_gradient(const FeFunction& s, const DofMap& edge_space) {
  const Mesh& mesh = *edge_space.mesh;
  FeFunction g = zero_function(edge_space);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    double jump = s.coeffs[mesh.edges[e][1]] - s.coeffs[mesh.edges[e][0]];
    if (edge_space.kind == ElementKind::Nedelec1Low)
      g.coeffs[e] = jump;
    else
      g.coeffs[2 * e] = jump;  // the linear moment of a constant tangent is 0
  }
  return g;
}

}  // namespace

TEST_CASE("a_s: constants in the kernel and linear scaling in 1/Re") {
  Mesh mesh = uniform_unit_square(4);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  SparseMatrix as = assemble_as(v, 1.0);
  FeFunction ones = interpolate(v, VectorField([](Vec2) { return Vec2{1.0, 1.0}; }));
  std::vector<double> y = as.multiply(ones.coeffs);
  for (double val : y) CHECK(std::abs(val) <= 1e-13);

  SparseMatrix as2 = assemble_as(v, 2.0);
  CHECK(max_entry_diff(as2, as) >= 0.0);
  auto d1 = to_dense(as), d2 = to_dense(as2);
  for (int i = 0; i < as.n_rows; ++i)
    for (int j = 0; j < as.n_cols; ++j)
      CHECK(d2[i][j] == doctest::Approx(0.5 * d1[i][j]).epsilon(1e-14));
}

TEST_CASE("a_s energy of u = (x, 0) is 1") {
  Mesh mesh = uniform_unit_square(3);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  SparseMatrix as = assemble_as(v, 1.0);
  FeFunction u = interpolate(v, VectorField([](Vec2 p) { return Vec2{p.x, 0.0}; }));
  std::vector<double> y = as.multiply(u.coeffs);
  double energy = 0.0;
  for (int i = 0; i < v.n_dofs; ++i) energy += u.coeffs[i] * y[i];
  CHECK(energy == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("a_s and a_m are symmetric") {
  Mesh mesh = uniform_unit_square(3);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  SparseMatrix as = assemble_as(v, 1.0);
  CHECK(max_entry_diff(as, as.transposed()) <= 1e-14);
  for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
    DofMap c = make_dof_map(mesh, kind);
    SparseMatrix am = assemble_am(c, 1.0, 1.0);
    CHECK(max_entry_diff(am, am.transposed()) <= 1e-14);
  }
}

TEST_CASE("a_m: discrete gradients lie in the kernel") {
  Mesh mesh = uniform_lshape(3);
  DofMap s = make_dof_map(mesh, ElementKind::LagrangeP1);
  for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
    DofMap c = make_dof_map(mesh, kind);
    SparseMatrix am = assemble_am(c, 1.0, 1.0);
    FeFunction sh = random_function(s, 21);
    FeFunction grad = discrete_gradient(sh, c);
    // a_m(c, c) evaluated at the quadrature level: the pointwise curl of a
    // discrete gradient cancels exactly
    const QuadratureRule& rule = triangle_rule(kVolumeDegree);
    double energy = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      CellGeometry g = cell_geometry(mesh, t);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        double curl = eval_vector_curl(grad, t, rule.points[q], g);
        energy += rule.weights[q] * g.det * curl * curl;
      }
    }
    CHECK(std::abs(energy) <= 1e-20);
    std::vector<double> y = am.multiply(grad.coeffs);
    for (double val : y) CHECK(std::abs(val) <= 1e-12);
  }
}

TEST_CASE("a_m energy of the unit-curl rotational field is 1, scaling in S") {
  Mesh mesh = uniform_unit_square(3);
  for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
    DofMap c = make_dof_map(mesh, kind);
    SparseMatrix am = assemble_am(c, 1.0, 1.0);
    FeFunction b = interpolate(
        c, VectorField([](Vec2 p) { return Vec2{-0.5 * p.y, 0.5 * p.x}; }));
    std::vector<double> y = am.multiply(b.coeffs);
    double energy = 0.0;
    for (int i = 0; i < c.n_dofs; ++i) energy += b.coeffs[i] * y[i];
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-13));

    SparseMatrix am2 = assemble_am(c, 1.0, 2.0);
    auto d1 = to_dense(am), d2 = to_dense(am2);
    for (int i = 0; i < am.n_rows; ++i)
      for (int j = 0; j < am.n_cols; ++j)
        CHECK(d2[i][j] == doctest::Approx(2.0 * d1[i][j]).epsilon(1e-14));
  }
}

TEST_CASE("c0: skew-symmetry and the half-term value") {
  Mesh mesh = uniform_unit_square(3);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  FeFunction w = interpolate(v, VectorField([](Vec2 p) {
                               return Vec2{std::sin(p.x + p.y), p.x * p.y};
                             }));
  SparseMatrix c0 = assemble_c0_conv(FrozenVectorField(w), v);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> x(v.n_dofs);
    double norm_sq = 0.0;
    for (double& xi : x) {
      xi = val(rng);
      norm_sq += xi * xi;
    }
    std::vector<double> y = c0.multiply(x);
    double quad = 0.0;
    for (int i = 0; i < v.n_dofs; ++i) quad += x[i] * y[i];
    CHECK(std::abs(quad) <= 1e-12 * norm_sq);
  }

  // zero transport field gives the zero matrix
  FeFunction zero = zero_function(v);
  SparseMatrix c0z = assemble_c0_conv(FrozenVectorField(zero), v);
  CHECK(max_abs(c0z) <= 1e-16);

  // cross-check: the first half-term (w.grad u, v)/2 alone equals 1/4 for
  // w = (1,0), u = v = (x,0), computed with an independent quadrature loop
  FeFunction wconst = interpolate(v, VectorField([](Vec2) { return Vec2{1.0, 0.0}; }));
  FeFunction u = interpolate(v, VectorField([](Vec2 p) { return Vec2{p.x, 0.0}; }));
  const QuadratureRule& rule = triangle_rule(6);
  double half_term = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Vec2 wv = eval_vector(wconst, t, rule.points[q], g);
      Mat2 gu = eval_vector_grad(u, t, rule.points[q], g);
      Vec2 uv = eval_vector(u, t, rule.points[q], g);
      Vec2 conv{wv.x * gu.m[0][0] + wv.y * gu.m[0][1],
                wv.x * gu.m[1][0] + wv.y * gu.m[1][1]};
      half_term += 0.5 * rule.weights[q] * g.det * dot(conv, uv);
    }
  }
  CHECK(half_term == doctest::Approx(0.25).epsilon(1e-13));

  // and the skew form value for u = v vanishes
  SparseMatrix c0c = assemble_c0_conv(FrozenVectorField(wconst), v);
  std::vector<double> y = c0c.multiply(u.coeffs);
  double quad = 0.0;
  for (int i = 0; i < v.n_dofs; ++i) quad += u.coeffs[i] * y[i];
  CHECK(std::abs(quad) <= 1e-13);
}

TEST_CASE("c1: adjoint identity between the two assembly routes") {
  Mesh mesh = uniform_unit_square(3);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
    DofMap c = make_dof_map(mesh, kind);
    FeFunction d = interpolate(c, VectorField([](Vec2 p) {
                                 return Vec2{std::cos(p.y), std::sin(p.x)};
                               }));
    SparseMatrix direct = assemble_c1_dfrozen(FrozenVectorField(d), v, c, 1.3);
    SparseMatrix adjoint = assemble_c1_dfrozen_adjoint(FrozenVectorField(d), v, c, 1.3);
    CHECK(max_entry_diff(direct, adjoint) <= 1e-12 * std::max(1.0, max_abs(direct)));
  }
}

TEST_CASE("c1: frozen-field examples") {
  Mesh mesh = uniform_unit_square(3);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  DofMap c = make_dof_map(mesh, ElementKind::Nedelec1Low);

  FeFunction zero = zero_function(c);
  SparseMatrix c1z = assemble_c1_dfrozen(FrozenVectorField(zero), v, c, 1.0);
  CHECK(max_abs(c1z) <= 1e-16);

  // d = (0,1), v = (1,0), curl c = 1: c1 = -S |Omega|
  FeFunction d = interpolate(c, VectorField([](Vec2) { return Vec2{0.0, 1.0}; }));
  FeFunction vf = interpolate(v, VectorField([](Vec2) { return Vec2{1.0, 0.0}; }));
  FeFunction rot = interpolate(
      c, VectorField([](Vec2 p) { return Vec2{-0.5 * p.y, 0.5 * p.x}; }));
  for (double s : {1.0, 2.5}) {
    SparseMatrix c1 = assemble_c1_dfrozen(FrozenVectorField(d), v, c, s);
    std::vector<double> y = c1.multiply(rot.coeffs);
    double value = 0.0;
    for (int i = 0; i < v.n_dofs; ++i) value += vf.coeffs[i] * y[i];
    CHECK(value == doctest::Approx(-s).epsilon(1e-13));
  }

  // discrete-gradient columns vanish (curl of a gradient is zero)
  DofMap s_space = make_dof_map(mesh, ElementKind::LagrangeP1);
  FeFunction sh = random_function(s_space, 17);
  FeFunction grad = discrete_gradient(sh, c);
  SparseMatrix c1 = assemble_c1_dfrozen(FrozenVectorField(d), v, c, 1.0);
  std::vector<double> y = c1.multiply(grad.coeffs);
  for (double val : y) CHECK(std::abs(val) <= 1e-13);
}

TEST_CASE("mixed constraint blocks") {
  Mesh mesh = uniform_unit_square(3);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  DofMap qspace = make_dof_map(mesh, ElementKind::LagrangeP1);
  DofMap c = make_dof_map(mesh, ElementKind::Nedelec1Low);
  SparseMatrix div = assemble_divergence(v, qspace);

  FeFunction div_free =
      interpolate(v, VectorField([](Vec2 p) { return Vec2{p.x, -p.y}; }));
  FeFunction linear_x = interpolate(v, VectorField([](Vec2 p) { return Vec2{p.x, 0.0}; }));
  FeFunction one = interpolate(qspace, ScalarField([](Vec2) { return 1.0; }));

  std::vector<double> y = div.transposed().multiply(div_free.coeffs);
  double val = 0.0;
  for (int i = 0; i < qspace.n_dofs; ++i) val += one.coeffs[i] * y[i];
  CHECK(std::abs(val) <= 1e-13);

  y = div.transposed().multiply(linear_x.coeffs);
  val = 0.0;
  for (int i = 0; i < qspace.n_dofs; ++i) val += one.coeffs[i] * y[i];
  CHECK(val == doctest::Approx(1.0).epsilon(1e-13));

  SparseMatrix grad = assemble_gradient(c, qspace);
  FeFunction rx = interpolate(qspace, ScalarField([](Vec2 p) { return p.x; }));
  FeFunction cx = interpolate(c, VectorField([](Vec2) { return Vec2{1.0, 0.0}; }));
  y = grad.multiply(rx.coeffs);
  val = 0.0;
  for (int i = 0; i < c.n_dofs; ++i) val += cx.coeffs[i] * y[i];
  CHECK(val == doctest::Approx(1.0).epsilon(1e-13));

  std::vector<double> mean = assemble_mean_row(qspace);
  double total = 0.0;
  for (int i = 0; i < qspace.n_dofs; ++i) total += mean[i] * one.coeffs[i];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("newton system: zero state with zero data has zero rhs") {
  Mesh mesh = uniform_unit_square(3);
  for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
    MhdSpaces spaces = make_spaces(mesh, kind);
    MhdState state = zero_state(spaces);
    BlockSystem sys = assemble_newton_system(state, testing::zero_problem(), spaces);
    for (double r : sys.rhs) CHECK(std::abs(r) <= 1e-15);
  }
}

TEST_CASE("newton system at zero state block-decouples") {
  Mesh mesh = uniform_unit_square(2);
  MhdSpaces spaces = make_spaces(mesh, ElementKind::Nedelec1Low);
  MhdState state = zero_state(spaces);
  BlockSystem sys =
      assemble_newton_system(state, testing::polynomial_problem(), spaces, false);
  BlockLayout l = sys.layout;
  auto ub = dense_block(sys.matrix, l.u0(), l.n_u, l.b0(), l.n_b);
  auto bu = dense_block(sys.matrix, l.b0(), l.n_b, l.u0(), l.n_u);
  for (const auto& row : ub)
    for (double x : row) CHECK(std::abs(x) <= 1e-15);
  for (const auto& row : bu)
    for (double x : row) CHECK(std::abs(x) <= 1e-15);
}

TEST_CASE("newton jacobian blocks match the standalone assemblies") {
  Mesh mesh = uniform_unit_square(2);
  for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
    MhdSpaces spaces = make_spaces(mesh, kind);
    MhdState state = zero_state(spaces);
    state.u = random_function(spaces.velocity, 41, 0.5);
    state.p = random_function(spaces.pressure, 42, 0.5);
    state.b = random_function(spaces.magnetic, 43, 0.5);
    state.r = random_function(spaces.multiplier, 44, 0.5);
    state.mean_multiplier = 0.3;
    BenchmarkProblem prob = testing::polynomial_problem();
    BlockSystem sys = assemble_newton_system(state, prob, spaces, false);
    BlockLayout l = sys.layout;
    const double S = prob.params.S;

    // (u,u): a_s + c0(u; ., .) + c0(.; u, .)
    auto uu = dense_block(sys.matrix, l.u0(), l.n_u, l.u0(), l.n_u);
    SparseMatrix as = assemble_as(spaces.velocity, prob.params.Re);
    SparseMatrix conv = assemble_c0_conv(FrozenVectorField(state.u), spaces.velocity);
    SparseMatrix react = assemble_c0_react(FrozenVectorField(state.u), spaces.velocity);
    auto da = to_dense(as), dc = to_dense(conv), dr = to_dense(react);
    double m = 0.0;
    for (int i = 0; i < l.n_u; ++i)
      for (int j = 0; j < l.n_u; ++j)
        m = std::max(m, std::abs(uu[i][j] - da[i][j] - dc[i][j] - dr[i][j]));
    CHECK(m <= 1e-12);

    // (u,b): -c1(b; v, db) - c1(db; v, b)
    auto ub = dense_block(sys.matrix, l.u0(), l.n_u, l.b0(), l.n_b);
    SparseMatrix dfro =
        assemble_c1_dfrozen(FrozenVectorField(state.b), spaces.velocity,
                            spaces.magnetic, S);
    SparseMatrix cfro =
        assemble_c1_curlfrozen(FrozenVectorField(state.b), spaces.velocity,
                               spaces.magnetic, S);
    auto dd = to_dense(dfro), dcf = to_dense(cfro);
    m = 0.0;
    for (int i = 0; i < l.n_u; ++i)
      for (int j = 0; j < l.n_b; ++j)
        m = std::max(m, std::abs(ub[i][j] + dd[i][j] + dcf[i][j]));
    CHECK(m <= 1e-12);

    // (b,u): transpose of c1_dfrozen
    auto bu = dense_block(sys.matrix, l.b0(), l.n_b, l.u0(), l.n_u);
    m = 0.0;
    for (int i = 0; i < l.n_b; ++i)
      for (int j = 0; j < l.n_u; ++j) m = std::max(m, std::abs(bu[i][j] - dd[j][i]));
    CHECK(m <= 1e-12);

    // (b,b): a_m + c1(db; u, c)
    auto bb = dense_block(sys.matrix, l.b0(), l.n_b, l.b0(), l.n_b);
    SparseMatrix am = assemble_am(spaces.magnetic, prob.params.Rm, S);
    SparseMatrix ufro = assemble_c1_ufrozen(FrozenVectorField(state.u),
                                            spaces.magnetic, S);
    auto dam = to_dense(am), duf = to_dense(ufro);
    m = 0.0;
    for (int i = 0; i < l.n_b; ++i)
      for (int j = 0; j < l.n_b; ++j)
        m = std::max(m, std::abs(bb[i][j] - dam[i][j] - duf[i][j]));
    CHECK(m <= 1e-12);

    // (u,p) and (p,u): divergence in both roles
    auto up = dense_block(sys.matrix, l.u0(), l.n_u, l.p0(), l.n_p);
    CHECK(block_vs_sparse(up, assemble_divergence(spaces.velocity, spaces.pressure),
                          -1.0) <= 1e-12);
    auto pu = dense_block(sys.matrix, l.p0(), l.n_p, l.u0(), l.n_u);
    CHECK(block_vs_sparse(
              pu, assemble_divergence(spaces.velocity, spaces.pressure).transposed(),
              1.0) <= 1e-12);

    // (b,r) and (r,b): gradient in both roles
    auto br = dense_block(sys.matrix, l.b0(), l.n_b, l.r0(), l.n_r);
    CHECK(block_vs_sparse(br, assemble_gradient(spaces.magnetic, spaces.multiplier),
                          -1.0) <= 1e-12);
    auto rb = dense_block(sys.matrix, l.r0(), l.n_r, l.b0(), l.n_b);
    CHECK(block_vs_sparse(
              rb, assemble_gradient(spaces.magnetic, spaces.multiplier).transposed(),
              1.0) <= 1e-12);
  }
}

TEST_CASE("newton jacobian matches finite differences of the residual") {
  for (int m : {4, 8}) {
    Mesh mesh = uniform_unit_square(m);
    for (ElementKind kind : {ElementKind::Nedelec1Low, ElementKind::Nedelec2Low}) {
      MhdSpaces spaces = make_spaces(mesh, kind);
      BenchmarkProblem prob = example41();
      MhdState state = zero_state(spaces);
      state.u = random_function(spaces.velocity, 51, 0.3);
      state.p = random_function(spaces.pressure, 52, 0.3);
      state.b = random_function(spaces.magnetic, 53, 0.3);
      state.r = random_function(spaces.multiplier, 54, 0.3);
      state.mean_multiplier = 0.1;

      BlockSystem sys = assemble_newton_system(state, prob, spaces, false);
      BlockLayout l = sys.layout;
      std::mt19937 rng(55);
      std::uniform_real_distribution<double> val(-1.0, 1.0);
      std::vector<double> delta(l.total());
      for (double& d : delta) d = val(rng);

      const double eps = 1e-7;
      std::vector<double> x = pack_state(state, l);
      std::vector<double> x_pert = x;
      for (int i = 0; i < l.total(); ++i) x_pert[i] += eps * delta[i];
      MhdState pert = unpack_state(x_pert, spaces);
      std::vector<double> r0 = assemble_residual(state, prob, spaces);
      std::vector<double> r1 = assemble_residual(pert, prob, spaces);
      std::vector<double> jd = sys.matrix.multiply(delta);
      double num = 0.0, den = 0.0;
      for (int i = 0; i < l.total(); ++i) {
        double fd = (r1[i] - r0[i]) / eps;
        num += (fd - jd[i]) * (fd - jd[i]);
        den += jd[i] * jd[i];
      }
      CHECK(std::sqrt(num / den) <= 1e-6);
    }
  }
}

TEST_CASE("newton system: dimension mismatch is rejected") {
  Mesh mesh = uniform_unit_square(2);
  MhdSpaces spaces = make_spaces(mesh, ElementKind::Nedelec1Low);
  MhdState state = zero_state(spaces);
  state.b.coeffs.pop_back();
  CHECK_THROWS_AS(
      assemble_newton_system(state, testing::polynomial_problem(), spaces),
      std::exception);
}

TEST_CASE("newton matrix has a symmetric sparsity pattern") {
  Mesh mesh = uniform_unit_square(2);
  MhdSpaces spaces = make_spaces(mesh, ElementKind::Nedelec1Low);
  MhdState state = zero_state(spaces);
  state.u = random_function(spaces.velocity, 61, 0.4);
  state.b = random_function(spaces.magnetic, 62, 0.4);
  BlockSystem sys =
      assemble_newton_system(state, testing::polynomial_problem(), spaces, false);
  auto dense = to_dense(sys.matrix);
  std::vector<std::vector<char>> pattern(sys.matrix.n_rows,
                                         std::vector<char>(sys.matrix.n_cols, 0));
  for (int i = 0; i < sys.matrix.n_rows; ++i)
    for (int k = sys.matrix.row_offsets[i]; k < sys.matrix.row_offsets[i + 1]; ++k)
      pattern[i][sys.matrix.col_indices[k]] = 1;
  for (int i = 0; i < sys.matrix.n_rows; ++i)
    for (int j = 0; j < sys.matrix.n_cols; ++j) CHECK(pattern[i][j] == pattern[j][i]);
}

TEST_CASE("parallel chunked assembly matches sequential accumulation") {
  Mesh mesh = uniform_unit_square(6);
  DofMap v = make_dof_map(mesh, ElementKind::VectorP2);
  SparseMatrix seq = assemble_as(v, 1.0);

  // assemble per-chunk triplet buffers concurrently and merge
  const int nchunk = 4;
  std::vector<std::future<std::vector<Triplet>>> futures;
  for (int chunk = 0; chunk < nchunk; ++chunk) {
    futures.push_back(std::async(std::launch::async, [&, chunk] {
      const QuadratureRule& rule = triangle_rule(kVolumeDegree);
      std::vector<Triplet> trips;
      int lo = chunk * mesh.n_triangles() / nchunk;
      int hi = (chunk + 1) * mesh.n_triangles() / nchunk;
      for (int t = lo; t < hi; ++t) {
        CellGeometry g = cell_geometry(mesh, t);
        for (size_t q = 0; q < rule.points.size(); ++q) {
          Tabulation tab = tabulate(ElementKind::LagrangeP2, rule.points[q]);
          Vec2 grads[6];
          for (int i = 0; i < 6; ++i) grads[i] = g.jac_inv_t * tab.ref_grad[i];
          double wq = rule.weights[q] * g.det;
          for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
              for (int c = 0; c < 2; ++c)
                trips.push_back({v.dof(t, 2 * i + c), v.dof(t, 2 * j + c),
                                 wq * dot(grads[i], grads[j])});
        }
      }
      return trips;
    }));
  }
  std::vector<Triplet> merged;
  for (auto& f : futures) {
    std::vector<Triplet> part = f.get();
    merged.insert(merged.end(), part.begin(), part.end());
  }
  SparseMatrix par = from_triplets(v.n_dofs, v.n_dofs, std::move(merged));
  double scale = max_abs(seq);
  CHECK(max_entry_diff(par, seq) <= 1e-12 * scale);
}

TEST_CASE("apply_dirichlet moves prescribed values to the rhs") {
  // 2x2 system [[2,1],[1,3]] x = [1,2] with x1 pinned to 5
  std::vector<Triplet> trips = {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 3.0}};
  std::vector<double> rhs = {1.0, 2.0};
  std::vector<char> constrained = {0, 1};
  std::vector<double> values = {0.0, 5.0};
  apply_dirichlet(trips, rhs, constrained, values);
  SparseMatrix a = from_triplets(2, 2, trips);
  std::vector<double> x = lu_solve(a, rhs);
  CHECK(x[1] == doctest::Approx(5.0));
  CHECK(x[0] == doctest::Approx((1.0 - 5.0) / 2.0));
}
