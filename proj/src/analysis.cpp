#include "mhd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace mhd {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string rate_cell(double rate) {
  if (!std::isfinite(rate)) return "-";
  return fmt("%.3f", rate);
}

}  // namespace

double rate_between(double coarse, double fine) {
  if (!(coarse > 1e-12) || !(fine > 1e-12))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

ErrorReport error_norms(const MhdState& state, const BenchmarkProblem& problem,
                        const MhdSpaces& spaces) {
  const Mesh& mesh = *spaces.mesh;
  const QuadratureRule& rule = triangle_rule(kExactDegree);
  ErrorReport report;
  report.h = mesh.max_diameter();
  report.dofs = spaces.layout().total();

  double l2_u = 0, h1_u = 0, l2_p = 0, l2_b = 0, curl_b = 0, l2_r = 0, h1_r = 0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const Bary& bary = rule.points[q];
      double wq = rule.weights[q] * g.det;
      Vec2 xy = g.point(bary);

      Vec2 du = problem.velocity(xy) - eval_vector(state.u, t, bary, g);
      Mat2 dgu = problem.velocity_grad(xy) - eval_vector_grad(state.u, t, bary, g);
      double dp = problem.pressure(xy) - eval_scalar(state.p, t, bary);
      Vec2 db = problem.magnetic(xy) - eval_vector(state.b, t, bary, g);
      double dcb = problem.magnetic_curl(xy) - eval_vector_curl(state.b, t, bary, g);
      double dr = problem.multiplier(xy) - eval_scalar(state.r, t, bary);
      Vec2 dgr = problem.multiplier_grad(xy) - eval_scalar_grad(state.r, t, bary, g);

      l2_u += wq * dot(du, du);
      h1_u += wq * frobenius_dot(dgu, dgu);
      l2_p += wq * dp * dp;
      l2_b += wq * dot(db, db);
      curl_b += wq * dcb * dcb;
      l2_r += wq * dr * dr;
      h1_r += wq * dot(dgr, dgr);
    }
  }
  report.l2_u = std::sqrt(l2_u);
  report.h1semi_u = std::sqrt(h1_u);
  report.l2_p = std::sqrt(l2_p);
  report.l2_b = std::sqrt(l2_b);
  report.hcurl_b = std::sqrt(l2_b + curl_b);
  report.h1_r = std::sqrt(l2_r + h1_r);
  report.hminus1_b = discrete_hminus1_vector(
      mesh, [&](int t, const CellGeometry& g, const Bary& bary) {
        return problem.magnetic(g.point(bary)) - eval_vector(state.b, t, bary, g);
      });
  return report;
}

namespace {

double dual_norm(const DofMap& space, const std::vector<double>& load) {
  SparseMatrix k = assemble_h1_product(space);
  std::vector<Triplet> trips;
  trips.reserve(k.nnz());
  for (int i = 0; i < k.n_rows; ++i)
    for (int kk = k.row_offsets[i]; kk < k.row_offsets[i + 1]; ++kk)
      trips.push_back({i, k.col_indices[kk], k.values[kk]});
  std::vector<double> rhs = load;
  std::vector<char> constrained(space.n_dofs, 0);
  std::vector<double> values(space.n_dofs, 0.0);
  for (int d : space.boundary_dofs) {
    constrained[d] = 1;
    rhs[d] = 0.0;
  }
  apply_dirichlet(trips, rhs, constrained, values);
  std::vector<double> riesz =
      lu_solve(from_triplets(space.n_dofs, space.n_dofs, std::move(trips)), rhs);
  double s = 0.0;
  for (int d = 0; d < space.n_dofs; ++d)
    if (!constrained[d]) s += rhs[d] * riesz[d];
  return std::sqrt(std::max(0.0, s));
}

}  // namespace

double discrete_hminus1_vector(const Mesh& mesh, const CellVectorField& field) {
  DofMap space = make_dof_map(mesh, ElementKind::VectorP2);
  const QuadratureRule& rule = triangle_rule(kExactDegree);
  const std::vector<double> empty;
  std::vector<double> load(space.n_dofs, 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Tabulation tab = tabulate(ElementKind::LagrangeP2, rule.points[q]);
      Vec2 fv = field(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < 6; ++i) {
        load[space.dof(t, 2 * i)] += wq * fv.x * tab.value[i];
        load[space.dof(t, 2 * i + 1)] += wq * fv.y * tab.value[i];
      }
    }
  }
  return dual_norm(space, load);
}

double discrete_hminus1_scalar(const Mesh& mesh, const CellScalarField& field) {
  DofMap space = make_dof_map(mesh, ElementKind::LagrangeP2);
  const QuadratureRule& rule = triangle_rule(kExactDegree);
  std::vector<double> load(space.n_dofs, 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Tabulation tab = tabulate(ElementKind::LagrangeP2, rule.points[q]);
      double fv = field(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < 6; ++i) load[space.dof(t, i)] += wq * fv * tab.value[i];
    }
  }
  return dual_norm(space, load);
}

std::pair<FeFunction, FeFunction> stokes_projection(const BenchmarkProblem& problem,
                                                    const DofMap& velocity,
                                                    const DofMap& pressure) {
  const Mesh& mesh = *velocity.mesh;
  const double Re = problem.params.Re;
  const int n = velocity.n_dofs + pressure.n_dofs + 1;
  const int p0 = velocity.n_dofs, mu = n - 1;

  std::vector<Triplet> trips;
  SparseMatrix as = assemble_as(velocity, Re);
  for (int i = 0; i < as.n_rows; ++i)
    for (int k = as.row_offsets[i]; k < as.row_offsets[i + 1]; ++k)
      trips.push_back({i, as.col_indices[k], as.values[k]});
  SparseMatrix div = assemble_divergence(velocity, pressure);
  for (int i = 0; i < div.n_rows; ++i) {
    for (int k = div.row_offsets[i]; k < div.row_offsets[i + 1]; ++k) {
      trips.push_back({i, p0 + div.col_indices[k], -div.values[k]});
      trips.push_back({p0 + div.col_indices[k], i, div.values[k]});
    }
  }
  std::vector<double> mean = assemble_mean_row(pressure);
  for (int j = 0; j < pressure.n_dofs; ++j) {
    trips.push_back({p0 + j, mu, mean[j]});
    trips.push_back({mu, p0 + j, mean[j]});
  }

  // right-hand side from the exact fields, degree-8 rule
  std::vector<double> rhs(n, 0.0);
  const QuadratureRule& rule = triangle_rule(kExactDegree);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Tabulation tab = tabulate(ElementKind::LagrangeP2, rule.points[q]);
      Tabulation tp1 = tabulate(ElementKind::LagrangeP1, rule.points[q]);
      Vec2 xy = g.point(rule.points[q]);
      Mat2 gu = problem.velocity_grad(xy);
      double pex = problem.pressure(xy);
      double div_u = trace(gu);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < 6; ++i) {
        Vec2 gphi = g.jac_inv_t * tab.ref_grad[i];
        double val = tab.value[i];
        (void)val;
        for (int c = 0; c < 2; ++c) {
          double v = (gu.m[c][0] * gphi.x + gu.m[c][1] * gphi.y) / Re;
          v -= pex * (c == 0 ? gphi.x : gphi.y);
          rhs[velocity.dof(t, 2 * i + c)] += wq * v;
        }
      }
      for (int j = 0; j < 3; ++j) {
        Vec2 gpsi = g.jac_inv_t * tp1.ref_grad[j];
        (void)gpsi;
        rhs[p0 + pressure.dof(t, j)] += wq * div_u * tp1.value[j];
      }
    }
  }

  std::vector<char> constrained(n, 0);
  std::vector<double> values(n, 0.0);
  for (auto [dof, value] : essential_bc(velocity, problem.velocity)) {
    constrained[dof] = 1;
    values[dof] = value;
  }
  apply_dirichlet(trips, rhs, constrained, values);
  std::vector<double> x = lu_solve(from_triplets(n, n, std::move(trips)), rhs);

  FeFunction uh{&velocity, std::vector<double>(x.begin(), x.begin() + velocity.n_dofs)};
  FeFunction ph{&pressure,
                std::vector<double>(x.begin() + p0, x.begin() + p0 + pressure.n_dofs)};
  return {std::move(uh), std::move(ph)};
}

std::pair<FeFunction, FeFunction> maxwell_projection(
    const BenchmarkProblem& problem, const DofMap& magnetic, const DofMap& multiplier,
    MaxwellVariant variant, std::optional<VectorField> velocity_override) {
  const Mesh& mesh = *magnetic.mesh;
  const double Rm = problem.params.Rm, S = problem.params.S;
  const int n = magnetic.n_dofs + multiplier.n_dofs;
  const int r0 = magnetic.n_dofs;

  VectorField u_ex = velocity_override ? *velocity_override : problem.velocity;

  std::vector<Triplet> trips;
  SparseMatrix am = assemble_am(magnetic, Rm, S);
  for (int i = 0; i < am.n_rows; ++i)
    for (int k = am.row_offsets[i]; k < am.row_offsets[i + 1]; ++k)
      trips.push_back({i, am.col_indices[k], am.values[k]});
  {
    // the standard projection carries the same block with a zero field, so
    // the two variants assemble structurally identical systems
    VectorField coupling = variant == MaxwellVariant::Modified
                               ? u_ex
                               : VectorField([](Vec2) { return Vec2{0.0, 0.0}; });
    SparseMatrix c1 =
        assemble_c1_ufrozen(FrozenVectorField(coupling), magnetic, S, kExactDegree);
    for (int i = 0; i < c1.n_rows; ++i)
      for (int k = c1.row_offsets[i]; k < c1.row_offsets[i + 1]; ++k)
        trips.push_back({i, c1.col_indices[k], c1.values[k]});
  }
  SparseMatrix grad = assemble_gradient(magnetic, multiplier);
  for (int i = 0; i < grad.n_rows; ++i) {
    for (int k = grad.row_offsets[i]; k < grad.row_offsets[i + 1]; ++k) {
      trips.push_back({i, r0 + grad.col_indices[k], -grad.values[k]});
      trips.push_back({r0 + grad.col_indices[k], i, grad.values[k]});
    }
  }

  std::vector<double> rhs(n, 0.0);
  const QuadratureRule& rule = triangle_rule(kExactDegree);
  const auto kind = magnetic.kind;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Tabulation tab = tabulate(kind, rule.points[q]);
      Tabulation ts = tabulate(multiplier.kind, rule.points[q]);
      Vec2 xy = g.point(rule.points[q]);
      Vec2 bex = problem.magnetic(xy);
      double curl_bex = problem.magnetic_curl(xy);
      Vec2 grad_rex = problem.multiplier_grad(xy);
      double wq = rule.weights[q] * g.det;
      double uxb = variant == MaxwellVariant::Modified ? cross(u_ex(xy), bex) : 0.0;
      for (int i = 0; i < magnetic.n_local; ++i) {
        double sign = magnetic.sign(t, i);
        Vec2 cvec = sign * (g.jac_inv_t * tab.vec[i]);
        double ccurl = sign * tab.curl[i] / g.det;
        double v = S / Rm * curl_bex * ccurl;
        if (variant == MaxwellVariant::Modified) v -= S * uxb * ccurl;
        v -= dot(grad_rex, cvec);
        rhs[magnetic.dof(t, i)] += wq * v;
      }
      for (int j = 0; j < multiplier.n_local; ++j) {
        Vec2 gpsi = g.jac_inv_t * ts.ref_grad[j];
        rhs[r0 + multiplier.dof(t, j)] += wq * dot(bex, gpsi);
      }
    }
  }

  std::vector<char> constrained(n, 0);
  std::vector<double> values(n, 0.0);
  for (auto [dof, value] : essential_bc(magnetic, problem.magnetic)) {
    constrained[dof] = 1;
    values[dof] = value;
  }
  for (auto [dof, value] : essential_bc(multiplier, problem.multiplier)) {
    constrained[r0 + dof] = 1;
    values[r0 + dof] = value;
  }
  apply_dirichlet(trips, rhs, constrained, values);
  std::vector<double> x = lu_solve(from_triplets(n, n, std::move(trips)), rhs);

  FeFunction bh{&magnetic, std::vector<double>(x.begin(), x.begin() + magnetic.n_dofs)};
  FeFunction rh{&multiplier, std::vector<double>(x.begin() + r0, x.end())};
  return {std::move(bh), std::move(rh)};
}

ConvergenceReport convergence_study(const BenchmarkProblem& problem,
                                    MeshFamilyKind family,
                                    std::span<const int> resolutions,
                                    ElementKind magnetic_kind,
                                    const NewtonConfig& newton, int graded_base) {
  if (resolutions.size() < 2)
    throw std::invalid_argument("convergence_study: need at least 2 resolutions");
  ConvergenceReport report;
  report.element =
      magnetic_kind == ElementKind::Nedelec1Low ? "nedelec1" : "nedelec2";
  switch (family) {
    case MeshFamilyKind::UnitSquareUniform: report.family = "square"; break;
    case MeshFamilyKind::LShapeUniform: report.family = "lshape"; break;
    case MeshFamilyKind::LShapeGraded: report.family = "lshape-graded"; break;
  }
  for (int res : resolutions) {
    Mesh mesh = family_mesh(family, res, graded_base);
    MhdSpaces spaces = make_spaces(mesh, magnetic_kind);
    try {
      NewtonResult result = newton_solve(problem, spaces, newton);
      ErrorReport entry = error_norms(result.state, problem, spaces);
      entry.resolution = res;
      entry.newton_iterations = result.iterations;
      report.entries.push_back(entry);
    } catch (const NonconvergenceError& err) {
      report.aborted = true;
      report.abort_reason = err.what();
      break;
    }
  }
  return report;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "M,h,dofs,err_h1_u,rate_h1_u,err_l2_p,rate_l2_p,err_curl_b,rate_curl_b,"
        "err_h1_r,err_l2_u,err_hm1_b\n";
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const ErrorReport& e = report.entries[i];
    const ErrorReport* prev = i > 0 ? &report.entries[i - 1] : nullptr;
    os << e.resolution << ',' << fmt("%.6e", e.h) << ',' << e.dofs << ','
       << fmt("%.6e", e.h1semi_u) << ','
       << (prev ? rate_cell(rate_between(prev->h1semi_u, e.h1semi_u)) : "-") << ','
       << fmt("%.6e", e.l2_p) << ','
       << (prev ? rate_cell(rate_between(prev->l2_p, e.l2_p)) : "-") << ','
       << fmt("%.6e", e.hcurl_b) << ','
       << (prev ? rate_cell(rate_between(prev->hcurl_b, e.hcurl_b)) : "-") << ','
       << fmt("%.6e", e.h1_r) << ',' << fmt("%.6e", e.l2_u) << ','
       << fmt("%.6e", e.hminus1_b) << '\n';
  }
  return os.str();
}

std::string convergence_markdown(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "Errors for " << report.problem << " (" << report.element << ", "
     << report.family << ")\n\n";
  os << "| M | grad(u-u_h) L2 | rate | p-p_h L2 | rate | b-b_h Hcurl | rate | "
        "r-r_h H1 |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const ErrorReport& e = report.entries[i];
    const ErrorReport* prev = i > 0 ? &report.entries[i - 1] : nullptr;
    os << "| " << e.resolution << " | " << fmt("%.3e", e.h1semi_u) << " | "
       << (prev ? rate_cell(rate_between(prev->h1semi_u, e.h1semi_u)) : "") << " | "
       << fmt("%.3e", e.l2_p) << " | "
       << (prev ? rate_cell(rate_between(prev->l2_p, e.l2_p)) : "") << " | "
       << fmt("%.3e", e.hcurl_b) << " | "
       << (prev ? rate_cell(rate_between(prev->hcurl_b, e.hcurl_b)) : "") << " | "
       << fmt("%.3e", e.h1_r) << " |\n";
  }
  if (report.aborted) os << "\nstudy aborted: " << report.abort_reason << "\n";
  return os.str();
}

ProjectionReport projection_study(const BenchmarkProblem& problem,
                                  std::span<const int> resolutions,
                                  ElementKind magnetic_kind,
                                  std::optional<VectorField> velocity_override) {
  ProjectionReport report;
  report.element = magnetic_kind == ElementKind::Nedelec1Low ? "nedelec1" : "nedelec2";
  MeshFamilyKind family = default_family(problem.domain);
  for (int res : resolutions) {
    Mesh mesh = family_mesh(family, res);
    DofMap magnetic = make_dof_map(mesh, magnetic_kind);
    DofMap multiplier = make_dof_map(mesh, magnetic_kind == ElementKind::Nedelec2Low
                                               ? ElementKind::LagrangeP2
                                               : ElementKind::LagrangeP1);
    DofMap velocity = make_dof_map(mesh, ElementKind::VectorP2);
    DofMap pressure = make_dof_map(mesh, ElementKind::LagrangeP1);

    auto [b_mod, r_mod] = maxwell_projection(problem, magnetic, multiplier,
                                             MaxwellVariant::Modified,
                                             velocity_override);
    auto [b_std, r_std] = maxwell_projection(problem, magnetic, multiplier,
                                             MaxwellVariant::Standard,
                                             velocity_override);
    auto [u_proj, p_proj] = stokes_projection(problem, velocity, pressure);

    ProjectionEntry entry;
    entry.resolution = res;
    entry.h = mesh.max_diameter();

    const QuadratureRule& rule = triangle_rule(kExactDegree);
    double l2 = 0, curl = 0, uh1 = 0, ul2 = 0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      CellGeometry g = cell_geometry(mesh, t);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        Vec2 xy = g.point(rule.points[q]);
        double wq = rule.weights[q] * g.det;
        Vec2 db = problem.magnetic(xy) - eval_vector(b_mod, t, rule.points[q], g);
        double dc = problem.magnetic_curl(xy) -
                    eval_vector_curl(b_mod, t, rule.points[q], g);
        l2 += wq * dot(db, db);
        curl += wq * dc * dc;
        Vec2 du = problem.velocity(xy) - eval_vector(u_proj, t, rule.points[q], g);
        Mat2 dgu =
            problem.velocity_grad(xy) - eval_vector_grad(u_proj, t, rule.points[q], g);
        ul2 += wq * dot(du, du);
        uh1 += wq * frobenius_dot(dgu, dgu);
      }
    }
    entry.hcurl_xib = std::sqrt(l2 + curl);
    entry.stokes_h1_xiu = std::sqrt(uh1);
    entry.stokes_l2_xiu = std::sqrt(ul2);
    entry.hminus1_xib = discrete_hminus1_vector(
        mesh, [&](int t, const CellGeometry& g, const Bary& bary) {
          return problem.magnetic(g.point(bary)) - eval_vector(b_mod, t, bary, g);
        });
    entry.hminus1_curl_xib = discrete_hminus1_scalar(
        mesh, [&](int t, const CellGeometry& g, const Bary& bary) {
          return problem.magnetic_curl(g.point(bary)) -
                 eval_vector_curl(b_mod, t, bary, g);
        });
    double gap = 0.0;
    for (int d = 0; d < multiplier.n_dofs; ++d)
      gap = std::max(gap, std::abs(r_mod.coeffs[d] - r_std.coeffs[d]));
    entry.r_gap = gap;
    report.entries.push_back(entry);
  }
  return report;
}

std::string projection_csv(const ProjectionReport& report) {
  std::ostringstream os;
  os << "M,h,err_curl_xib,rate_curl_xib,err_hm1_xib,rate_hm1_xib,err_hm1_curl_xib,"
        "rate_hm1_curl_xib,err_h1_xiu,rate_h1_xiu,err_l2_xiu,rate_l2_xiu,r_gap\n";
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const ProjectionEntry& e = report.entries[i];
    const ProjectionEntry* prev = i > 0 ? &report.entries[i - 1] : nullptr;
    os << e.resolution << ',' << fmt("%.6e", e.h) << ',' << fmt("%.6e", e.hcurl_xib)
       << ',' << (prev ? rate_cell(rate_between(prev->hcurl_xib, e.hcurl_xib)) : "-")
       << ',' << fmt("%.6e", e.hminus1_xib) << ','
       << (prev ? rate_cell(rate_between(prev->hminus1_xib, e.hminus1_xib)) : "-")
       << ',' << fmt("%.6e", e.hminus1_curl_xib) << ','
       << (prev ? rate_cell(rate_between(prev->hminus1_curl_xib, e.hminus1_curl_xib))
                : "-")
       << ',' << fmt("%.6e", e.stokes_h1_xiu) << ','
       << (prev ? rate_cell(rate_between(prev->stokes_h1_xiu, e.stokes_h1_xiu)) : "-")
       << ',' << fmt("%.6e", e.stokes_l2_xiu) << ','
       << (prev ? rate_cell(rate_between(prev->stokes_l2_xiu, e.stokes_l2_xiu)) : "-")
       << ',' << fmt("%.3e", e.r_gap) << '\n';
  }
  return os.str();
}

std::string projection_markdown(const ProjectionReport& report) {
  std::ostringstream os;
  os << "Projection errors for " << report.problem << " (" << report.element << ")\n\n";
  os << "| M | xi_b Hcurl | rate | xi_b H-1 | rate | curl xi_b H-1 | rate | r gap |\n";
  os << "|---|---|---|---|---|---|---|---|\n";
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const ProjectionEntry& e = report.entries[i];
    const ProjectionEntry* prev = i > 0 ? &report.entries[i - 1] : nullptr;
    os << "| " << e.resolution << " | " << fmt("%.3e", e.hcurl_xib) << " | "
       << (prev ? rate_cell(rate_between(prev->hcurl_xib, e.hcurl_xib)) : "") << " | "
       << fmt("%.3e", e.hminus1_xib) << " | "
       << (prev ? rate_cell(rate_between(prev->hminus1_xib, e.hminus1_xib)) : "")
       << " | " << fmt("%.3e", e.hminus1_curl_xib) << " | "
       << (prev ? rate_cell(rate_between(prev->hminus1_curl_xib, e.hminus1_curl_xib))
                : "")
       << " | " << fmt("%.3e", e.r_gap) << " |\n";
  }
  return os.str();
}

std::string sample_field_grid(const MhdState& state, const MhdSpaces& spaces,
                              int points_per_side) {
  const Mesh& mesh = *spaces.mesh;
  double xmin = mesh.nodes[0].x, xmax = xmin, ymin = mesh.nodes[0].y, ymax = ymin;
  for (const Vec2& p : mesh.nodes) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  // coarse bin index over triangle bounding boxes
  const int nbin = 64;
  std::vector<std::vector<int>> bins(static_cast<size_t>(nbin) * nbin);
  auto bin_of = [&](double x, double y) {
    int i = std::clamp(static_cast<int>((x - xmin) / (xmax - xmin) * nbin), 0, nbin - 1);
    int j = std::clamp(static_cast<int>((y - ymin) / (ymax - ymin) * nbin), 0, nbin - 1);
    return std::make_pair(i, j);
  };
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double txmin = mesh.nodes[tri[0]].x, txmax = txmin;
    double tymin = mesh.nodes[tri[0]].y, tymax = tymin;
    for (int k = 1; k < 3; ++k) {
      txmin = std::min(txmin, mesh.nodes[tri[k]].x);
      txmax = std::max(txmax, mesh.nodes[tri[k]].x);
      tymin = std::min(tymin, mesh.nodes[tri[k]].y);
      tymax = std::max(tymax, mesh.nodes[tri[k]].y);
    }
    auto [i0, j0] = bin_of(txmin, tymin);
    auto [i1, j1] = bin_of(txmax, tymax);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) bins[static_cast<size_t>(j) * nbin + i].push_back(t);
  }
  auto locate = [&](Vec2 p, Bary& bary) -> int {
    auto [i, j] = bin_of(p.x, p.y);
    for (int t : bins[static_cast<size_t>(j) * nbin + i]) {
      CellGeometry g = cell_geometry(mesh, t);
      double l1 = cross(p - g.v0, g.v2 - g.v0) / g.det;
      double l2 = cross(g.v1 - g.v0, p - g.v0) / g.det;
      double l0 = 1.0 - l1 - l2;
      if (l0 >= -1e-10 && l1 >= -1e-10 && l2 >= -1e-10) {
        bary = {l0, l1, l2};
        return t;
      }
    }
    return -1;
  };

  std::ostringstream os;
  char buf[256];
  for (int j = 0; j < points_per_side; ++j) {
    for (int i = 0; i < points_per_side; ++i) {
      Vec2 p{xmin + (xmax - xmin) * i / (points_per_side - 1),
             ymin + (ymax - ymin) * j / (points_per_side - 1)};
      Bary bary;
      int t = locate(p, bary);
      if (t < 0) continue;  // clipped to the domain
      CellGeometry g = cell_geometry(mesh, t);
      Vec2 u = eval_vector(state.u, t, bary, g);
      double pv = eval_scalar(state.p, t, bary);
      Vec2 b = eval_vector(state.b, t, bary, g);
      double r = eval_scalar(state.r, t, bary);
      std::snprintf(buf, sizeof buf,
                    "%.10e %.10e %.10e %.10e %.10e %.10e %.10e %.10e\n", p.x, p.y, u.x,
                    u.y, pv, b.x, b.y, r);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace mhd
