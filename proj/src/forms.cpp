#include "mhd/forms.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mhd {

namespace {

// Reference tabulations at the points of a cached rule.
const std::vector<Tabulation>& rule_tabs(ElementKind kind, int degree) {
  static std::map<std::pair<int, int>, std::vector<Tabulation>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(static_cast<int>(kind), degree);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const QuadratureRule& rule = triangle_rule(degree);
    std::vector<Tabulation> tabs;
    tabs.reserve(rule.points.size());
    for (const Bary& b : rule.points) tabs.push_back(tabulate(kind, b));
    it = cache.emplace(key, std::move(tabs)).first;
  }
  return it->second;
}

// Physical scalar P2 basis at one quadrature point.
struct ScalarP2 {
  double val[6];
  Vec2 grad[6];
};

void physical_p2(const Tabulation& tab, const CellGeometry& g, ScalarP2& out) {
  for (int i = 0; i < 6; ++i) {
    out.val[i] = tab.value[i];
    out.grad[i] = g.jac_inv_t * tab.ref_grad[i];
  }
}

struct ScalarP1 {
  double val[3];
  Vec2 grad[3];
};

void physical_p1(const Tabulation& tab, const CellGeometry& g, ScalarP1& out) {
  for (int i = 0; i < 3; ++i) {
    out.val[i] = tab.value[i];
    out.grad[i] = g.jac_inv_t * tab.ref_grad[i];
  }
}

// Physical edge-element basis with dof signs applied.
struct EdgeBasis {
  Vec2 vec[6];
  double curl[6];
  int n = 0;
};

void physical_edge(const Tabulation& tab, const CellGeometry& g, const DofMap& map,
                   int t, EdgeBasis& out) {
  out.n = map.n_local;
  for (int l = 0; l < map.n_local; ++l) {
    double s = map.sign(t, l);
    out.vec[l] = s * (g.jac_inv_t * tab.vec[l]);
    out.curl[l] = s * tab.curl[l] / g.det;
  }
}

}  // namespace

Vec2 FrozenVectorField::value(int t, const CellGeometry& g, const Bary& b) const {
  if (fe) return eval_vector(*fe, t, b, g);
  return value_fn(g.point(b));
}

double FrozenVectorField::curl(int t, const CellGeometry& g, const Bary& b) const {
  if (fe) return eval_vector_curl(*fe, t, b, g);
  if (!curl_fn) throw std::logic_error("FrozenVectorField: curl not available");
  return curl_fn(g.point(b));
}

Mat2 FrozenVectorField::grad(int t, const CellGeometry& g, const Bary& b) const {
  if (fe) return eval_vector_grad(*fe, t, b, g);
  if (!grad_fn) throw std::logic_error("FrozenVectorField: grad not available");
  return grad_fn(g.point(b));
}

MhdSpaces make_spaces(const Mesh& mesh, ElementKind magnetic_kind) {
  if (!is_edge_element(magnetic_kind))
    throw std::invalid_argument("make_spaces: magnetic space must be an edge element");
  MhdSpaces s;
  s.mesh = &mesh;
  s.velocity = make_dof_map(mesh, ElementKind::VectorP2);
  s.pressure = make_dof_map(mesh, ElementKind::LagrangeP1);
  s.magnetic = make_dof_map(mesh, magnetic_kind);
  // The multiplier space must satisfy grad S_h = ker(curl) in the magnetic
  // space, or the magnetic saddle block is singular: P1 for the first-type
  // element, P2 for the second type (whose curl-free subspace is grad P2).
  s.multiplier = make_dof_map(mesh, magnetic_kind == ElementKind::Nedelec2Low
                                        ? ElementKind::LagrangeP2
                                        : ElementKind::LagrangeP1);
  return s;
}

MhdState zero_state(const MhdSpaces& spaces) {
  return {zero_function(spaces.velocity), zero_function(spaces.pressure),
          zero_function(spaces.magnetic), zero_function(spaces.multiplier), 0.0};
}

std::vector<double> pack_state(const MhdState& state, const BlockLayout& layout) {
  std::vector<double> x(layout.total());
  std::copy(state.u.coeffs.begin(), state.u.coeffs.end(), x.begin() + layout.u0());
  std::copy(state.p.coeffs.begin(), state.p.coeffs.end(), x.begin() + layout.p0());
  std::copy(state.b.coeffs.begin(), state.b.coeffs.end(), x.begin() + layout.b0());
  std::copy(state.r.coeffs.begin(), state.r.coeffs.end(), x.begin() + layout.r0());
  x[layout.mu()] = state.mean_multiplier;
  return x;
}

MhdState unpack_state(std::span<const double> x, const MhdSpaces& spaces) {
  BlockLayout layout = spaces.layout();
  MhdState s = zero_state(spaces);
  std::copy(x.begin() + layout.u0(), x.begin() + layout.u0() + layout.n_u,
            s.u.coeffs.begin());
  std::copy(x.begin() + layout.p0(), x.begin() + layout.p0() + layout.n_p,
            s.p.coeffs.begin());
  std::copy(x.begin() + layout.b0(), x.begin() + layout.b0() + layout.n_b,
            s.b.coeffs.begin());
  std::copy(x.begin() + layout.r0(), x.begin() + layout.r0() + layout.n_r,
            s.r.coeffs.begin());
  s.mean_multiplier = x[layout.mu()];
  return s;
}

SparseMatrix assemble_as(const DofMap& velocity, double Re) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& tabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.n_triangles()) * 78);
  ScalarP2 basis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    double local[6][6] = {};
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(tabs[q], g, basis);
      double w = rule.weights[q] * g.det / Re;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) local[i][j] += w * dot(basis.grad[i], basis.grad[j]);
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int c = 0; c < 2; ++c)
          trips.push_back({velocity.dof(t, 2 * i + c), velocity.dof(t, 2 * j + c),
                           local[i][j]});
  }
  return from_triplets(velocity.n_dofs, velocity.n_dofs, std::move(trips));
}

SparseMatrix assemble_am(const DofMap& magnetic, double Rm, double S) {
  const Mesh& mesh = *magnetic.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& tabs = rule_tabs(magnetic.kind, kVolumeDegree);
  std::vector<Triplet> trips;
  EdgeBasis basis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_edge(tabs[q], g, magnetic, t, basis);
      double w = rule.weights[q] * g.det * S / Rm;
      for (int i = 0; i < basis.n; ++i)
        for (int j = 0; j < basis.n; ++j)
          trips.push_back({magnetic.dof(t, i), magnetic.dof(t, j),
                           w * basis.curl[i] * basis.curl[j]});
    }
  }
  return from_triplets(magnetic.n_dofs, magnetic.n_dofs, std::move(trips));
}

SparseMatrix assemble_c0_conv(const FrozenVectorField& wfield, const DofMap& velocity) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& tabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  std::vector<Triplet> trips;
  ScalarP2 basis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    double local[6][6] = {};
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(tabs[q], g, basis);
      Vec2 w = wfield.value(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      double wgrad[6];
      for (int i = 0; i < 6; ++i) wgrad[i] = dot(w, basis.grad[i]);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          local[i][j] +=
              0.5 * wq * (wgrad[j] * basis.val[i] - wgrad[i] * basis.val[j]);
    }
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int c = 0; c < 2; ++c)
          trips.push_back({velocity.dof(t, 2 * i + c), velocity.dof(t, 2 * j + c),
                           local[i][j]});
  }
  return from_triplets(velocity.n_dofs, velocity.n_dofs, std::move(trips));
}

SparseMatrix assemble_c0_react(const FrozenVectorField& wfield, const DofMap& velocity) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& tabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  std::vector<Triplet> trips;
  ScalarP2 basis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    double local[12][12] = {};
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(tabs[q], g, basis);
      Vec2 w = wfield.value(t, g, rule.points[q]);
      Mat2 gw = wfield.grad(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      double wc[2] = {w.x, w.y};
      for (int i = 0; i < 6; ++i) {
        double gphi_i[2] = {basis.grad[i].x, basis.grad[i].y};
        for (int j = 0; j < 6; ++j) {
          for (int c = 0; c < 2; ++c) {
            for (int d = 0; d < 2; ++d) {
              double v = 0.5 * basis.val[i] * basis.val[j] * gw.m[c][d] -
                         0.5 * basis.val[j] * gphi_i[d] * wc[c];
              local[2 * i + c][2 * j + d] += wq * v;
            }
          }
        }
      }
    }
    for (int a = 0; a < 12; ++a)
      for (int b = 0; b < 12; ++b)
        trips.push_back({velocity.dof(t, a), velocity.dof(t, b), local[a][b]});
  }
  return from_triplets(velocity.n_dofs, velocity.n_dofs, std::move(trips));
}

SparseMatrix assemble_c1_dfrozen(const FrozenVectorField& dfield, const DofMap& velocity,
                                 const DofMap& magnetic, double S) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& vtabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  const auto& ctabs = rule_tabs(magnetic.kind, kVolumeDegree);
  std::vector<Triplet> trips;
  ScalarP2 vbasis;
  EdgeBasis cbasis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(vtabs[q], g, vbasis);
      physical_edge(ctabs[q], g, magnetic, t, cbasis);
      Vec2 d = dfield.value(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < 6; ++i) {
        // (e_c phi_i) x d
        double cross_c[2] = {vbasis.val[i] * d.y, -vbasis.val[i] * d.x};
        for (int c = 0; c < 2; ++c) {
          int row = velocity.dof(t, 2 * i + c);
          for (int j = 0; j < cbasis.n; ++j)
            trips.push_back({row, magnetic.dof(t, j),
                             -S * wq * cross_c[c] * cbasis.curl[j]});
        }
      }
    }
  }
  return from_triplets(velocity.n_dofs, magnetic.n_dofs, std::move(trips));
}

SparseMatrix assemble_c1_dfrozen_adjoint(const FrozenVectorField& dfield,
                                         const DofMap& velocity,
                                         const DofMap& magnetic, double S) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& vtabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  const auto& ctabs = rule_tabs(magnetic.kind, kVolumeDegree);
  std::vector<Triplet> trips;
  ScalarP2 vbasis;
  EdgeBasis cbasis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(vtabs[q], g, vbasis);
      physical_edge(ctabs[q], g, magnetic, t, cbasis);
      Vec2 d = dfield.value(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      for (int j = 0; j < cbasis.n; ++j) {
        Vec2 lorentz = cross(cbasis.curl[j], d);  // (curl c_j) x d
        for (int i = 0; i < 6; ++i) {
          for (int c = 0; c < 2; ++c) {
            double vdot = c == 0 ? lorentz.x * vbasis.val[i] : lorentz.y * vbasis.val[i];
            trips.push_back(
                {velocity.dof(t, 2 * i + c), magnetic.dof(t, j), S * wq * vdot});
          }
        }
      }
    }
  }
  return from_triplets(velocity.n_dofs, magnetic.n_dofs, std::move(trips));
}

SparseMatrix assemble_c1_curlfrozen(const FrozenVectorField& bfield,
                                    const DofMap& velocity, const DofMap& magnetic,
                                    double S) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& vtabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  const auto& ctabs = rule_tabs(magnetic.kind, kVolumeDegree);
  std::vector<Triplet> trips;
  ScalarP2 vbasis;
  EdgeBasis cbasis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(vtabs[q], g, vbasis);
      physical_edge(ctabs[q], g, magnetic, t, cbasis);
      double curl_b = bfield.curl(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      for (int j = 0; j < cbasis.n; ++j) {
        Vec2 lorentz = cross(curl_b, cbasis.vec[j]);  // (curl b) x db_j
        for (int i = 0; i < 6; ++i) {
          trips.push_back({velocity.dof(t, 2 * i), magnetic.dof(t, j),
                           S * wq * lorentz.x * vbasis.val[i]});
          trips.push_back({velocity.dof(t, 2 * i + 1), magnetic.dof(t, j),
                           S * wq * lorentz.y * vbasis.val[i]});
        }
      }
    }
  }
  return from_triplets(velocity.n_dofs, magnetic.n_dofs, std::move(trips));
}

SparseMatrix assemble_c1_ufrozen(const FrozenVectorField& ufield, const DofMap& magnetic,
                                 double S, int quad_degree) {
  const Mesh& mesh = *magnetic.mesh;
  const QuadratureRule& rule = triangle_rule(quad_degree);
  const auto& ctabs = rule_tabs(magnetic.kind, quad_degree);
  std::vector<Triplet> trips;
  EdgeBasis cbasis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_edge(ctabs[q], g, magnetic, t, cbasis);
      Vec2 u = ufield.value(t, g, rule.points[q]);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < cbasis.n; ++i)
        for (int j = 0; j < cbasis.n; ++j)
          trips.push_back({magnetic.dof(t, i), magnetic.dof(t, j),
                           -S * wq * cross(u, cbasis.vec[j]) * cbasis.curl[i]});
    }
  }
  return from_triplets(magnetic.n_dofs, magnetic.n_dofs, std::move(trips));
}

SparseMatrix assemble_divergence(const DofMap& velocity, const DofMap& pressure) {
  const Mesh& mesh = *velocity.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& vtabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  const auto& ptabs = rule_tabs(ElementKind::LagrangeP1, kVolumeDegree);
  std::vector<Triplet> trips;
  ScalarP2 vbasis;
  ScalarP1 pbasis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(vtabs[q], g, vbasis);
      physical_p1(ptabs[q], g, pbasis);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < 6; ++i) {
        double div_c[2] = {vbasis.grad[i].x, vbasis.grad[i].y};
        for (int c = 0; c < 2; ++c)
          for (int j = 0; j < 3; ++j)
            trips.push_back({velocity.dof(t, 2 * i + c), pressure.dof(t, j),
                             wq * pbasis.val[j] * div_c[c]});
      }
    }
  }
  return from_triplets(velocity.n_dofs, pressure.n_dofs, std::move(trips));
}

SparseMatrix assemble_gradient(const DofMap& magnetic, const DofMap& multiplier) {
  const Mesh& mesh = *magnetic.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& ctabs = rule_tabs(magnetic.kind, kVolumeDegree);
  const auto& stabs = rule_tabs(multiplier.kind, kVolumeDegree);
  std::vector<Triplet> trips;
  EdgeBasis cbasis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_edge(ctabs[q], g, magnetic, t, cbasis);
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < cbasis.n; ++i) {
        for (int j = 0; j < multiplier.n_local; ++j) {
          Vec2 sgrad = g.jac_inv_t * stabs[q].ref_grad[j];
          trips.push_back({magnetic.dof(t, i), multiplier.dof(t, j),
                           wq * dot(sgrad, cbasis.vec[i])});
        }
      }
    }
  }
  return from_triplets(magnetic.n_dofs, multiplier.n_dofs, std::move(trips));
}

std::vector<double> assemble_mean_row(const DofMap& pressure) {
  const Mesh& mesh = *pressure.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& ptabs = rule_tabs(ElementKind::LagrangeP1, kVolumeDegree);
  std::vector<double> m(pressure.n_dofs, 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double wq = rule.weights[q] * g.det;
      for (int j = 0; j < 3; ++j)
        m[pressure.dof(t, j)] += wq * ptabs[q].value[j];
    }
  }
  return m;
}

SparseMatrix assemble_h1_product(const DofMap& space) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  std::vector<Triplet> trips;
  if (space.kind == ElementKind::LagrangeP2 || space.kind == ElementKind::LagrangeP1) {
    const auto& tabs = rule_tabs(space.kind, kVolumeDegree);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      CellGeometry g = cell_geometry(mesh, t);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        double wq = rule.weights[q] * g.det;
        double val[6];
        Vec2 grad[6];
        for (int i = 0; i < space.n_local; ++i) {
          val[i] = tabs[q].value[i];
          grad[i] = g.jac_inv_t * tabs[q].ref_grad[i];
        }
        for (int i = 0; i < space.n_local; ++i)
          for (int j = 0; j < space.n_local; ++j)
            trips.push_back({space.dof(t, i), space.dof(t, j),
                             wq * (val[i] * val[j] + dot(grad[i], grad[j]))});
      }
    }
  } else if (space.kind == ElementKind::VectorP2) {
    const auto& tabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
    ScalarP2 basis;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      CellGeometry g = cell_geometry(mesh, t);
      double local[6][6] = {};
      for (size_t q = 0; q < rule.points.size(); ++q) {
        physical_p2(tabs[q], g, basis);
        double wq = rule.weights[q] * g.det;
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j)
            local[i][j] += wq * (basis.val[i] * basis.val[j] +
                                 dot(basis.grad[i], basis.grad[j]));
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          for (int c = 0; c < 2; ++c)
            trips.push_back(
                {space.dof(t, 2 * i + c), space.dof(t, 2 * j + c), local[i][j]});
    }
  } else {
    throw std::invalid_argument("assemble_h1_product: Lagrange spaces only");
  }
  return from_triplets(space.n_dofs, space.n_dofs, std::move(trips));
}

std::vector<double> assemble_load(const DofMap& space, const VectorField& f,
                                  int quad_degree) {
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = triangle_rule(quad_degree);
  std::vector<double> load(space.n_dofs, 0.0);
  if (space.kind == ElementKind::VectorP2) {
    const auto& tabs = rule_tabs(ElementKind::LagrangeP2, quad_degree);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      CellGeometry g = cell_geometry(mesh, t);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        Vec2 fv = f(g.point(rule.points[q]));
        double wq = rule.weights[q] * g.det;
        for (int i = 0; i < 6; ++i) {
          load[space.dof(t, 2 * i)] += wq * fv.x * tabs[q].value[i];
          load[space.dof(t, 2 * i + 1)] += wq * fv.y * tabs[q].value[i];
        }
      }
    }
  } else if (is_edge_element(space.kind)) {
    const auto& tabs = rule_tabs(space.kind, quad_degree);
    EdgeBasis basis;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      CellGeometry g = cell_geometry(mesh, t);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        physical_edge(tabs[q], g, space, t, basis);
        Vec2 fv = f(g.point(rule.points[q]));
        double wq = rule.weights[q] * g.det;
        for (int i = 0; i < basis.n; ++i)
          load[space.dof(t, i)] += wq * dot(fv, basis.vec[i]);
      }
    }
  } else {
    throw std::invalid_argument("assemble_load: vector data on scalar space");
  }
  return load;
}

std::vector<double> assemble_load(const DofMap& space, const ScalarField& f,
                                  int quad_degree) {
  if (is_vector_element(space.kind))
    throw std::invalid_argument("assemble_load: scalar data on vector space");
  const Mesh& mesh = *space.mesh;
  const QuadratureRule& rule = triangle_rule(quad_degree);
  const auto& tabs = rule_tabs(space.kind, quad_degree);
  std::vector<double> load(space.n_dofs, 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      double fv = f(g.point(rule.points[q]));
      double wq = rule.weights[q] * g.det;
      for (int i = 0; i < space.n_local; ++i)
        load[space.dof(t, i)] += wq * fv * tabs[q].value[i];
    }
  }
  return load;
}

void apply_dirichlet(std::vector<Triplet>& triplets, std::vector<double>& rhs,
                     const std::vector<char>& constrained,
                     const std::vector<double>& values) {
  size_t keep = 0;
  for (size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (constrained[t.row]) continue;
    if (constrained[t.col]) {
      rhs[t.row] -= t.value * values[t.col];
      continue;
    }
    triplets[keep++] = t;
  }
  triplets.resize(keep);
  for (size_t d = 0; d < constrained.size(); ++d) {
    if (!constrained[d]) continue;
    triplets.push_back({static_cast<int>(d), static_cast<int>(d), 1.0});
    rhs[d] = values[d];
  }
}

namespace {

// Shared element loop for the residual and the Jacobian. Either output may be
// null. The Jacobian is the Frechet derivative of the residual.
void newton_kernel(const MhdState& state, const BenchmarkProblem& problem,
                   const MhdSpaces& spaces, std::vector<double>* residual,
                   std::vector<Triplet>* jacobian) {
  const Mesh& mesh = *spaces.mesh;
  const BlockLayout layout = spaces.layout();
  if (static_cast<int>(state.u.coeffs.size()) != layout.n_u ||
      static_cast<int>(state.p.coeffs.size()) != layout.n_p ||
      static_cast<int>(state.b.coeffs.size()) != layout.n_b ||
      static_cast<int>(state.r.coeffs.size()) != layout.n_r)
    throw std::invalid_argument("newton assembly: state does not match the spaces");
  const double Re = problem.params.Re, Rm = problem.params.Rm, S = problem.params.S;
  const QuadratureRule& rule = triangle_rule(kVolumeDegree);
  const auto& vtabs = rule_tabs(ElementKind::LagrangeP2, kVolumeDegree);
  const auto& ptabs = rule_tabs(ElementKind::LagrangeP1, kVolumeDegree);
  const auto& ctabs = rule_tabs(spaces.magnetic.kind, kVolumeDegree);
  const auto& stabs = rule_tabs(spaces.multiplier.kind, kVolumeDegree);

  const int nc = spaces.magnetic.n_local;
  const int ns = spaces.multiplier.n_local;
  ScalarP2 vb;
  ScalarP1 pb;
  EdgeBasis cb;
  double sval[6];
  Vec2 sgrad[6];

  if (residual) residual->assign(layout.total(), 0.0);
  if (jacobian) {
    jacobian->clear();
    jacobian->reserve(static_cast<size_t>(mesh.n_triangles()) *
                      (144 + 2 * 36 + 4 * 12 * nc + nc * nc + 6 * nc + 12));
  }

  const double mu = state.mean_multiplier;

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CellGeometry g = cell_geometry(mesh, t);
    // local dense blocks
    double Juu[12][12] = {}, Jup[12][3] = {}, Jub[12][6] = {};
    double Jbu[6][12] = {}, Jbb[6][6] = {}, Jbr[6][6] = {};
    double mean_q[3] = {};
    double Fmu = 0.0;

    for (size_t q = 0; q < rule.points.size(); ++q) {
      physical_p2(vtabs[q], g, vb);
      physical_p1(ptabs[q], g, pb);
      physical_edge(ctabs[q], g, spaces.magnetic, t, cb);
      for (int j = 0; j < ns; ++j) {
        sval[j] = stabs[q].value[j];
        sgrad[j] = g.jac_inv_t * stabs[q].ref_grad[j];
      }
      const double wq = rule.weights[q] * g.det;
      const Vec2 xy = g.point(rule.points[q]);

      // state values at this quadrature point
      Vec2 u_val{0.0, 0.0};
      Mat2 u_grad;
      double p_val = 0.0;
      Vec2 b_val{0.0, 0.0};
      double b_curl = 0.0;
      Vec2 r_grad{0.0, 0.0};
      for (int i = 0; i < 6; ++i) {
        double cx = state.u.coeffs[spaces.velocity.dof(t, 2 * i)];
        double cy = state.u.coeffs[spaces.velocity.dof(t, 2 * i + 1)];
        u_val.x += cx * vb.val[i];
        u_val.y += cy * vb.val[i];
        u_grad.m[0][0] += cx * vb.grad[i].x;
        u_grad.m[0][1] += cx * vb.grad[i].y;
        u_grad.m[1][0] += cy * vb.grad[i].x;
        u_grad.m[1][1] += cy * vb.grad[i].y;
      }
      for (int j = 0; j < 3; ++j)
        p_val += state.p.coeffs[spaces.pressure.dof(t, j)] * pb.val[j];
      for (int j = 0; j < ns; ++j)
        r_grad += state.r.coeffs[spaces.multiplier.dof(t, j)] * sgrad[j];
      for (int j = 0; j < nc; ++j) {
        double cj = state.b.coeffs[spaces.magnetic.dof(t, j)];
        b_val += cj * cb.vec[j];
        b_curl += cj * cb.curl[j];
      }

      if (residual) {
        const Vec2 f = problem.body_force(xy);
        const Vec2 gsrc = problem.magnetic_source(xy);
        const Vec2 conv{u_val.x * u_grad.m[0][0] + u_val.y * u_grad.m[0][1],
                        u_val.x * u_grad.m[1][0] + u_val.y * u_grad.m[1][1]};
        for (int i = 0; i < 6; ++i) {
          for (int c = 0; c < 2; ++c) {
            double v = 0.0;
            // a_s(u, v)
            v += (u_grad.m[c][0] * vb.grad[i].x + u_grad.m[c][1] * vb.grad[i].y) / Re;
            // c0(u; u, v) = 1/2 (u.grad u, v) - 1/2 (u.grad v, u)
            double ugradphi = dot(u_val, vb.grad[i]);
            v += 0.5 * (c == 0 ? conv.x : conv.y) * vb.val[i];
            v -= 0.5 * ugradphi * (c == 0 ? u_val.x : u_val.y);
            // -c1(b; v, b) = +S (v x b, curl b)
            double vcross = c == 0 ? vb.val[i] * b_val.y : -vb.val[i] * b_val.x;
            v += S * vcross * b_curl;
            // -(p, div v) - (f, v)
            v -= p_val * (c == 0 ? vb.grad[i].x : vb.grad[i].y);
            v -= (c == 0 ? f.x : f.y) * vb.val[i];
            (*residual)[layout.u0() + spaces.velocity.dof(t, 2 * i + c)] += wq * v;
          }
        }
        const double div_u = u_grad.m[0][0] + u_grad.m[1][1];
        for (int j = 0; j < 3; ++j)
          (*residual)[layout.p0() + spaces.pressure.dof(t, j)] +=
              wq * (div_u + mu) * pb.val[j];
        for (int j = 0; j < ns; ++j)
          (*residual)[layout.r0() + spaces.multiplier.dof(t, j)] +=
              wq * dot(b_val, sgrad[j]);
        for (int i = 0; i < nc; ++i) {
          double v = S / Rm * b_curl * cb.curl[i];
          v -= S * cross(u_val, b_val) * cb.curl[i];  // c1(b; u, c_i)
          v -= dot(r_grad, cb.vec[i]);
          v -= dot(gsrc, cb.vec[i]);
          (*residual)[layout.b0() + spaces.magnetic.dof(t, i)] += wq * v;
        }
        Fmu += wq * p_val;
      }

      if (jacobian) {
        double wgrad[6];
        for (int i = 0; i < 6; ++i) wgrad[i] = dot(u_val, vb.grad[i]);
        for (int i = 0; i < 6; ++i) {
          for (int j = 0; j < 6; ++j) {
            // a_s + c0(u; du, v): component-diagonal parts
            double diag = dot(vb.grad[i], vb.grad[j]) / Re +
                          0.5 * (wgrad[j] * vb.val[i] - wgrad[i] * vb.val[j]);
            for (int c = 0; c < 2; ++c) Juu[2 * i + c][2 * j + c] += wq * diag;
            // c0(du; u, v): couples components
            for (int c = 0; c < 2; ++c) {
              for (int d = 0; d < 2; ++d) {
                double v = 0.5 * vb.val[i] * vb.val[j] * u_grad.m[c][d] -
                           0.5 * vb.val[j] *
                               (d == 0 ? vb.grad[i].x : vb.grad[i].y) *
                               (c == 0 ? u_val.x : u_val.y);
                Juu[2 * i + c][2 * j + d] += wq * v;
              }
            }
          }
          // -(dp, div v)
          for (int j = 0; j < 3; ++j) {
            Jup[2 * i][j] -= wq * pb.val[j] * vb.grad[i].x;
            Jup[2 * i + 1][j] -= wq * pb.val[j] * vb.grad[i].y;
          }
          // -c1(b; v, db) - c1(db; v, b)
          //   = +S (v x b, curl db) + S (curl b) (v x db)
          double cross_c[2] = {vb.val[i] * b_val.y, -vb.val[i] * b_val.x};
          for (int j = 0; j < nc; ++j) {
            Vec2 lorentz = cross(b_curl, cb.vec[j]);  // (curl b) x db_j
            Jub[2 * i][j] +=
                wq * (S * cross_c[0] * cb.curl[j] - S * lorentz.x * vb.val[i]);
            Jub[2 * i + 1][j] +=
                wq * (S * cross_c[1] * cb.curl[j] - S * lorentz.y * vb.val[i]);
          }
        }
        // p row: (div du, q) and mu column
        for (int j = 0; j < 3; ++j) mean_q[j] += wq * pb.val[j];
        // b rows
        for (int i = 0; i < nc; ++i) {
          for (int j = 0; j < 6; ++j) {
            // c1(b; du, c_i) = -S (du x b, curl c_i)
            Jbu[i][2 * j] += wq * -S * (vb.val[j] * b_val.y) * cb.curl[i];
            Jbu[i][2 * j + 1] += wq * -S * (-vb.val[j] * b_val.x) * cb.curl[i];
          }
          for (int j = 0; j < nc; ++j) {
            double v = S / Rm * cb.curl[i] * cb.curl[j];
            v += -S * cross(u_val, cb.vec[j]) * cb.curl[i];  // c1(db; u, c_i)
            Jbb[i][j] += wq * v;
          }
          for (int j = 0; j < ns; ++j) Jbr[i][j] -= wq * dot(sgrad[j], cb.vec[i]);
        }
      }
    }

    if (residual) (*residual)[layout.mu()] += Fmu;

    if (jacobian) {
      auto udof = [&](int l) { return layout.u0() + spaces.velocity.dof(t, l); };
      auto pdof = [&](int l) { return layout.p0() + spaces.pressure.dof(t, l); };
      auto bdof = [&](int l) { return layout.b0() + spaces.magnetic.dof(t, l); };
      auto rdof = [&](int l) { return layout.r0() + spaces.multiplier.dof(t, l); };
      for (int a = 0; a < 12; ++a) {
        for (int b = 0; b < 12; ++b)
          jacobian->push_back({udof(a), udof(b), Juu[a][b]});
        for (int b = 0; b < 3; ++b) {
          jacobian->push_back({udof(a), pdof(b), Jup[a][b]});
          jacobian->push_back({pdof(b), udof(a), -Jup[a][b]});  // (div du, q)
        }
        for (int b = 0; b < nc; ++b) {
          jacobian->push_back({udof(a), bdof(b), Jub[a][b]});
        }
      }
      for (int i = 0; i < nc; ++i) {
        for (int b = 0; b < 12; ++b) jacobian->push_back({bdof(i), udof(b), Jbu[i][b]});
        for (int b = 0; b < nc; ++b) jacobian->push_back({bdof(i), bdof(b), Jbb[i][b]});
        for (int b = 0; b < ns; ++b) {
          jacobian->push_back({bdof(i), rdof(b), Jbr[i][b]});
          jacobian->push_back({rdof(b), bdof(i), -Jbr[i][b]});  // (db, grad s)
        }
      }
      for (int j = 0; j < 3; ++j) {
        jacobian->push_back({pdof(j), layout.mu(), mean_q[j]});
        jacobian->push_back({layout.mu(), pdof(j), mean_q[j]});
      }
    }
  }
}

}  // namespace

std::vector<double> assemble_residual(const MhdState& state,
                                      const BenchmarkProblem& problem,
                                      const MhdSpaces& spaces) {
  std::vector<double> residual;
  newton_kernel(state, problem, spaces, &residual, nullptr);
  return residual;
}

BlockSystem assemble_newton_system(const MhdState& state,
                                   const BenchmarkProblem& problem,
                                   const MhdSpaces& spaces, bool eliminate_bcs) {
  BlockSystem sys;
  sys.layout = spaces.layout();
  std::vector<double> residual;
  std::vector<Triplet> trips;
  newton_kernel(state, problem, spaces, &residual, &trips);
  sys.rhs.resize(sys.layout.total());
  for (int i = 0; i < sys.layout.total(); ++i) sys.rhs[i] = -residual[i];

  if (eliminate_bcs) {
    std::vector<char> constrained(sys.layout.total(), 0);
    for (int d : spaces.velocity.boundary_dofs) constrained[sys.layout.u0() + d] = 1;
    for (int d : spaces.magnetic.boundary_dofs) constrained[sys.layout.b0() + d] = 1;
    for (int d : spaces.multiplier.boundary_dofs) constrained[sys.layout.r0() + d] = 1;
    std::vector<double> values(sys.layout.total(), 0.0);
    apply_dirichlet(trips, sys.rhs, constrained, values);
  }
  sys.matrix = from_triplets(sys.layout.total(), sys.layout.total(), std::move(trips));
  return sys;
}

double data_norm(const BenchmarkProblem& problem, const MhdSpaces& spaces) {
  std::vector<double> fu =
      assemble_load(spaces.velocity, problem.body_force, kVolumeDegree);
  std::vector<double> gb =
      assemble_load(spaces.magnetic, problem.magnetic_source, kVolumeDegree);
  double s = 0.0;
  for (int d = 0; d < spaces.velocity.n_dofs; ++d)
    if (!spaces.velocity.dof_on_boundary[d]) s += fu[d] * fu[d];
  for (int d = 0; d < spaces.magnetic.n_dofs; ++d)
    if (!spaces.magnetic.dof_on_boundary[d]) s += gb[d] * gb[d];
  return std::sqrt(s);
}

}  // namespace mhd
