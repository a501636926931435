#include "mhd/fespace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mhd {

namespace {

// local edge k joins vertices (k+1)%3 -> (k+2)%3 in that direction
constexpr int kEdgeStart[3] = {1, 2, 0};
constexpr int kEdgeEnd[3] = {2, 0, 1};

constexpr Vec2 kRefVertex[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
constexpr Vec2 kRefGradLambda[3] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};

// Coefficients of the six reference basis functions of the lowest-order
// second-type edge element (full P1 vector, two tangential moments per edge).
// Column m holds (a,b,c,d,e,f) with phi_m = (a + b x + c y, d + e x + f y).
struct Nedelec2Ref {
  double coeff[6][6];
  Nedelec2Ref() {
    // dof(2k+0): integral of phi . dl along local edge k
    // dof(2k+1): same with weight (s - 1/2), s the edge parameter
    double D[6][6];
    const EdgeRule& gauss = edge_rule(2);
    for (int k = 0; k < 3; ++k) {
      Vec2 a = kRefVertex[kEdgeStart[k]];
      Vec2 dir = kRefVertex[kEdgeEnd[k]] - a;
      for (int n = 0; n < 6; ++n) {
        double m0 = 0.0, m1 = 0.0;
        for (size_t q = 0; q < gauss.points.size(); ++q) {
          double s = gauss.points[q];
          Vec2 p = a + s * dir;
          double mono[3] = {1.0, p.x, p.y};
          Vec2 phi = n < 3 ? Vec2{mono[n], 0.0} : Vec2{0.0, mono[n - 3]};
          double t = dot(phi, dir) * gauss.weights[q];
          m0 += t;
          m1 += t * (s - 0.5);
        }
        D[2 * k][n] = m0;
        D[2 * k + 1][n] = m1;
      }
    }
    // invert D by Gauss-Jordan with partial pivoting
    double inv[6][6] = {};
    for (int i = 0; i < 6; ++i) inv[i][i] = 1.0;
    for (int col = 0; col < 6; ++col) {
      int piv = col;
      for (int r = col + 1; r < 6; ++r)
        if (std::abs(D[r][col]) > std::abs(D[piv][col])) piv = r;
      if (std::abs(D[piv][col]) < 1e-14)
        throw std::logic_error("Nedelec2Ref: singular dof matrix");
      std::swap(D[col], D[piv]);
      std::swap(inv[col], inv[piv]);
      double d = D[col][col];
      for (int j = 0; j < 6; ++j) {
        D[col][j] /= d;
        inv[col][j] /= d;
      }
      for (int r = 0; r < 6; ++r) {
        if (r == col) continue;
        double f = D[r][col];
        for (int j = 0; j < 6; ++j) {
          D[r][j] -= f * D[col][j];
          inv[r][j] -= f * inv[col][j];
        }
      }
    }
    // coeff[n][m] = inv[n][m]: phi_m = sum_n inv[n][m] mono_n
    for (int n = 0; n < 6; ++n)
      for (int m = 0; m < 6; ++m) coeff[n][m] = inv[n][m];
  }
};

const Nedelec2Ref& nedelec2_ref() {
  static const Nedelec2Ref ref;
  return ref;
}

void tabulate_p1(const Bary& b, Tabulation& tab) {
  tab.ndof = 3;
  for (int i = 0; i < 3; ++i) {
    tab.value[i] = b[i];
    tab.ref_grad[i] = kRefGradLambda[i];
  }
}

void tabulate_p2(const Bary& b, Tabulation& tab) {
  tab.ndof = 6;
  for (int i = 0; i < 3; ++i) {
    tab.value[i] = b[i] * (2.0 * b[i] - 1.0);
    tab.ref_grad[i] = (4.0 * b[i] - 1.0) * kRefGradLambda[i];
  }
  for (int k = 0; k < 3; ++k) {
    int i = kEdgeStart[k], j = kEdgeEnd[k];
    tab.value[3 + k] = 4.0 * b[i] * b[j];
    tab.ref_grad[3 + k] = 4.0 * (b[i] * kRefGradLambda[j] + b[j] * kRefGradLambda[i]);
  }
}

}  // namespace

int local_dof_count(ElementKind kind) {
  switch (kind) {
    case ElementKind::LagrangeP1: return 3;
    case ElementKind::LagrangeP2: return 6;
    case ElementKind::VectorP2: return 12;
    case ElementKind::Nedelec1Low: return 3;
    case ElementKind::Nedelec2Low: return 6;
  }
  return 0;
}

bool is_vector_element(ElementKind kind) {
  return kind == ElementKind::VectorP2 || is_edge_element(kind);
}

bool is_edge_element(ElementKind kind) {
  return kind == ElementKind::Nedelec1Low || kind == ElementKind::Nedelec2Low;
}

Tabulation tabulate(ElementKind kind, const Bary& b) {
  Tabulation tab;
  switch (kind) {
    case ElementKind::LagrangeP1:
      tabulate_p1(b, tab);
      break;
    case ElementKind::LagrangeP2:
      tabulate_p2(b, tab);
      break;
    case ElementKind::VectorP2: {
      Tabulation s;
      tabulate_p2(b, s);
      tab.ndof = 12;
      for (int i = 0; i < 6; ++i) {
        for (int c = 0; c < 2; ++c) {
          int m = 2 * i + c;
          tab.vec[m] = c == 0 ? Vec2{s.value[i], 0.0} : Vec2{0.0, s.value[i]};
          tab.vgrad[m].m[c][0] = s.ref_grad[i].x;
          tab.vgrad[m].m[c][1] = s.ref_grad[i].y;
        }
      }
      break;
    }
    case ElementKind::Nedelec1Low: {
      tab.ndof = 3;
      // Whitney function of edge (i,j): lambda_i grad lambda_j - lambda_j grad lambda_i
      for (int k = 0; k < 3; ++k) {
        int i = kEdgeStart[k], j = kEdgeEnd[k];
        tab.vec[k] = b[i] * kRefGradLambda[j] - b[j] * kRefGradLambda[i];
        tab.curl[k] = 2.0 * cross(kRefGradLambda[i], kRefGradLambda[j]);
      }
      break;
    }
    case ElementKind::Nedelec2Low: {
      tab.ndof = 6;
      const auto& ref = nedelec2_ref();
      double mono[3] = {1.0, b[1], b[2]};
      for (int m = 0; m < 6; ++m) {
        Vec2 v{0.0, 0.0};
        for (int n = 0; n < 3; ++n) {
          v.x += ref.coeff[n][m] * mono[n];
          v.y += ref.coeff[n + 3][m] * mono[n];
        }
        tab.vec[m] = v;
        tab.curl[m] = ref.coeff[4][m] - ref.coeff[2][m];  // d(phi_y)/dx - d(phi_x)/dy
      }
      break;
    }
  }
  return tab;
}

CellGeometry cell_geometry(const Mesh& mesh, int t) {
  CellGeometry g;
  const auto& tri = mesh.triangles[t];
  g.v0 = mesh.nodes[tri[0]];
  g.v1 = mesh.nodes[tri[1]];
  g.v2 = mesh.nodes[tri[2]];
  Vec2 e1 = g.v1 - g.v0, e2 = g.v2 - g.v0;
  g.jac.m[0][0] = e1.x;
  g.jac.m[0][1] = e2.x;
  g.jac.m[1][0] = e1.y;
  g.jac.m[1][1] = e2.y;
  g.det = g.jac.det();
  double inv_det = 1.0 / g.det;
  // J^{-1} = [[e2.y, -e2.x], [-e1.y, e1.x]] / det; transpose it
  g.jac_inv_t.m[0][0] = e2.y * inv_det;
  g.jac_inv_t.m[0][1] = -e1.y * inv_det;
  g.jac_inv_t.m[1][0] = -e2.x * inv_det;
  g.jac_inv_t.m[1][1] = e1.x * inv_det;
  for (int i = 0; i < 3; ++i) g.grad_lambda[i] = g.jac_inv_t * kRefGradLambda[i];
  return g;
}

DofMap make_dof_map(const Mesh& mesh, ElementKind kind) {
  DofMap map;
  map.kind = kind;
  map.mesh = &mesh;
  map.n_local = local_dof_count(kind);
  const int nt = mesh.n_triangles();
  map.cell_dofs.resize(static_cast<size_t>(nt) * map.n_local);
  map.cell_signs.assign(map.cell_dofs.size(), 1.0);

  const int nv = mesh.n_nodes(), ne = mesh.n_edges();
  auto set = [&](int t, int l, int g, double s = 1.0) {
    map.cell_dofs[static_cast<size_t>(t) * map.n_local + l] = g;
    map.cell_signs[static_cast<size_t>(t) * map.n_local + l] = s;
  };

  switch (kind) {
    case ElementKind::LagrangeP1:
      map.n_dofs = nv;
      for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 3; ++i) set(t, i, mesh.triangles[t][i]);
      break;
    case ElementKind::LagrangeP2:
      map.n_dofs = nv + ne;
      for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 3; ++i) set(t, i, mesh.triangles[t][i]);
        for (int k = 0; k < 3; ++k) set(t, 3 + k, nv + mesh.tri_edges[t][k].edge);
      }
      break;
    case ElementKind::VectorP2:
      map.n_dofs = 2 * (nv + ne);
      for (int t = 0; t < nt; ++t) {
        for (int i = 0; i < 3; ++i)
          for (int c = 0; c < 2; ++c) set(t, 2 * i + c, 2 * mesh.triangles[t][i] + c);
        for (int k = 0; k < 3; ++k)
          for (int c = 0; c < 2; ++c)
            set(t, 6 + 2 * k + c, 2 * (nv + mesh.tri_edges[t][k].edge) + c);
      }
      break;
    case ElementKind::Nedelec1Low:
      map.n_dofs = ne;
      for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k)
          set(t, k, mesh.tri_edges[t][k].edge, mesh.tri_edges[t][k].sign);
      break;
    case ElementKind::Nedelec2Low:
      map.n_dofs = 2 * ne;
      for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
          // the linear moment is invariant under edge reversal
          set(t, 2 * k, 2 * mesh.tri_edges[t][k].edge, mesh.tri_edges[t][k].sign);
          set(t, 2 * k + 1, 2 * mesh.tri_edges[t][k].edge + 1, 1.0);
        }
      }
      break;
  }

  map.dof_on_boundary.assign(map.n_dofs, 0);
  switch (kind) {
    case ElementKind::LagrangeP1:
      for (int v : mesh.boundary_nodes) map.dof_on_boundary[v] = 1;
      break;
    case ElementKind::LagrangeP2:
      for (int v : mesh.boundary_nodes) map.dof_on_boundary[v] = 1;
      for (int e : mesh.boundary_edges) map.dof_on_boundary[nv + e] = 1;
      break;
    case ElementKind::VectorP2:
      for (int v : mesh.boundary_nodes)
        map.dof_on_boundary[2 * v] = map.dof_on_boundary[2 * v + 1] = 1;
      for (int e : mesh.boundary_edges)
        map.dof_on_boundary[2 * (nv + e)] = map.dof_on_boundary[2 * (nv + e) + 1] = 1;
      break;
    case ElementKind::Nedelec1Low:
      for (int e : mesh.boundary_edges) map.dof_on_boundary[e] = 1;
      break;
    case ElementKind::Nedelec2Low:
      for (int e : mesh.boundary_edges)
        map.dof_on_boundary[2 * e] = map.dof_on_boundary[2 * e + 1] = 1;
      break;
  }
  for (int d = 0; d < map.n_dofs; ++d)
    if (map.dof_on_boundary[d]) map.boundary_dofs.push_back(d);
  return map;
}

FeFunction zero_function(const DofMap& space) {
  return FeFunction{&space, std::vector<double>(space.n_dofs, 0.0)};
}

double eval_scalar(const FeFunction& f, int t, const Bary& b) {
  const DofMap& map = *f.space;
  Tabulation tab = tabulate(map.kind, b);
  double v = 0.0;
  for (int l = 0; l < map.n_local; ++l)
    v += f.coeffs[map.dof(t, l)] * map.sign(t, l) * tab.value[l];
  return v;
}

Vec2 eval_scalar_grad(const FeFunction& f, int t, const Bary& b, const CellGeometry& g) {
  const DofMap& map = *f.space;
  Tabulation tab = tabulate(map.kind, b);
  Vec2 grad{0.0, 0.0};
  for (int l = 0; l < map.n_local; ++l)
    grad += f.coeffs[map.dof(t, l)] * map.sign(t, l) * (g.jac_inv_t * tab.ref_grad[l]);
  return grad;
}

Vec2 eval_vector(const FeFunction& f, int t, const Bary& b, const CellGeometry& g) {
  const DofMap& map = *f.space;
  Tabulation tab = tabulate(map.kind, b);
  Vec2 v{0.0, 0.0};
  if (is_edge_element(map.kind)) {
    for (int l = 0; l < map.n_local; ++l)
      v += f.coeffs[map.dof(t, l)] * map.sign(t, l) * (g.jac_inv_t * tab.vec[l]);
  } else {
    for (int l = 0; l < map.n_local; ++l)
      v += f.coeffs[map.dof(t, l)] * map.sign(t, l) * tab.vec[l];
  }
  return v;
}

Mat2 eval_vector_grad(const FeFunction& f, int t, const Bary& b, const CellGeometry& g) {
  const DofMap& map = *f.space;
  if (map.kind != ElementKind::VectorP2)
    throw std::invalid_argument("eval_vector_grad: VectorP2 only");
  Tabulation tab = tabulate(ElementKind::LagrangeP2, b);
  Mat2 grad;
  for (int i = 0; i < 6; ++i) {
    Vec2 gphi = g.jac_inv_t * tab.ref_grad[i];
    for (int c = 0; c < 2; ++c) {
      double coef = f.coeffs[map.dof(t, 2 * i + c)];
      grad.m[c][0] += coef * gphi.x;
      grad.m[c][1] += coef * gphi.y;
    }
  }
  return grad;
}

double eval_vector_curl(const FeFunction& f, int t, const Bary& b, const CellGeometry& g) {
  const DofMap& map = *f.space;
  if (is_edge_element(map.kind)) {
    Tabulation tab = tabulate(map.kind, b);
    double c = 0.0;
    for (int l = 0; l < map.n_local; ++l)
      c += f.coeffs[map.dof(t, l)] * map.sign(t, l) * tab.curl[l] / g.det;
    return c;
  }
  Mat2 grad = eval_vector_grad(f, t, b, g);
  return grad.m[1][0] - grad.m[0][1];
}

namespace {

// tangential edge moments with respect to the global orientation a -> b, a < b
void edge_moments(const Mesh& mesh, int e, const VectorField& f, int npoints,
                  double& m0, double& m1) {
  const EdgeRule& gauss = edge_rule(npoints);
  Vec2 a = mesh.nodes[mesh.edges[e][0]];
  Vec2 dir = mesh.nodes[mesh.edges[e][1]] - a;
  m0 = m1 = 0.0;
  for (size_t q = 0; q < gauss.points.size(); ++q) {
    double s = gauss.points[q];
    double t = dot(f(a + s * dir), dir) * gauss.weights[q];
    m0 += t;
    m1 += t * (s - 0.5);
  }
}

}  // namespace

FeFunction interpolate(const DofMap& space, const ScalarField& f) {
  if (is_vector_element(space.kind))
    throw std::invalid_argument("interpolate: scalar function on vector space");
  const Mesh& mesh = *space.mesh;
  FeFunction out = zero_function(space);
  for (int v = 0; v < mesh.n_nodes(); ++v) out.coeffs[v] = f(mesh.nodes[v]);
  if (space.kind == ElementKind::LagrangeP2) {
    for (int e = 0; e < mesh.n_edges(); ++e) {
      Vec2 mid = 0.5 * (mesh.nodes[mesh.edges[e][0]] + mesh.nodes[mesh.edges[e][1]]);
      out.coeffs[mesh.n_nodes() + e] = f(mid);
    }
  }
  return out;
}

FeFunction interpolate(const DofMap& space, const VectorField& f) {
  if (!is_vector_element(space.kind))
    throw std::invalid_argument("interpolate: vector function on scalar space");
  const Mesh& mesh = *space.mesh;
  FeFunction out = zero_function(space);
  if (space.kind == ElementKind::VectorP2) {
    for (int v = 0; v < mesh.n_nodes(); ++v) {
      Vec2 val = f(mesh.nodes[v]);
      out.coeffs[2 * v] = val.x;
      out.coeffs[2 * v + 1] = val.y;
    }
    for (int e = 0; e < mesh.n_edges(); ++e) {
      Vec2 mid = 0.5 * (mesh.nodes[mesh.edges[e][0]] + mesh.nodes[mesh.edges[e][1]]);
      Vec2 val = f(mid);
      out.coeffs[2 * (mesh.n_nodes() + e)] = val.x;
      out.coeffs[2 * (mesh.n_nodes() + e) + 1] = val.y;
    }
    return out;
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    double m0, m1;
    edge_moments(mesh, e, f, 3, m0, m1);
    if (space.kind == ElementKind::Nedelec1Low) {
      out.coeffs[e] = m0;
    } else {
      out.coeffs[2 * e] = m0;
      out.coeffs[2 * e + 1] = m1;
    }
  }
  return out;
}

std::vector<std::pair<int, double>> essential_bc(const DofMap& space,
                                                 const ScalarField& g) {
  if (is_vector_element(space.kind))
    throw std::invalid_argument("essential_bc: scalar data on vector space");
  const Mesh& mesh = *space.mesh;
  std::vector<std::pair<int, double>> bc;
  for (int d : space.boundary_dofs) {
    Vec2 p = d < mesh.n_nodes()
                 ? mesh.nodes[d]
                 : 0.5 * (mesh.nodes[mesh.edges[d - mesh.n_nodes()][0]] +
                          mesh.nodes[mesh.edges[d - mesh.n_nodes()][1]]);
    bc.emplace_back(d, g(p));
  }
  return bc;
}

std::vector<std::pair<int, double>> essential_bc(const DofMap& space,
                                                 const VectorField& g) {
  if (!is_vector_element(space.kind))
    throw std::invalid_argument("essential_bc: vector data on scalar space");
  const Mesh& mesh = *space.mesh;
  std::vector<std::pair<int, double>> bc;
  if (space.kind == ElementKind::VectorP2) {
    const int nv = mesh.n_nodes();
    for (int v : mesh.boundary_nodes) {
      Vec2 val = g(mesh.nodes[v]);
      bc.emplace_back(2 * v, val.x);
      bc.emplace_back(2 * v + 1, val.y);
    }
    for (int e : mesh.boundary_edges) {
      Vec2 mid = 0.5 * (mesh.nodes[mesh.edges[e][0]] + mesh.nodes[mesh.edges[e][1]]);
      Vec2 val = g(mid);
      bc.emplace_back(2 * (nv + e), val.x);
      bc.emplace_back(2 * (nv + e) + 1, val.y);
    }
  } else {
    for (int e : mesh.boundary_edges) {
      double m0, m1;
      edge_moments(mesh, e, g, 5, m0, m1);
      if (space.kind == ElementKind::Nedelec1Low) {
        bc.emplace_back(e, m0);
      } else {
        bc.emplace_back(2 * e, m0);
        bc.emplace_back(2 * e + 1, m1);
      }
    }
  }
  std::sort(bc.begin(), bc.end());
  return bc;
}

}  // namespace mhd
