#include "mhd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace mhd {

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
  return 0.5 * cross(b - a, c - a);
}

double Mesh::diameter(int t) const {
  const auto& tri = triangles[t];
  double d = 0.0;
  for (int k = 0; k < 3; ++k)
    d = std::max(d, norm(nodes[tri[(k + 1) % 3]] - nodes[tri[(k + 2) % 3]]));
  return d;
}

double Mesh::max_diameter() const {
  double d = 0.0;
  for (int t = 0; t < n_triangles(); ++t) d = std::max(d, diameter(t));
  return d;
}

double Mesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < n_triangles(); ++t) s += signed_area(t);
  return s;
}

double Mesh::quality(int t) const {
  const auto& tri = triangles[t];
  double l[3];
  for (int k = 0; k < 3; ++k)
    l[k] = norm(nodes[tri[(k + 1) % 3]] - nodes[tri[(k + 2) % 3]]);
  double s = 0.5 * (l[0] + l[1] + l[2]);
  double inradius = signed_area(t) / s;
  return inradius / std::max({l[0], l[1], l[2]});
}

void finalize_topology(Mesh& mesh) {
  const int nt = mesh.n_triangles();
  for (int t = 0; t < nt; ++t) {
    if (mesh.signed_area(t) <= 0.0)
      throw std::invalid_argument("mesh: triangle " + std::to_string(t) +
                                  " has non-positive area");
  }

  std::map<std::array<int, 2>, int> edge_ids;
  mesh.edges.clear();
  mesh.tri_edges.assign(nt, {});
  std::vector<int> edge_use;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      std::array<int, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edge_ids.try_emplace(
          key, static_cast<int>(mesh.edges.size()));
      if (inserted) {
        mesh.edges.push_back(key);
        edge_use.push_back(0);
      }
      mesh.tri_edges[t][k] = EdgeRef{it->second, a < b ? 1 : -1};
      edge_use[it->second] += 1;
    }
  }

  mesh.boundary_edges.clear();
  mesh.edge_on_boundary.assign(mesh.n_edges(), 0);
  mesh.node_on_boundary.assign(mesh.n_nodes(), 0);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    if (edge_use[e] == 1) {
      mesh.boundary_edges.push_back(e);
      mesh.edge_on_boundary[e] = 1;
      mesh.node_on_boundary[mesh.edges[e][0]] = 1;
      mesh.node_on_boundary[mesh.edges[e][1]] = 1;
    } else if (edge_use[e] != 2) {
      throw std::invalid_argument("mesh: edge shared by " +
                                  std::to_string(edge_use[e]) + " triangles");
    }
  }
  mesh.boundary_nodes.clear();
  for (int v = 0; v < mesh.n_nodes(); ++v)
    if (mesh.node_on_boundary[v]) mesh.boundary_nodes.push_back(v);
}

Mesh uniform_unit_square(int m) {
  if (m < 1) throw std::invalid_argument("uniform_unit_square: resolution must be >= 1");
  Mesh mesh;
  const int n = m + 1;
  mesh.nodes.reserve(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mesh.nodes.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m});
  mesh.triangles.reserve(2 * static_cast<size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      int a = j * n + i, b = j * n + i + 1, c = (j + 1) * n + i + 1, d = (j + 1) * n + i;
      // every cell split along the bottom-left to top-right diagonal
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  finalize_topology(mesh);
  return mesh;
}

Mesh uniform_lshape(int m) {
  if (m < 1) throw std::invalid_argument("uniform_lshape: resolution must be >= 1");
  Mesh mesh;
  const int n = 2 * m + 1;
  // lattice over [-1,1]^2 minus nodes strictly inside the removed quadrant
  std::vector<int> id(static_cast<size_t>(n) * n, -1);
  auto keep = [&](int i, int j) { return !(i > m && j < m); };  // x>0 && y<0
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (!keep(i, j)) continue;
      id[static_cast<size_t>(j) * n + i] = mesh.n_nodes();
      mesh.nodes.push_back({-1.0 + static_cast<double>(i) / m,
                            -1.0 + static_cast<double>(j) / m});
    }
  }
  for (int j = 0; j < 2 * m; ++j) {
    for (int i = 0; i < 2 * m; ++i) {
      if (i >= m && j < m) continue;  // cell in the removed quadrant
      int a = id[static_cast<size_t>(j) * n + i];
      int b = id[static_cast<size_t>(j) * n + i + 1];
      int c = id[static_cast<size_t>(j + 1) * n + i + 1];
      int d = id[static_cast<size_t>(j + 1) * n + i];
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  finalize_topology(mesh);
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh fine;
  fine.nodes = mesh.nodes;
  fine.nodes.resize(mesh.n_nodes() + mesh.n_edges());
  for (int e = 0; e < mesh.n_edges(); ++e) {
    Vec2 a = mesh.nodes[mesh.edges[e][0]], b = mesh.nodes[mesh.edges[e][1]];
    fine.nodes[mesh.n_nodes() + e] = 0.5 * (a + b);
  }
  fine.triangles.reserve(4 * static_cast<size_t>(mesh.n_triangles()));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    int mid[3];  // mid[k] on local edge k, opposite vertex k
    for (int k = 0; k < 3; ++k) mid[k] = mesh.n_nodes() + mesh.tri_edges[t][k].edge;
    fine.triangles.push_back({tri[0], mid[2], mid[1]});
    fine.triangles.push_back({tri[1], mid[0], mid[2]});
    fine.triangles.push_back({tri[2], mid[1], mid[0]});
    fine.triangles.push_back({mid[0], mid[1], mid[2]});
  }
  finalize_topology(fine);
  return fine;
}

namespace {

// Graded refinement works on an integer lattice so that shared midpoints are
// found exactly. Coordinates are in units of 1/scale over [-1,1]^2.
struct IPoint {
  std::int64_t x, y;
  bool operator==(const IPoint& o) const { return x == o.x && y == o.y; }
};
struct IPointHash {
  size_t operator()(const IPoint& p) const {
    std::uint64_t a = static_cast<std::uint64_t>(p.x) * 0x9e3779b97f4a7c15ull;
    std::uint64_t b = static_cast<std::uint64_t>(p.y) * 0xc2b2ae3d27d4eb4full;
    return static_cast<size_t>(a ^ (b + (a << 6) + (a >> 2)));
  }
};
struct ITri {
  std::array<IPoint, 3> v;
};

double point_segment_dist2(double px, double py, double ax, double ay, double bx,
                           double by) {
  double abx = bx - ax, aby = by - ay;
  double t = ((px - ax) * abx + (py - ay) * aby) / (abx * abx + aby * aby);
  t = std::clamp(t, 0.0, 1.0);
  double dx = px - (ax + t * abx), dy = py - (ay + t * aby);
  return dx * dx + dy * dy;
}

// squared distance from the origin to a triangle (0 if the origin is inside)
double origin_tri_dist2(const ITri& t, double scale) {
  double x[3], y[3];
  for (int k = 0; k < 3; ++k) {
    x[k] = static_cast<double>(t.v[k].x) / scale;
    y[k] = static_cast<double>(t.v[k].y) / scale;
  }
  bool inside = true;
  for (int k = 0; k < 3; ++k) {
    int a = k, b = (k + 1) % 3;
    double c = (x[b] - x[a]) * (0.0 - y[a]) - (y[b] - y[a]) * (0.0 - x[a]);
    if (c < 0.0) inside = false;
  }
  if (inside) return 0.0;
  double d2 = std::numeric_limits<double>::max();
  for (int k = 0; k < 3; ++k)
    d2 = std::min(d2, point_segment_dist2(0.0, 0.0, x[k], y[k], x[(k + 1) % 3],
                                          y[(k + 1) % 3]));
  return d2;
}

IPoint midpoint(IPoint a, IPoint b) {
  if (((a.x + b.x) | (a.y + b.y)) & 1)
    throw std::runtime_error("graded_lshape: lattice too coarse for refinement depth");
  return {(a.x + b.x) / 2, (a.y + b.y) / 2};
}

void red_split(const ITri& t, std::vector<ITri>& out) {
  IPoint m01 = midpoint(t.v[0], t.v[1]);
  IPoint m12 = midpoint(t.v[1], t.v[2]);
  IPoint m20 = midpoint(t.v[2], t.v[0]);
  out.push_back({{t.v[0], m01, m20}});
  out.push_back({{t.v[1], m12, m01}});
  out.push_back({{t.v[2], m20, m12}});
  out.push_back({{m01, m12, m20}});
}

using VertexSet = std::unordered_map<IPoint, int, IPointHash>;

VertexSet collect_vertices(const std::vector<ITri>& tris) {
  VertexSet vs;
  for (const auto& t : tris)
    for (const auto& p : t.v) vs.try_emplace(p, static_cast<int>(vs.size()));
  return vs;
}

}  // namespace

int graded_sweeps_for_base(int m0) {
  // Deep enough that the corner cap of a rho^lambda field (lambda ~ 0.544)
  // stays below the bulk O(h^2) error: 2^(-j*lambda) <= (1/m0)^2. The family
  // base is kept small because the smallest cells shrink like h0 * 2^-j and
  // past ~1e-5 the assembled systems exceed what a double-precision direct
  // solve can resolve within the residual contracts.
  const double lambda = 0.54448;
  return static_cast<int>(
      std::ceil(2.0 * std::log2(static_cast<double>(m0)) / lambda));
}

Mesh graded_lshape(int j, int m0) {
  if (m0 < 1) throw std::invalid_argument("graded_lshape: base resolution must be >= 1");
  if (j < 0) throw std::invalid_argument("graded_lshape: grading level must be >= 0");
  if (j == 0) return uniform_lshape(m0);

  const double scale = static_cast<double>(m0) * std::ldexp(1.0, j + 8);
  const std::int64_t cell = std::int64_t{1} << (j + 8);

  std::vector<ITri> tris;
  {
    Mesh base = uniform_lshape(m0);
    auto to_int = [&](Vec2 p) {
      return IPoint{static_cast<std::int64_t>(std::llround(p.x * m0)) * cell,
                    static_cast<std::int64_t>(std::llround(p.y * m0)) * cell};
    };
    for (const auto& tri : base.triangles)
      tris.push_back({{to_int(base.nodes[tri[0]]), to_int(base.nodes[tri[1]]),
                       to_int(base.nodes[tri[2]])}});
  }

  // refinement sweeps toward the corner
  for (int s = 1; s <= j; ++s) {
    double r2 = std::ldexp(1.0, -s);
    r2 *= r2;
    std::vector<ITri> next;
    next.reserve(tris.size());
    for (const auto& t : tris) {
      if (origin_tri_dist2(t, scale) <= r2)
        red_split(t, next);
      else
        next.push_back(t);
    }
    tris.swap(next);
  }

  // 2:1 balance and red closure; both can re-trigger the other
  for (;;) {
    VertexSet vs = collect_vertices(tris);
    auto split_edge = [&](IPoint a, IPoint b) {
      if (((a.x + b.x) | (a.y + b.y)) & 1) return false;
      return vs.find(midpoint(a, b)) != vs.end();
    };
    std::vector<ITri> next;
    bool changed = false;
    for (const auto& t : tris) {
      int nsplit = 0;
      bool unbalanced = false;
      for (int k = 0; k < 3; ++k) {
        IPoint a = t.v[k], b = t.v[(k + 1) % 3];
        if (!split_edge(a, b)) continue;
        ++nsplit;
        IPoint m = midpoint(a, b);
        if (split_edge(a, m) || split_edge(m, b)) unbalanced = true;
      }
      if (unbalanced || nsplit >= 2) {
        red_split(t, next);
        changed = true;
      } else {
        next.push_back(t);
      }
    }
    tris.swap(next);
    if (!changed) break;
  }

  // green closure: bisect the remaining single hanging edges
  {
    VertexSet vs = collect_vertices(tris);
    std::vector<ITri> next;
    for (const auto& t : tris) {
      int split_k = -1;
      for (int k = 0; k < 3; ++k) {
        IPoint a = t.v[k], b = t.v[(k + 1) % 3];
        if ((((a.x + b.x) | (a.y + b.y)) & 1) == 0 &&
            vs.find(midpoint(a, b)) != vs.end()) {
          split_k = k;
          break;
        }
      }
      if (split_k < 0) {
        next.push_back(t);
      } else {
        IPoint a = t.v[split_k], b = t.v[(split_k + 1) % 3], c = t.v[(split_k + 2) % 3];
        IPoint m = midpoint(a, b);
        next.push_back({{a, m, c}});
        next.push_back({{m, b, c}});
      }
    }
    tris.swap(next);
  }

  Mesh mesh;
  VertexSet vs = collect_vertices(tris);
  mesh.nodes.resize(vs.size());
  for (const auto& [p, idx] : vs)
    mesh.nodes[idx] = {static_cast<double>(p.x) / scale,
                       static_cast<double>(p.y) / scale};
  mesh.triangles.reserve(tris.size());
  for (const auto& t : tris)
    mesh.triangles.push_back(
        {vs.at(t.v[0]), vs.at(t.v[1]), vs.at(t.v[2])});
  finalize_topology(mesh);
  return mesh;
}

Mesh family_mesh(MeshFamilyKind kind, int resolution_or_level, int graded_base) {
  switch (kind) {
    case MeshFamilyKind::UnitSquareUniform:
      return uniform_unit_square(resolution_or_level);
    case MeshFamilyKind::LShapeUniform:
      return uniform_lshape(resolution_or_level);
    case MeshFamilyKind::LShapeGraded: {
      int m0 = graded_base << resolution_or_level;
      return graded_lshape(graded_sweeps_for_base(m0), m0);
    }
  }
  throw std::invalid_argument("family_mesh: unknown family");
}

void write_mesh_text(const Mesh& mesh, std::ostream& os) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d %d %d\n", mesh.n_nodes(), mesh.n_edges(),
                mesh.n_triangles());
  os << buf;
  for (const auto& p : mesh.nodes) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
    os << buf;
  }
  for (int e : mesh.boundary_edges) {
    std::snprintf(buf, sizeof buf, "%d %d\n", mesh.edges[e][0], mesh.edges[e][1]);
    os << buf;
  }
}

}  // namespace mhd
