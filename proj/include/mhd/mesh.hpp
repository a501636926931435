#pragma once

// Conforming triangulations of the unit square and the L-shape domain,
// with globally oriented edge topology for edge elements.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mhd/core.hpp"

namespace mhd {

// Reference to a global edge from inside a triangle. The sign is +1 iff the
// triangle traverses the edge from its lower to its higher node index.
struct EdgeRef {
  int edge = -1;
  int sign = 0;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<std::array<int, 2>> edges;      // node pairs, first < second
  // Local edge k of triangle (v0,v1,v2) joins v_{k+1} and v_{k+2} (mod 3).
  std::vector<std::array<EdgeRef, 3>> tri_edges;
  std::vector<int> boundary_edges;  // sorted edge ids
  std::vector<int> boundary_nodes;  // sorted node ids
  std::vector<char> node_on_boundary;
  std::vector<char> edge_on_boundary;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  double signed_area(int t) const;
  double area(int t) const { return signed_area(t); }
  double diameter(int t) const;  // longest edge
  double max_diameter() const;
  double total_area() const;
  // inradius / diameter, a shape quality measure in (0, ~0.29]
  double quality(int t) const;
};

enum class MeshFamilyKind { UnitSquareUniform, LShapeUniform, LShapeGraded };

// Builds edges, tri_edges and boundary sets from nodes+triangles and checks
// positive orientation. Throws std::invalid_argument on degenerate input.
void finalize_topology(Mesh& mesh);

Mesh uniform_unit_square(int m);
Mesh uniform_lshape(int m);

// Uniform L-shape refined toward the reentrant corner: sweep s = 1..j
// red-refines every triangle that intersects the disk of radius 2^-s around
// the origin; a red-green closure restores conformity at the end.
Mesh graded_lshape(int j, int m0);

// Regular 4-way refinement of every triangle.
Mesh refine_uniform(const Mesh& mesh);

// Family member for convergence studies. For the graded family the level
// doubles the base resolution and deepens the corner grading at the same time
// so that the bulk mesh size halves between consecutive members.
Mesh family_mesh(MeshFamilyKind kind, int resolution_or_level, int graded_base = 1);
int graded_sweeps_for_base(int m0);

// Plain-text export: header "V E T", one node "x y" per line, one triangle
// "i j k" per line, one boundary edge "i j" per line.
void write_mesh_text(const Mesh& mesh, std::ostream& os);

}  // namespace mhd
