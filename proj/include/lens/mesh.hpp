#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "lens/geometry.hpp"

namespace lens {

// Conforming triangulation of a lens domain or polygon fixture.
// Triangles are positively oriented; boundary edges carry the polyline tags.
struct Mesh {
  struct BEdge {
    int a = 0, b = 0;  // a -> b runs counterclockwise around the domain
    BoundaryTag tag = BoundaryTag::Sigma;
  };

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BEdge> boundary_edges;
  std::vector<int> lambda_vertices;
  std::vector<double> delta;  // per-vertex distance to the meshed boundary
  double h = 0.0;             // max triangle diameter
  double min_angle_deg = 0.0;

  double triangle_area(int t) const;
  Vec2 centroid(int t) const;
  int locate(const Vec2& x) const;  // containing triangle, -1 if outside
};

// Snaps a boundary point onto the true curve for its tag.
using Projector = std::function<Vec2(BoundaryTag, const Vec2&)>;

Projector projector_for(const DomainSpec& spec);

Mesh triangulate(const DomainSpec& spec, double h_target);
Mesh triangulate_polygon(const BoundaryPolyline& poly, double h_target);

Mesh refine(const Mesh& mesh, const DomainSpec& spec);
Mesh refine_with_projector(const Mesh& mesh, const Projector& project);

struct VolumeQuadPoint {
  int tri = 0;
  Vec2 x = Vec2::Zero();
  double w = 0.0;
};

struct EdgeQuadPoint {
  int edge = 0;  // index into mesh.boundary_edges
  Vec2 x = Vec2::Zero();
  double w = 0.0;
  Vec2 normal = Vec2::Zero();
};

// Degree-4 symmetric rule, six points per triangle.
std::vector<VolumeQuadPoint> volume_quadrature(const Mesh& mesh);
// Three-point Gauss-Legendre per tagged edge.
std::vector<EdgeQuadPoint> boundary_quadrature(const Mesh& mesh, BoundaryTag tag);

double volume_integral(const Mesh& mesh, const std::function<double(const Vec2&)>& f);
double boundary_integral(const Mesh& mesh, BoundaryTag tag,
                         const std::function<double(const Vec2&)>& f);

void write_mesh_text(const Mesh& mesh, std::ostream& os);
void write_mesh_csv(const Mesh& mesh, std::ostream& vertices_os, std::ostream& triangles_os);

}  // namespace lens
