#include "lens/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

namespace lens {

namespace {

constexpr double kPi = std::numbers::pi;

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// p strictly inside the circumcircle of ccw triangle (a, b, c)
bool in_circumcircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const double ax = a.x() - p.x(), ay = a.y() - p.y();
  const double bx = b.x() - p.x(), by = b.y() - p.y();
  const double cx = c.x() - p.x(), cy = c.y() - p.y();
  const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                     (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 1e-14;
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = orient2d(a, b, c);
  const double d2 = orient2d(a, b, d);
  const double d3 = orient2d(c, d, a);
  const double d4 = orient2d(c, d, b);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) &&
         std::abs(d1) > 1e-15 && std::abs(d2) > 1e-15 && std::abs(d3) > 1e-15 &&
         std::abs(d4) > 1e-15;
}

using Triangle = std::array<int, 3>;

std::vector<Triangle> bowyer_watson(std::vector<Vec2> pts) {
  const int n = static_cast<int>(pts.size());
  Vec2 lo(1e30, 1e30), hi(-1e30, -1e30);
  for (const Vec2& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 mid = 0.5 * (lo + hi);
  const double span = std::max((hi - lo).maxCoeff(), 1.0) * 64.0;
  pts.push_back(mid + Vec2(-span, -span / 2));
  pts.push_back(mid + Vec2(span, -span / 2));
  pts.push_back(mid + Vec2(0, span));

  std::vector<Triangle> tris = {{n, n + 1, n + 2}};
  std::vector<Triangle> cavity;
  for (int ip = 0; ip < n; ++ip) {
    const Vec2& p = pts[ip];
    cavity.clear();
    std::vector<Triangle> keep;
    keep.reserve(tris.size());
    for (const Triangle& t : tris) {
      if (in_circumcircle(pts[t[0]], pts[t[1]], pts[t[2]], p))
        cavity.push_back(t);
      else
        keep.push_back(t);
    }
    // cavity boundary: directed edges appearing once
    std::map<std::pair<int, int>, int> edge_count;
    for (const Triangle& t : cavity)
      for (int e = 0; e < 3; ++e) {
        int u = t[e], v = t[(e + 1) % 3];
        if (u > v) std::swap(u, v);
        ++edge_count[{u, v}];
      }
    for (const Triangle& t : cavity)
      for (int e = 0; e < 3; ++e) {
        const int u = t[e], v = t[(e + 1) % 3];
        if (edge_count[{std::min(u, v), std::max(u, v)}] == 1)
          keep.push_back({u, v, ip});
      }
    tris.swap(keep);
  }

  std::vector<Triangle> out;
  out.reserve(tris.size());
  for (const Triangle& t : tris)
    if (t[0] < n && t[1] < n && t[2] < n) out.push_back(t);
  return out;
}

using EdgeKey = std::pair<int, int>;
EdgeKey key(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

struct EdgeUse {
  int tri[2] = {-1, -1};
  void add(int t) { tri[tri[0] < 0 ? 0 : 1] = t; }
};

std::map<EdgeKey, EdgeUse> edge_table(const std::vector<Triangle>& tris) {
  std::map<EdgeKey, EdgeUse> table;
  for (size_t i = 0; i < tris.size(); ++i)
    for (int e = 0; e < 3; ++e)
      table[key(tris[i][e], tris[i][(e + 1) % 3])].add(static_cast<int>(i));
  return table;
}

// flip the shared edge of triangles i and j; returns false if the quad is not convex
bool flip_edge(std::vector<Triangle>& tris, int i, int j, const std::vector<Vec2>& pts) {
  int shared[2], si = 0;
  for (int u : tris[i])
    for (int v : tris[j])
      if (u == v && si < 2) shared[si++] = u;
  if (si != 2) return false;
  int u = -1, v = -1;
  for (int x : tris[i])
    if (x != shared[0] && x != shared[1]) u = x;
  for (int x : tris[j])
    if (x != shared[0] && x != shared[1]) v = x;
  // convexity: shared endpoints on opposite sides of the new diagonal
  const double s0 = orient2d(pts[u], pts[v], pts[shared[0]]);
  const double s1 = orient2d(pts[u], pts[v], pts[shared[1]]);
  if (!(s0 > 1e-15 && s1 < -1e-15) && !(s0 < -1e-15 && s1 > 1e-15)) return false;
  int c = shared[0], d = shared[1];
  if (orient2d(pts[u], pts[c], pts[v]) < 0) std::swap(c, d);
  tris[i] = {u, c, v};
  tris[j] = {v, d, u};
  return true;
}

void recover_constraints(std::vector<Triangle>& tris, const std::vector<Vec2>& pts,
                         const std::set<EdgeKey>& constraints) {
  for (int pass = 0; pass < 64; ++pass) {
    auto table = edge_table(tris);
    std::vector<EdgeKey> missing;
    for (const EdgeKey& c : constraints)
      if (!table.count(c)) missing.push_back(c);
    if (missing.empty()) return;

    bool progressed = false;
    for (const EdgeKey& c : missing) {
      const Vec2& a = pts[c.first];
      const Vec2& b = pts[c.second];
      table = edge_table(tris);
      for (const auto& [ek, use] : table) {
        if (use.tri[1] < 0) continue;
        if (constraints.count(ek)) continue;
        if (!segments_cross(a, b, pts[ek.first], pts[ek.second])) continue;
        if (flip_edge(tris, use.tri[0], use.tri[1], pts)) {
          progressed = true;
          break;
        }
      }
    }
    if (!progressed)
      throw std::runtime_error("mesher could not recover a boundary edge");
  }
  throw std::runtime_error("mesher failed to recover boundary edges");
}

std::vector<Triangle> extract_interior(const std::vector<Triangle>& tris,
                                       const std::vector<std::pair<int, int>>& boundary,
                                       const std::set<EdgeKey>& constraints) {
  std::map<std::pair<int, int>, int> directed;  // directed edge -> triangle
  for (size_t i = 0; i < tris.size(); ++i)
    for (int e = 0; e < 3; ++e)
      directed[{tris[i][e], tris[i][(e + 1) % 3]}] = static_cast<int>(i);

  std::vector<char> inside(tris.size(), 0);
  std::vector<int> stack;
  for (const auto& [a, b] : boundary) {
    auto it = directed.find({a, b});
    if (it == directed.end())
      throw std::runtime_error("boundary edge lost during triangulation");
    if (!inside[it->second]) {
      inside[it->second] = 1;
      stack.push_back(it->second);
    }
  }
  const auto table = edge_table(tris);
  std::vector<std::vector<int>> nbrs(tris.size());
  for (const auto& [ek, use] : table) {
    if (use.tri[1] < 0 || constraints.count(ek)) continue;
    nbrs[use.tri[0]].push_back(use.tri[1]);
    nbrs[use.tri[1]].push_back(use.tri[0]);
  }
  while (!stack.empty()) {
    const int t = stack.back();
    stack.pop_back();
    for (int s : nbrs[t])
      if (!inside[s]) {
        inside[s] = 1;
        stack.push_back(s);
      }
  }
  std::vector<Triangle> out;
  for (size_t i = 0; i < tris.size(); ++i)
    if (inside[i]) out.push_back(tris[i]);
  return out;
}

void delaunay_flip_pass(std::vector<Triangle>& tris, const std::vector<Vec2>& pts,
                        const std::set<EdgeKey>& constraints) {
  for (int pass = 0; pass < 50; ++pass) {
    bool flipped = false;
    auto table = edge_table(tris);
    for (const auto& [ek, use] : table) {
      if (use.tri[1] < 0 || constraints.count(ek)) continue;
      const Triangle& t1 = tris[use.tri[0]];
      const Triangle& t2 = tris[use.tri[1]];
      int v = -1;
      for (int x : t2)
        if (x != ek.first && x != ek.second) v = x;
      if (v < 0) continue;
      if (in_circumcircle(pts[t1[0]], pts[t1[1]], pts[t1[2]], pts[v])) {
        if (flip_edge(tris, use.tri[0], use.tri[1], pts)) flipped = true;
      }
    }
    if (!flipped) return;
  }
}

void smooth_interior(std::vector<Triangle>& tris, std::vector<Vec2>& pts,
                     int n_fixed, const std::set<EdgeKey>& constraints) {
  for (int iter = 0; iter < 10; ++iter) {
    std::vector<Vec2> accum(pts.size(), Vec2::Zero());
    std::vector<int> count(pts.size(), 0);
    for (const Triangle& t : tris)
      for (int e = 0; e < 3; ++e) {
        accum[t[e]] += pts[t[(e + 1) % 3]] + pts[t[(e + 2) % 3]];
        count[t[e]] += 2;
      }
    std::vector<std::vector<int>> incident(pts.size());
    for (size_t i = 0; i < tris.size(); ++i)
      for (int x : tris[i]) incident[x].push_back(static_cast<int>(i));

    for (size_t v = n_fixed; v < pts.size(); ++v) {
      if (count[v] == 0) continue;
      const Vec2 old = pts[v];
      pts[v] = accum[v] / count[v];
      for (int t : incident[v])
        if (orient2d(pts[tris[t][0]], pts[tris[t][1]], pts[tris[t][2]]) < 1e-14) {
          pts[v] = old;  // reject moves that fold a triangle
          break;
        }
    }
    delaunay_flip_pass(tris, pts, constraints);
  }
}

double triangle_min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = (b - c).norm(), lb = (a - c).norm(), lc = (a - b).norm();
  auto ang = [](double opp, double s1, double s2) {
    return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0));
  };
  return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)}) * 180.0 / kPi;
}

BoundaryPolyline subdivide(const BoundaryPolyline& poly, double max_len,
                           std::vector<int>* lambda_map) {
  BoundaryPolyline out;
  std::vector<int> orig_pos(poly.vertices.size());
  for (size_t s = 0; s < poly.segments.size(); ++s) {
    const auto& seg = poly.segments[s];
    orig_pos[seg.a] = static_cast<int>(out.vertices.size());
    const Vec2 a = poly.vertices[seg.a], b = poly.vertices[seg.b];
    const int pieces = std::max(1, static_cast<int>(std::ceil(seg.length / max_len)));
    for (int k = 0; k < pieces; ++k) {
      out.vertices.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
      BoundaryPolyline::Segment ns;
      ns.a = static_cast<int>(out.vertices.size()) - 1;
      ns.b = ns.a + 1;
      ns.tag = seg.tag;
      out.segments.push_back(ns);
    }
  }
  out.segments.back().b = 0;
  for (auto& seg : out.segments) {
    const Vec2 d = out.vertices[seg.b % out.vertices.size()] - out.vertices[seg.a];
    seg.b %= static_cast<int>(out.vertices.size());
    seg.length = d.norm();
    seg.normal = Vec2(d.y(), -d.x()) / seg.length;
  }
  for (int l : poly.lambda) out.lambda.push_back(orig_pos[l]);
  if (lambda_map) *lambda_map = orig_pos;
  return out;
}

Mesh build_mesh(const BoundaryPolyline& fine, double h_target) {
  const int nb = static_cast<int>(fine.vertices.size());
  std::vector<Vec2> pts = fine.vertices;

  // hexagonal interior lattice, kept away from the boundary
  Vec2 lo(1e30, 1e30), hi(-1e30, -1e30);
  for (const Vec2& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double dx = h_target;
  const double dy = h_target * std::sqrt(3.0) / 2.0;
  const double margin = 0.55 * h_target;
  int row = 0;
  for (double y = lo.y() + dy / 2; y < hi.y(); y += dy, ++row) {
    const double off = (row % 2) ? dx / 2 : 0.0;
    for (double x = lo.x() + off; x < hi.x(); x += dx) {
      const Vec2 p(x, y);
      const auto d = distance_to_boundary(fine, p);
      if (d.inside && d.distance > margin) pts.push_back(p);
    }
  }

  auto tris = bowyer_watson(pts);

  std::set<EdgeKey> constraints;
  std::vector<std::pair<int, int>> directed_boundary;
  for (const auto& seg : fine.segments) {
    constraints.insert(key(seg.a, seg.b));
    directed_boundary.push_back({seg.a, seg.b});
  }
  recover_constraints(tris, pts, constraints);
  tris = extract_interior(tris, directed_boundary, constraints);
  smooth_interior(tris, pts, nb, constraints);

  // compact: drop lattice points that ended up unused
  std::vector<int> remap(pts.size(), -1);
  for (int i = 0; i < nb; ++i) remap[i] = i;
  int next = nb;
  for (const Triangle& t : tris)
    for (int v : t)
      if (remap[v] < 0) remap[v] = next++;

  Mesh mesh;
  mesh.vertices.resize(next);
  for (size_t i = 0; i < pts.size(); ++i)
    if (remap[i] >= 0) mesh.vertices[remap[i]] = pts[i];
  for (const Triangle& t : tris)
    mesh.triangles.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
  for (const auto& seg : fine.segments)
    mesh.boundary_edges.push_back({seg.a, seg.b, seg.tag});
  mesh.lambda_vertices = fine.lambda;

  mesh.delta.assign(mesh.vertices.size(), 0.0);
  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& be : mesh.boundary_edges) {
      const Vec2& a = mesh.vertices[be.a];
      const Vec2& b = mesh.vertices[be.b];
      const Vec2 ab = b - a;
      double t = (mesh.vertices[v] - a).dot(ab) / ab.squaredNorm();
      t = std::clamp(t, 0.0, 1.0);
      d = std::min(d, (mesh.vertices[v] - (a + t * ab)).norm());
    }
    mesh.delta[v] = d;
  }

  mesh.h = 0.0;
  mesh.min_angle_deg = 180.0;
  for (const auto& t : mesh.triangles) {
    const Vec2 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    mesh.h = std::max({mesh.h, (a - b).norm(), (b - c).norm(), (c - a).norm()});
    mesh.min_angle_deg = std::min(mesh.min_angle_deg, triangle_min_angle_deg(a, b, c));
    if (orient2d(a, b, c) <= 0.0)
      throw std::runtime_error("mesher produced a non-positive triangle");
  }
  if (mesh.min_angle_deg < 20.0)
    throw std::runtime_error("mesh quality below the 20 degree contract (got " +
                             std::to_string(mesh.min_angle_deg) + ")");
  return mesh;
}

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  return 0.5 * orient2d(vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]);
}

Vec2 Mesh::centroid(int t) const {
  const auto& tr = triangles[t];
  return (vertices[tr[0]] + vertices[tr[1]] + vertices[tr[2]]) / 3.0;
}

int Mesh::locate(const Vec2& x) const {
  for (size_t t = 0; t < triangles.size(); ++t) {
    const auto& tr = triangles[t];
    const Vec2 &a = vertices[tr[0]], &b = vertices[tr[1]], &c = vertices[tr[2]];
    const double eps = -1e-12;
    if (orient2d(a, b, x) >= eps && orient2d(b, c, x) >= eps && orient2d(c, a, x) >= eps)
      return static_cast<int>(t);
  }
  return -1;
}

Projector projector_for(const DomainSpec& spec) {
  if (spec.dimension != 2)
    throw std::invalid_argument("projector_for: planar domains only");
  const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
  return [spec, z](BoundaryTag tag, const Vec2& x) -> Vec2 {
    if (tag == BoundaryTag::TArc) return x / x.norm();
    const Vec2 d = x - z;
    const double phi = std::atan2(d.y(), d.x());
    // wrap into the parameter window
    double p = phi;
    while (p < spec.perturbation.window_lo) p += 2.0 * kPi;
    while (p > spec.perturbation.window_hi) p -= 2.0 * kPi;
    if (p < spec.perturbation.window_lo)  // outside the window: nearest endpoint
      p = std::abs(p + 2.0 * kPi - spec.perturbation.window_hi) <
                  std::abs(spec.perturbation.window_lo - p)
              ? spec.perturbation.window_hi
              : spec.perturbation.window_lo;
    return z + spec.sigma_radius(p) * Vec2(std::cos(p), std::sin(p));
  };
}

Mesh triangulate(const DomainSpec& spec, double h_target) {
  if (spec.dimension != 2)
    throw std::invalid_argument("triangulate: planar domains only");
  if (!(h_target > 0.0)) throw std::invalid_argument("h_target must be positive");

  // resolve the boundary at chord length <= h_target
  BoundaryPolyline probe = boundary_polyline(spec, 64);
  const double total = probe.total_length();
  const int n = std::max(16, static_cast<int>(std::ceil(total / h_target)) + 1);
  BoundaryPolyline poly = boundary_polyline(spec, n);

  // lens thickness: largest gap between the cap curve and the sphere patch
  double thickness = 0.0;
  for (const auto& sv : poly.segments) {
    if (sv.tag != BoundaryTag::Sigma) continue;
    const Vec2& p = poly.vertices[sv.a];
    double d = std::numeric_limits<double>::infinity();
    for (const auto& st : poly.segments) {
      if (st.tag != BoundaryTag::TArc) continue;
      const Vec2 a = poly.vertices[st.a], b = poly.vertices[st.b];
      const Vec2 ab = b - a;
      double t = (p - a).dot(ab) / ab.squaredNorm();
      t = std::clamp(t, 0.0, 1.0);
      d = std::min(d, (p - (a + t * ab)).norm());
    }
    thickness = std::max(thickness, d);
  }
  if (thickness < 4.0 * h_target) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "lens too thin for h_target=%g; use h_target <= %g", h_target,
                  thickness / 4.0);
    throw std::invalid_argument(buf);
  }
  return build_mesh(poly, h_target);
}

Mesh triangulate_polygon(const BoundaryPolyline& poly, double h_target) {
  if (!(h_target > 0.0)) throw std::invalid_argument("h_target must be positive");
  BoundaryPolyline fine = subdivide(poly, h_target, nullptr);
  return build_mesh(fine, h_target);
}

Mesh refine_with_projector(const Mesh& mesh, const Projector& project) {
  Mesh out;
  out.vertices = mesh.vertices;
  out.lambda_vertices = mesh.lambda_vertices;

  std::map<EdgeKey, BoundaryTag> boundary_tag;
  for (const auto& be : mesh.boundary_edges) boundary_tag[key(be.a, be.b)] = be.tag;

  std::map<EdgeKey, int> midpoint;
  auto mid_node = [&](int u, int v) {
    const EdgeKey k = key(u, v);
    auto it = midpoint.find(k);
    if (it != midpoint.end()) return it->second;
    Vec2 m = 0.5 * (mesh.vertices[u] + mesh.vertices[v]);
    auto bt = boundary_tag.find(k);
    if (bt != boundary_tag.end() && project) m = project(bt->second, m);
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(m);
    midpoint[k] = id;
    return id;
  };

  for (const auto& t : mesh.triangles) {
    const int m01 = mid_node(t[0], t[1]);
    const int m12 = mid_node(t[1], t[2]);
    const int m20 = mid_node(t[2], t[0]);
    out.triangles.push_back({t[0], m01, m20});
    out.triangles.push_back({t[1], m12, m01});
    out.triangles.push_back({t[2], m20, m12});
    out.triangles.push_back({m01, m12, m20});
  }
  for (const auto& be : mesh.boundary_edges) {
    const int m = mid_node(be.a, be.b);
    out.boundary_edges.push_back({be.a, m, be.tag});
    out.boundary_edges.push_back({m, be.b, be.tag});
  }

  out.delta.assign(out.vertices.size(), 0.0);
  for (size_t v = 0; v < out.vertices.size(); ++v) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& be : out.boundary_edges) {
      const Vec2& a = out.vertices[be.a];
      const Vec2& b = out.vertices[be.b];
      const Vec2 ab = b - a;
      double t = (out.vertices[v] - a).dot(ab) / ab.squaredNorm();
      t = std::clamp(t, 0.0, 1.0);
      d = std::min(d, (out.vertices[v] - (a + t * ab)).norm());
    }
    out.delta[v] = d;
  }

  out.h = 0.0;
  out.min_angle_deg = 180.0;
  for (const auto& t : out.triangles) {
    const Vec2 &a = out.vertices[t[0]], &b = out.vertices[t[1]], &c = out.vertices[t[2]];
    out.h = std::max({out.h, (a - b).norm(), (b - c).norm(), (c - a).norm()});
    out.min_angle_deg = std::min(out.min_angle_deg, triangle_min_angle_deg(a, b, c));
    if (orient2d(a, b, c) <= 0.0)
      throw std::runtime_error("refinement produced a non-positive triangle");
  }
  return out;
}

Mesh refine(const Mesh& mesh, const DomainSpec& spec) {
  return refine_with_projector(mesh, projector_for(spec));
}

namespace {

// degree-4 symmetric triangle rule (6 points, weights normalized to 1)
struct VolumeRule {
  double a, w;
};
constexpr VolumeRule kVolRule[2] = {{0.445948490915965, 0.223381589678011},
                                    {0.091576213509771, 0.109951743655322}};

constexpr double kGaussX[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

std::vector<VolumeQuadPoint> volume_quadrature(const Mesh& mesh) {
  std::vector<VolumeQuadPoint> q;
  q.reserve(mesh.triangles.size() * 6);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 &p0 = mesh.vertices[tr[0]], &p1 = mesh.vertices[tr[1]],
               &p2 = mesh.vertices[tr[2]];
    const double area = 0.5 * orient2d(p0, p1, p2);
    for (const auto& rule : kVolRule) {
      const double b[3] = {1.0 - 2.0 * rule.a, rule.a, rule.a};
      for (int perm = 0; perm < 3; ++perm) {
        const double l0 = b[perm % 3], l1 = b[(perm + 1) % 3], l2 = b[(perm + 2) % 3];
        q.push_back({static_cast<int>(t), l0 * p0 + l1 * p1 + l2 * p2, rule.w * area});
      }
    }
  }
  return q;
}

std::vector<EdgeQuadPoint> boundary_quadrature(const Mesh& mesh, BoundaryTag tag) {
  std::vector<EdgeQuadPoint> q;
  for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    if (be.tag != tag) continue;
    const Vec2 a = mesh.vertices[be.a], b = mesh.vertices[be.b];
    const Vec2 d = b - a;
    const double len = d.norm();
    const Vec2 n = Vec2(d.y(), -d.x()) / len;
    for (int g = 0; g < 3; ++g) {
      const double s = 0.5 * (1.0 + kGaussX[g]);
      q.push_back({static_cast<int>(e), a + s * d, 0.5 * len * kGaussW[g], n});
    }
  }
  return q;
}

double volume_integral(const Mesh& mesh, const std::function<double(const Vec2&)>& f) {
  double sum = 0.0, comp = 0.0;
  for (const auto& qp : volume_quadrature(mesh)) {
    const double term = qp.w * f(qp.x) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

double boundary_integral(const Mesh& mesh, BoundaryTag tag,
                         const std::function<double(const Vec2&)>& f) {
  double sum = 0.0, comp = 0.0;
  for (const auto& qp : boundary_quadrature(mesh, tag)) {
    const double term = qp.w * f(qp.x) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

void write_mesh_text(const Mesh& mesh, std::ostream& os) {
  char buf[160];
  os << "VERTICES " << mesh.vertices.size() << "\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g %.17g\n", i, mesh.vertices[i].x(),
                  mesh.vertices[i].y(), mesh.delta[i]);
    os << buf;
  }
  os << "TRIANGLES " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "BOUNDARY " << mesh.boundary_edges.size() << "\n";
  for (const auto& be : mesh.boundary_edges)
    os << be.a << " " << be.b << " " << to_string(be.tag) << "\n";
}

void write_mesh_csv(const Mesh& mesh, std::ostream& vertices_os, std::ostream& triangles_os) {
  char buf[160];
  vertices_os << "id,x1,x2,delta\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, mesh.vertices[i].x(),
                  mesh.vertices[i].y(), mesh.delta[i]);
    vertices_os << buf;
  }
  triangles_os << "v0,v1,v2\n";
  for (const auto& t : mesh.triangles)
    triangles_os << t[0] << "," << t[1] << "," << t[2] << "\n";
}

}  // namespace lens
