#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <vector>

#include "lens/mesh.hpp"

namespace lens {

// Quadratic Lagrange space over a triangulation: one node per vertex plus
// one per edge. Dirichlet nodes are all nodes on Sigma edges and the two
// corner vertices.
struct P2Space {
  std::shared_ptr<const Mesh> mesh;
  std::vector<std::array<int, 6>> elem_nodes;  // v0 v1 v2 m01 m12 m20
  std::vector<Vec2> node_pos;
  int n_nodes = 0;
  std::vector<char> dirichlet;

  struct BEdgeRef {
    int tri = -1;        // owning element of mesh->boundary_edges[i]
    int local_edge = 0;  // 0: v0v1, 1: v1v2, 2: v2v0
    int mid_node = 0;
  };
  std::vector<BEdgeRef> boundary_ref;
};

std::shared_ptr<const P2Space> build_space(std::shared_ptr<const Mesh> mesh);

struct LinearSystem {
  std::shared_ptr<const P2Space> space;
  Eigen::SparseMatrix<double> A;  // stiffness minus Steklov mass on T
  Eigen::VectorXd b;
};

LinearSystem assemble(std::shared_ptr<const P2Space> space, bool include_steklov = true);
LinearSystem assemble(std::shared_ptr<const Mesh> mesh);

struct Field {
  std::shared_ptr<const P2Space> space;
  Eigen::VectorXd coeffs;
  std::vector<Eigen::Matrix2d> elem_hessian;
  double grad_max = 0.0;        // max |grad u_h|, attained at element corners
  double solve_residual = 0.0;  // relative |Ax-b|/|b|
  double max_nodal = 0.0;       // sign diagnostic: should stay <= ~0
  bool sign_ok = true;

  const Mesh& mesh() const { return *space->mesh; }
  double value(int tri, const Vec2& x) const;
  Vec2 gradient(int tri, const Vec2& x) const;
  double value_at(const Vec2& x) const;  // locates the element first
};

// Direct sparse factorization; throws on failure or residual above 1e-10.
Field solve(const LinearSystem& sys);

// Builds a Field from nodal interpolation of f (no solve); test utility.
Field interpolate(std::shared_ptr<const P2Space> space,
                  const std::function<double(const Vec2&)>& f);

struct FluxSample {
  int edge = 0;  // index into mesh.boundary_edges
  Vec2 x = Vec2::Zero();
  double w = 0.0;
  Vec2 normal = Vec2::Zero();
  double u_nu = 0.0;
  double u = 0.0;
};

std::vector<FluxSample> normal_derivative_on(const Field& field, BoundaryTag tag);

const std::vector<Eigen::Matrix2d>& hessian_per_element(const Field& field);
double lipschitz_bound(const Field& field);

// Rayleigh-type quotient (int u)^2 / (int |grad u|^2 - int_T u^2).
double torsion_ratio(const Field& field);

}  // namespace lens
