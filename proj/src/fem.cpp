#include "lens/fem.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <map>
#include <stdexcept>

namespace lens {

namespace {

// reference P2 basis on the unit triangle, barycentric (l0, l1, l2)
void p2_basis(double xi, double eta, double* phi) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  phi[0] = l0 * (2 * l0 - 1);
  phi[1] = l1 * (2 * l1 - 1);
  phi[2] = l2 * (2 * l2 - 1);
  phi[3] = 4 * l0 * l1;
  phi[4] = 4 * l1 * l2;
  phi[5] = 4 * l2 * l0;
}

void p2_grad_ref(double xi, double eta, Eigen::Matrix<double, 6, 2>& g) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  const Eigen::RowVector2d d0(-1, -1), d1(1, 0), d2(0, 1);
  g.row(0) = (4 * l0 - 1) * d0;
  g.row(1) = (4 * l1 - 1) * d1;
  g.row(2) = (4 * l2 - 1) * d2;
  g.row(3) = 4 * (l1 * d0 + l0 * d1);
  g.row(4) = 4 * (l2 * d1 + l1 * d2);
  g.row(5) = 4 * (l0 * d2 + l2 * d0);
}

// constant reference Hessians of the six basis functions
const std::array<Eigen::Matrix2d, 6>& p2_hess_ref() {
  static const std::array<Eigen::Matrix2d, 6> h = [] {
    std::array<Eigen::Matrix2d, 6> out;
    const Eigen::Vector2d d0(-1, -1), d1(1, 0), d2(0, 1);
    out[0] = 4 * d0 * d0.transpose();
    out[1] = 4 * d1 * d1.transpose();
    out[2] = 4 * d2 * d2.transpose();
    out[3] = 4 * (d0 * d1.transpose() + d1 * d0.transpose());
    out[4] = 4 * (d1 * d2.transpose() + d2 * d1.transpose());
    out[5] = 4 * (d2 * d0.transpose() + d0 * d2.transpose());
    return out;
  }();
  return h;
}

struct VolumeRulePoint {
  double xi, eta, w;
};

// degree-4 symmetric rule, weights sum to 1/2 on the reference triangle
std::array<VolumeRulePoint, 6> volume_rule() {
  std::array<VolumeRulePoint, 6> pts;
  const double a1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, w2 = 0.109951743655322;
  auto put = [&](int i, double b0, double b1, double b2, double w) {
    pts[i] = {b1, b2, w * 0.5};
    (void)b0;
  };
  put(0, 1 - 2 * a1, a1, a1, w1);
  put(1, a1, 1 - 2 * a1, a1, w1);
  put(2, a1, a1, 1 - 2 * a1, w1);
  put(3, 1 - 2 * a2, a2, a2, w2);
  put(4, a2, a2, 1 - 2 * a2, w2);
  put(5, a2, 1 - 2 * a2, a2, w2);
  return pts;
}

constexpr double kGaussX[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

// 1-D quadratic trace shape functions at edge parameter s in [0,1],
// ordered (endpoint a, midpoint, endpoint b)
void trace_basis(double s, double* L) {
  L[0] = (1 - s) * (1 - 2 * s);
  L[1] = 4 * s * (1 - s);
  L[2] = s * (2 * s - 1);
}

Eigen::Matrix2d jacobian(const Mesh& mesh, const std::array<int, 3>& tri) {
  Eigen::Matrix2d J;
  J.col(0) = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
  J.col(1) = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
  return J;
}

}  // namespace

std::shared_ptr<const P2Space> build_space(std::shared_ptr<const Mesh> mesh) {
  auto space = std::make_shared<P2Space>();
  space->mesh = mesh;
  const int nv = static_cast<int>(mesh->vertices.size());

  std::map<std::pair<int, int>, int> edge_node;
  auto node_of = [&](int u, int v) {
    const auto k = std::make_pair(std::min(u, v), std::max(u, v));
    auto it = edge_node.find(k);
    if (it != edge_node.end()) return it->second;
    const int id = nv + static_cast<int>(edge_node.size());
    edge_node.emplace(k, id);
    return id;
  };

  space->elem_nodes.reserve(mesh->triangles.size());
  for (const auto& t : mesh->triangles)
    space->elem_nodes.push_back({t[0], t[1], t[2], node_of(t[0], t[1]),
                                 node_of(t[1], t[2]), node_of(t[2], t[0])});
  space->n_nodes = nv + static_cast<int>(edge_node.size());

  space->node_pos.resize(space->n_nodes);
  for (int v = 0; v < nv; ++v) space->node_pos[v] = mesh->vertices[v];
  for (const auto& [k, id] : edge_node)
    space->node_pos[id] = 0.5 * (mesh->vertices[k.first] + mesh->vertices[k.second]);

  // owning element of each boundary edge
  std::map<std::pair<int, int>, std::pair<int, int>> directed;
  for (size_t t = 0; t < mesh->triangles.size(); ++t) {
    const auto& tr = mesh->triangles[t];
    for (int e = 0; e < 3; ++e)
      directed[{tr[e], tr[(e + 1) % 3]}] = {static_cast<int>(t), e};
  }
  space->boundary_ref.resize(mesh->boundary_edges.size());
  for (size_t i = 0; i < mesh->boundary_edges.size(); ++i) {
    const auto& be = mesh->boundary_edges[i];
    auto it = directed.find({be.a, be.b});
    if (it == directed.end())
      throw std::runtime_error("boundary edge has no owning triangle");
    space->boundary_ref[i] = {it->second.first, it->second.second,
                              node_of(be.a, be.b)};
  }

  space->dirichlet.assign(space->n_nodes, 0);
  for (size_t i = 0; i < mesh->boundary_edges.size(); ++i) {
    const auto& be = mesh->boundary_edges[i];
    if (be.tag != BoundaryTag::Sigma) continue;
    space->dirichlet[be.a] = 1;
    space->dirichlet[be.b] = 1;
    space->dirichlet[space->boundary_ref[i].mid_node] = 1;
  }
  for (int l : mesh->lambda_vertices) space->dirichlet[l] = 1;
  return space;
}

LinearSystem assemble(std::shared_ptr<const P2Space> space, bool include_steklov) {
  const Mesh& mesh = *space->mesh;
  const int n = space->n_nodes;
  const auto rule = volume_rule();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 40);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

  const double dim = 2.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Eigen::Matrix2d J = jacobian(mesh, mesh.triangles[t]);
    const double detJ = J.determinant();
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const auto& nodes = space->elem_nodes[t];

    Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> load = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 2> gref;
    double phi[6];
    for (const auto& q : rule) {
      p2_grad_ref(q.xi, q.eta, gref);
      p2_basis(q.xi, q.eta, phi);
      Eigen::Matrix<double, 6, 2> g = gref * Jit.transpose();
      K += (q.w * detJ) * (g * g.transpose());
      for (int i = 0; i < 6; ++i) load[i] += q.w * detJ * phi[i];
    }
    K = 0.5 * (K + K.transpose()).eval();

    for (int i = 0; i < 6; ++i) {
      const int gi = nodes[i];
      if (space->dirichlet[gi]) continue;
      b[gi] += -dim * load[i];
      for (int j = 0; j < 6; ++j) {
        const int gj = nodes[j];
        if (space->dirichlet[gj]) continue;
        trips.emplace_back(gi, gj, K(i, j));
      }
    }
  }

  if (include_steklov) {
    for (size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
      const auto& be = mesh.boundary_edges[i];
      if (be.tag != BoundaryTag::TArc) continue;
      const double len = (mesh.vertices[be.b] - mesh.vertices[be.a]).norm();
      const int nodes[3] = {be.a, space->boundary_ref[i].mid_node, be.b};
      double L[3];
      Eigen::Matrix3d M = Eigen::Matrix3d::Zero();
      for (int g = 0; g < 3; ++g) {
        const double s = 0.5 * (1.0 + kGaussX[g]);
        trace_basis(s, L);
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) M(a, c) += 0.5 * len * kGaussW[g] * L[a] * L[c];
      }
      for (int a = 0; a < 3; ++a) {
        if (space->dirichlet[nodes[a]]) continue;
        for (int c = 0; c < 3; ++c) {
          if (space->dirichlet[nodes[c]]) continue;
          trips.emplace_back(nodes[a], nodes[c], -M(a, c));
        }
      }
    }
  }

  for (int i = 0; i < n; ++i)
    if (space->dirichlet[i]) trips.emplace_back(i, i, 1.0);

  LinearSystem sys;
  sys.space = space;
  sys.A.resize(n, n);
  sys.A.setFromTriplets(trips.begin(), trips.end());
  sys.b = std::move(b);
  return sys;
}

LinearSystem assemble(std::shared_ptr<const Mesh> mesh) {
  return assemble(build_space(std::move(mesh)), true);
}

namespace {

void finalize_field(Field& field) {
  const P2Space& space = *field.space;
  const Mesh& mesh = *space.mesh;
  const auto& href = p2_hess_ref();

  field.elem_hessian.resize(mesh.triangles.size());
  field.grad_max = 0.0;
  Eigen::Matrix<double, 6, 2> gref;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Eigen::Matrix2d J = jacobian(mesh, mesh.triangles[t]);
    const Eigen::Matrix2d Jinv = J.inverse();
    const auto& nodes = space.elem_nodes[t];

    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 6; ++i) H += field.coeffs[nodes[i]] * href[i];
    field.elem_hessian[t] = Jinv.transpose() * H * Jinv;

    // |grad| of a P2 field is piecewise linear per component: corners suffice
    const double corners[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (const auto& c : corners) {
      p2_grad_ref(c[0], c[1], gref);
      Eigen::RowVector2d g = Eigen::RowVector2d::Zero();
      for (int i = 0; i < 6; ++i) g += field.coeffs[nodes[i]] * gref.row(i);
      field.grad_max = std::max(field.grad_max, (Jinv.transpose() * g.transpose()).norm());
    }
  }
  field.max_nodal = field.coeffs.size() ? field.coeffs.maxCoeff() : 0.0;
  field.sign_ok = field.max_nodal <= 1e-8;
}

}  // namespace

Field solve(const LinearSystem& sys) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(sys.A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error(
        "ill-posed or near-degenerate discrete system: factorization failed");

  Field field;
  field.space = sys.space;
  field.coeffs = lu.solve(sys.b);
  const double bn = sys.b.norm();
  field.solve_residual = (sys.A * field.coeffs - sys.b).norm() / (bn > 0 ? bn : 1.0);
  if (!(field.solve_residual <= 1e-10))
    throw std::runtime_error(
        "ill-posed or near-degenerate discrete system: residual " +
        std::to_string(field.solve_residual));
  finalize_field(field);
  return field;
}

Field interpolate(std::shared_ptr<const P2Space> space,
                  const std::function<double(const Vec2&)>& f) {
  Field field;
  field.space = space;
  field.coeffs.resize(space->n_nodes);
  for (int i = 0; i < space->n_nodes; ++i) field.coeffs[i] = f(space->node_pos[i]);
  field.solve_residual = 0.0;
  finalize_field(field);
  return field;
}

double Field::value(int tri, const Vec2& x) const {
  const Mesh& m = *space->mesh;
  const Eigen::Matrix2d J = jacobian(m, m.triangles[tri]);
  const Vec2 ref = J.inverse() * (x - m.vertices[m.triangles[tri][0]]);
  double phi[6];
  p2_basis(ref.x(), ref.y(), phi);
  double v = 0.0;
  for (int i = 0; i < 6; ++i) v += coeffs[space->elem_nodes[tri][i]] * phi[i];
  return v;
}

Vec2 Field::gradient(int tri, const Vec2& x) const {
  const Mesh& m = *space->mesh;
  const Eigen::Matrix2d J = jacobian(m, m.triangles[tri]);
  const Vec2 ref = J.inverse() * (x - m.vertices[m.triangles[tri][0]]);
  Eigen::Matrix<double, 6, 2> gref;
  p2_grad_ref(ref.x(), ref.y(), gref);
  Eigen::RowVector2d g = Eigen::RowVector2d::Zero();
  for (int i = 0; i < 6; ++i) g += coeffs[space->elem_nodes[tri][i]] * gref.row(i);
  return J.inverse().transpose() * g.transpose();
}

double Field::value_at(const Vec2& x) const {
  const int t = space->mesh->locate(x);
  if (t < 0) throw std::invalid_argument("point is outside the mesh");
  return value(t, x);
}

std::vector<FluxSample> normal_derivative_on(const Field& field, BoundaryTag tag) {
  const Mesh& mesh = field.mesh();
  std::vector<FluxSample> out;
  for (size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    const auto& be = mesh.boundary_edges[i];
    if (be.tag != tag) continue;
    const Vec2 a = mesh.vertices[be.a], b = mesh.vertices[be.b];
    const Vec2 d = b - a;
    const double len = d.norm();
    const Vec2 n = Vec2(d.y(), -d.x()) / len;
    const int tri = field.space->boundary_ref[i].tri;
    const int mid = field.space->boundary_ref[i].mid_node;
    for (int g = 0; g < 3; ++g) {
      const double s = 0.5 * (1.0 + kGaussX[g]);
      const Vec2 x = a + s * d;
      double L[3];
      trace_basis(s, L);
      const double u = L[0] * field.coeffs[be.a] + L[1] * field.coeffs[mid] +
                       L[2] * field.coeffs[be.b];
      FluxSample fs;
      fs.edge = static_cast<int>(i);
      fs.x = x;
      fs.w = 0.5 * len * kGaussW[g];
      fs.normal = n;
      fs.u_nu = field.gradient(tri, x).dot(n);
      fs.u = u;
      out.push_back(fs);
    }
  }
  return out;
}

const std::vector<Eigen::Matrix2d>& hessian_per_element(const Field& field) {
  return field.elem_hessian;
}

double lipschitz_bound(const Field& field) { return field.grad_max; }

double torsion_ratio(const Field& field) {
  const Mesh& mesh = field.mesh();
  const auto rule = volume_rule();

  double integral_u = 0.0, dirichlet_energy = 0.0;
  Eigen::Matrix<double, 6, 2> gref;
  double phi[6];
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Eigen::Matrix2d J = jacobian(mesh, mesh.triangles[t]);
    const double detJ = J.determinant();
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const auto& nodes = field.space->elem_nodes[t];
    for (const auto& q : rule) {
      p2_basis(q.xi, q.eta, phi);
      p2_grad_ref(q.xi, q.eta, gref);
      double u = 0.0;
      Eigen::RowVector2d g = Eigen::RowVector2d::Zero();
      for (int i = 0; i < 6; ++i) {
        u += field.coeffs[nodes[i]] * phi[i];
        g += field.coeffs[nodes[i]] * gref.row(i);
      }
      integral_u += q.w * detJ * u;
      dirichlet_energy += q.w * detJ * (Jit * g.transpose()).squaredNorm();
    }
  }

  double steklov = 0.0;
  for (const auto& fs : normal_derivative_on(field, BoundaryTag::TArc))
    steklov += fs.w * fs.u * fs.u;

  const double denom = dirichlet_energy - steklov;
  if (!(denom > 0.0))
    throw std::runtime_error(
        "torsion ratio undefined: the quadratic form is not positive here");
  return integral_u * integral_u / denom;
}

}  // namespace lens
