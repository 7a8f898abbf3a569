#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "lens/fem.hpp"
#include "lens/oracle.hpp"

using namespace lens;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::VectorXd scalar_azimuth(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

std::shared_ptr<const Mesh> lens_mesh(const DomainSpec& spec, double h, int refines) {
  Mesh m = triangulate(spec, h);
  for (int r = 0; r < refines; ++r) m = refine(m, spec);
  return std::make_shared<Mesh>(std::move(m));
}

// ---- symbolic oracle for the reference P2 stiffness ----
// quadratics over monomials 1, xi, eta, xi^2, xi*eta, eta^2
using Poly6 = std::array<double, 6>;
// their gradients are linear: monomials 1, xi, eta
using Poly3 = std::array<double, 3>;

Poly3 ddxi(const Poly6& p) { return {p[1], 2 * p[3], p[4]}; }
Poly3 ddeta(const Poly6& p) { return {p[2], p[4], 2 * p[5]}; }

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }
double mono_integral(int p, int q) {
  return factorial(p) * factorial(q) / factorial(p + q + 2);
}

double poly3_product_integral(const Poly3& a, const Poly3& b) {
  const int px[3] = {0, 1, 0};
  const int py[3] = {0, 0, 1};
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      s += a[i] * b[j] * mono_integral(px[i] + px[j], py[i] + py[j]);
  return s;
}

std::array<Poly6, 6> p2_polys() {
  return {{
      {1, -3, -3, 2, 4, 2},  // vertex (0,0)
      {0, -1, 0, 2, 0, 0},   // vertex (1,0)
      {0, 0, -1, 0, 0, 2},   // vertex (0,1)
      {0, 4, 0, -4, -4, 0},  // midpoint of edge 01
      {0, 0, 0, 0, 4, 0},    // midpoint of edge 12
      {0, 0, 4, 0, -4, -4},  // midpoint of edge 20
  }};
}

std::shared_ptr<const Mesh> reference_triangle() {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  m.boundary_edges = {{0, 1, BoundaryTag::Sigma},
                      {1, 2, BoundaryTag::Sigma},
                      {2, 0, BoundaryTag::Sigma}};
  m.delta = {0, 0, 0};
  m.h = std::sqrt(2.0);
  m.min_angle_deg = 45.0;
  return std::make_shared<Mesh>(std::move(m));
}

}  // namespace

TEST_CASE("reference stiffness matches symbolic integration") {
  auto space = build_space(reference_triangle());
  // strip boundary conditions to see the raw element matrix
  auto raw = std::make_shared<P2Space>(*space);
  std::fill(raw->dirichlet.begin(), raw->dirichlet.end(), 0);
  const LinearSystem sys = assemble(raw, false);

  const auto polys = p2_polys();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double exact = poly3_product_integral(ddxi(polys[i]), ddxi(polys[j])) +
                           poly3_product_integral(ddeta(polys[i]), ddeta(polys[j]));
      CHECK(sys.A.coeff(i, j) == doctest::Approx(exact).epsilon(1e-12));
    }
  }

  // the P2 basis sums to one, so the raw load sums to -N |triangle|
  CHECK(sys.b.sum() == doctest::Approx(-2.0 * 0.5).epsilon(1e-13));
}

TEST_CASE("steklov term dropout and symmetry") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  auto mesh = lens_mesh(spec, 0.1, 0);
  auto space = build_space(mesh);
  const LinearSystem with = assemble(space, true);
  const LinearSystem without = assemble(space, false);

  // the difference is the boundary mass on T: nonzero only at T nodes
  Eigen::SparseMatrix<double> diff = without.A - with.A;
  std::vector<char> on_t(space->n_nodes, 0);
  for (size_t i = 0; i < mesh->boundary_edges.size(); ++i) {
    const auto& be = mesh->boundary_edges[i];
    if (be.tag != BoundaryTag::TArc) continue;
    on_t[be.a] = on_t[be.b] = 1;
    on_t[space->boundary_ref[i].mid_node] = 1;
  }
  double off_t = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
      if (!on_t[it.row()] || !on_t[it.col()])
        off_t = std::max(off_t, std::abs(it.value()));
  CHECK(off_t < 1e-14);

  Eigen::SparseMatrix<double> asym =
      with.A - Eigen::SparseMatrix<double>(with.A.transpose());
  double amax = 0.0;
  for (int k = 0; k < asym.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(asym, k); it; ++it)
      amax = std::max(amax, std::abs(it.value()));
  CHECK(amax < 1e-12);

  // with no Dirichlet part at all, the raw load sums to -N |Omega|
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto sq_mesh = std::make_shared<Mesh>(
      triangulate_polygon(polygon_polyline(square, BoundaryTag::TArc), 0.2));
  const LinearSystem free_sys = assemble(build_space(sq_mesh), false);
  CHECK(free_sys.b.sum() == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("rigid lens reproduces the quadratic solution") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  const ExactSolution exact = exact_solution(2, 1.0, scalar_azimuth(0.0));

  double prev_node_err = 0.0, prev_mid_err = 0.0;
  const Vec2 probe(0.0, 0.93);
  for (int level = 0; level < 2; ++level) {
    auto mesh = lens_mesh(spec, 0.1, level);
    auto space = build_space(mesh);
    const Field u = solve(assemble(space, true));

    CHECK(u.solve_residual <= 1e-10);
    CHECK(u.sign_ok);
    CHECK(u.coeffs.minCoeff() >= -0.5 - 1e-6);

    double node_err = 0.0;
    for (int i = 0; i < space->n_nodes; ++i)
      node_err = std::max(node_err,
                          std::abs(u.coeffs[i] - exact.value2(space->node_pos[i])));
    const double mid_err = std::abs(u.value_at(probe) - exact.value2(probe));
    if (level > 0) {
      CHECK(node_err < 0.3 * prev_node_err);  // second order
      CHECK(mid_err < 0.6 * prev_mid_err + 1e-14);
    }
    prev_node_err = node_err;
    prev_mid_err = mid_err;
  }
  CHECK(prev_node_err < 1e-3);
}

TEST_CASE("boundary flux behavior") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  double prev_sigma_dev = 0.0, prev_steklov_dev = 0.0, prev_weak = 0.0;
  for (int level = 0; level < 2; ++level) {
    auto mesh = lens_mesh(spec, 0.1, level);
    const Field u = solve(assemble(build_space(mesh), true));

    double dev = 0.0, len = 0.0;
    for (const auto& fs : normal_derivative_on(u, BoundaryTag::Sigma)) {
      dev += fs.w * std::abs(fs.u_nu - 1.0);
      len += fs.w;
    }
    dev /= len;
    double sdev = 0.0, slen = 0.0;
    for (const auto& fs : normal_derivative_on(u, BoundaryTag::TArc)) {
      sdev += fs.w * std::abs(fs.u_nu - fs.u);
      slen += fs.w;
    }
    sdev /= slen;
    if (level > 0) {
      CHECK(dev < 0.6 * prev_sigma_dev);
      CHECK(sdev < 0.6 * prev_steklov_dev);
    }
    prev_sigma_dev = dev;
    prev_steklov_dev = sdev;

    // flux closure: int_Gamma u_nu = N |Omega|
    double flux = 0.0;
    for (auto tag : {BoundaryTag::Sigma, BoundaryTag::TArc})
      for (const auto& fs : normal_derivative_on(u, tag)) flux += fs.w * fs.u_nu;
    const double area = volume_integral(*mesh, [](const Vec2&) { return 1.0; });
    CHECK(flux == doctest::Approx(2.0 * area).epsilon(4e-3));

    // natural condition against a smooth test function
    double weak = 0.0;
    for (const auto& fs : normal_derivative_on(u, BoundaryTag::TArc))
      weak += fs.w * (fs.u_nu - fs.u) * (1.0 + fs.x.x());
    CHECK(std::abs(weak) < 0.02);
    if (level > 0) CHECK(std::abs(weak) < 0.6 * prev_weak);
    prev_weak = std::abs(weak);
  }
  CHECK(prev_sigma_dev < 3e-3);
}

TEST_CASE("pure dirichlet disk torsion") {
  const double r = 0.8;
  const int n = 160;
  std::vector<Vec2> circle;
  for (int i = 0; i < n; ++i)
    circle.push_back(r * Vec2(std::cos(2 * kPi * i / n), std::sin(2 * kPi * i / n)));
  auto mesh = std::make_shared<Mesh>(
      triangulate_polygon(polygon_polyline(circle, BoundaryTag::Sigma), 0.06));
  const Field u = solve(assemble(build_space(mesh), true));

  // classical torsion solution (|x|^2 - r^2)/2 up to the polygonal boundary
  const Vec2 probe(0.1, -0.2);
  CHECK(u.value_at(probe) ==
        doctest::Approx(0.5 * (probe.squaredNorm() - r * r)).epsilon(5e-3));

  double dev = 0.0, len = 0.0;
  for (const auto& fs : normal_derivative_on(u, BoundaryTag::Sigma)) {
    dev += fs.w * std::abs(fs.u_nu - r);
    len += fs.w;
  }
  CHECK(dev / len < 5e-3);
}

TEST_CASE("per element hessians") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  auto space = build_space(lens_mesh(spec, 0.1, 0));

  const Vec2 z(0.3, 1.1);
  const Field quad =
      interpolate(space, [&](const Vec2& x) { return 0.5 * (x - z).squaredNorm(); });
  for (const auto& H : hessian_per_element(quad)) {
    CHECK((H - Eigen::Matrix2d::Identity()).norm() < 1e-10);
    CHECK(H.squaredNorm() - 0.5 * H.trace() * H.trace() >= -1e-12);
  }

  const Field saddle = interpolate(space, [](const Vec2& x) { return x.x() * x.y(); });
  Eigen::Matrix2d S;
  S << 0, 1, 1, 0;
  for (const auto& H : hessian_per_element(saddle)) CHECK((H - S).norm() < 1e-10);
}

TEST_CASE("lipschitz bound") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  auto mesh0 = lens_mesh(spec, 0.08, 0);
  auto space = build_space(mesh0);
  const Field u = solve(assemble(space, true));

  // |grad u| = |x - z| peaks on the cap curve at R; the discrete maximum
  // overshoots near the corners and decays toward R under refinement
  const double L0 = lipschitz_bound(u);
  CHECK(L0 >= 1.0 - 5e-3);
  CHECK(L0 <= 1.05);
  const Field u1 = solve(assemble(build_space(lens_mesh(spec, 0.08, 1)), true));
  CHECK(lipschitz_bound(u1) - 1.0 < 0.7 * (L0 - 1.0));
  CHECK(lipschitz_bound(u1) >= 1.0 - 5e-3);

  // linear in the coefficients
  const Field base =
      interpolate(space, [](const Vec2& x) { return std::sin(x.x()) * x.y(); });
  const Field twice =
      interpolate(space, [](const Vec2& x) { return 2.0 * std::sin(x.x()) * x.y(); });
  CHECK(lipschitz_bound(twice) ==
        doctest::Approx(2.0 * lipschitz_bound(base)).epsilon(1e-12));
}

TEST_CASE("torsion ratio and weak form self test") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  double prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    auto space = build_space(lens_mesh(spec, 0.1, level));
    const Field u = solve(assemble(space, true));

    double iu = 0.0;
    for (const auto& q : volume_quadrature(u.mesh())) iu += q.w * u.value(q.tri, q.x);

    const double ratio = torsion_ratio(u);
    // with v = u in the weak form the ratio collapses to -(1/N) int u
    CHECK(ratio == doctest::Approx(-0.5 * iu).epsilon(1e-8));
    CHECK(ratio > 0.0);
    if (level > 0) CHECK(std::abs(ratio - prev) < 1e-2 * std::abs(ratio));
    prev = ratio;
  }
}
