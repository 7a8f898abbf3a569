#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "lens/mesh.hpp"
#include "lens/oracle.hpp"

using namespace lens;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::VectorXd scalar_azimuth(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

// closed form for the R = 1 lens: two equal circular segments, pi/2 - 1
constexpr double kLensAreaR1 = kPi / 2.0 - 1.0;

double mesh_area(const Mesh& m) {
  double a = 0.0;
  for (size_t t = 0; t < m.triangles.size(); ++t) a += m.triangle_area(t);
  return a;
}

Mesh reference_triangle_mesh() {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  m.boundary_edges = {{0, 1, BoundaryTag::Sigma},
                      {1, 2, BoundaryTag::Sigma},
                      {2, 0, BoundaryTag::Sigma}};
  m.delta = {0, 0, 0};
  m.h = std::sqrt(2.0);
  m.min_angle_deg = 45.0;
  return m;
}

}  // namespace

TEST_CASE("triangulation contract on the symmetric lens") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  const Mesh mesh = triangulate(spec, 0.1);

  CHECK(mesh.min_angle_deg >= 20.0);

  // conforming: boundary edges in one triangle, interior edges in two
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      int u = t[e], v = t[(e + 1) % 3];
      ++count[{std::min(u, v), std::max(u, v)}];
    }
  std::map<std::pair<int, int>, int> bset;
  for (const auto& be : mesh.boundary_edges)
    ++bset[{std::min(be.a, be.b), std::max(be.a, be.b)}];
  for (const auto& [k, c] : count) {
    if (bset.count(k))
      CHECK(c == 1);
    else
      CHECK(c == 2);
  }
  // every boundary edge is present
  for (const auto& [k, c] : bset) CHECK(count.count(k) == 1);

  for (size_t t = 0; t < mesh.triangles.size(); ++t)
    CHECK(mesh.triangle_area(t) > 0.0);

  // Sigma vertices sit on the true cap circle
  const Vec2 z(0, std::sqrt(2.0));
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != BoundaryTag::Sigma) continue;
    CHECK(std::abs((mesh.vertices[be.a] - z).norm() - 1.0) < 1e-10);
    CHECK(std::abs((mesh.vertices[be.b] - z).norm() - 1.0) < 1e-10);
  }

  CHECK(mesh_area(mesh) == doctest::Approx(kLensAreaR1).epsilon(2e-3));

  // thin lens rejected with a suggestion
  const DomainSpec thin = make_symmetric_cap(2, 0.1, scalar_azimuth(0.0));
  CHECK_THROWS_WITH_AS(triangulate(thin, 0.05),
                       doctest::Contains("use h_target <="), std::invalid_argument);
}

TEST_CASE("refinement quadruples and reprojects") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  const Mesh m0 = triangulate(spec, 0.13);
  const Mesh m1 = refine(m0, spec);

  CHECK(m1.triangles.size() == 4 * m0.triangles.size());
  CHECK(m1.boundary_edges.size() == 2 * m0.boundary_edges.size());
  CHECK(m1.min_angle_deg >= 20.0);

  // new boundary midpoints land on the true curves
  const Vec2 z(0, std::sqrt(2.0));
  for (const auto& be : m1.boundary_edges) {
    for (int v : {be.a, be.b}) {
      const Vec2 x = m1.vertices[v];
      if (be.tag == BoundaryTag::Sigma)
        CHECK(std::abs((x - z).norm() - 1.0) < 1e-10);
      else
        CHECK(std::abs(x.norm() - 1.0) < 1e-10);
    }
  }

  // area error shrinks with order >= 1.8 over three refinements
  std::vector<double> errs;
  Mesh m = m0;
  errs.push_back(std::abs(mesh_area(m) - kLensAreaR1));
  for (int r = 0; r < 3; ++r) {
    m = refine(m, spec);
    errs.push_back(std::abs(mesh_area(m) - kLensAreaR1));
  }
  double s0 = 0, s1 = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < errs.size(); ++i) {
    const double x = -static_cast<double>(i) * std::log(2.0);
    s0 += x;
    s1 += std::log(errs[i]);
    sxx += x * x;
    sxy += x * std::log(errs[i]);
  }
  const double n = static_cast<double>(errs.size());
  const double slope = (n * sxy - s0 * s1) / (n * sxx - s0 * s0);
  CHECK(slope >= 1.8);

  // old interior vertices keep their boundary distance to second order
  double max_diff = 0.0;
  for (size_t v = 0; v < m0.vertices.size(); ++v) {
    bool on_boundary = false;
    for (const auto& be : m0.boundary_edges)
      if (be.a == static_cast<int>(v) || be.b == static_cast<int>(v))
        on_boundary = true;
    if (!on_boundary) max_diff = std::max(max_diff, std::abs(m0.delta[v] - m1.delta[v]));
  }
  CHECK(max_diff <= 1.0 * m0.h * m0.h);
}

TEST_CASE("volume quadrature") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  Mesh mesh = triangulate(spec, 0.08);
  mesh = refine(mesh, spec);

  CHECK(volume_integral(mesh, [](const Vec2&) { return 1.0; }) ==
        doctest::Approx(mesh_area(mesh)).epsilon(1e-12));

  // first moment against the mesh-free adaptive quadrature oracle
  const double moment_oracle =
      lens_volume_integral(spec, [](const Vec2& x) { return x.y(); }, 1e-10);
  const double moment_mesh = volume_integral(mesh, [](const Vec2& x) { return x.y(); });
  CHECK(moment_mesh == doctest::Approx(moment_oracle).epsilon(5e-4));

  // cubic exactness on the reference triangle
  const Mesh ref = reference_triangle_mesh();
  CHECK(volume_integral(ref, [](const Vec2& x) { return x.x() * x.x() * x.x(); }) ==
        doctest::Approx(1.0 / 20.0).epsilon(1e-13));
  CHECK(volume_integral(ref, [](const Vec2& x) { return x.x() * x.x() * x.y(); }) ==
        doctest::Approx(1.0 / 60.0).epsilon(1e-13));
}

TEST_CASE("boundary quadrature") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.0));
  Mesh mesh = triangulate(spec, 0.08);
  mesh = refine(mesh, spec);

  // both boundary portions have closed-form length pi/2 for R = 1
  const double len_sigma =
      boundary_integral(mesh, BoundaryTag::Sigma, [](const Vec2&) { return 1.0; });
  const double len_t =
      boundary_integral(mesh, BoundaryTag::TArc, [](const Vec2&) { return 1.0; });
  CHECK(len_sigma == doctest::Approx(kPi / 2.0).epsilon(2e-4));
  CHECK(len_t == doctest::Approx(kPi / 2.0).epsilon(2e-4));

  // quadratic exactness on a straight edge
  const Mesh ref = reference_triangle_mesh();
  double along = 0.0;
  for (const auto& q : boundary_quadrature(ref, BoundaryTag::Sigma))
    if (q.x.y() == 0.0) along += q.w * q.x.x() * q.x.x();
  CHECK(along == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("divergence closure") {
  const DomainSpec spec = make_symmetric_cap(2, 1.0, scalar_azimuth(0.1));
  const Mesh mesh = triangulate(spec, 0.08);

  // constant field: the closed polygon normals cancel exactly
  double flux = 0.0, total_len = 0.0;
  for (auto tag : {BoundaryTag::Sigma, BoundaryTag::TArc}) {
    for (const auto& q : boundary_quadrature(mesh, tag)) {
      flux += q.w * q.normal.y();
      total_len += q.w;
    }
  }
  CHECK(std::abs(flux) <= 1e-10 * total_len);

  // Killing-type field: volume divergence equals its boundary flux to O(h^2)
  const double vol = volume_integral(mesh, [](const Vec2& x) { return 2.0 * x.y(); });
  double bflux = 0.0;
  for (auto tag : {BoundaryTag::Sigma, BoundaryTag::TArc})
    for (const auto& q : boundary_quadrature(mesh, tag))
      bflux += q.w * killing_field2(q.x).dot(q.normal);
  CHECK(vol == doctest::Approx(bflux).epsilon(5e-3));
}

TEST_CASE("polygon fixtures mesh cleanly") {
  const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const Mesh m = triangulate_polygon(polygon_polyline(square), 0.1);
  CHECK(mesh_area(m) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.min_angle_deg >= 20.0);
  CHECK(m.lambda_vertices.empty());
}
