#include "lens/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lens/oracle.hpp"

namespace lens {

namespace {

double interp_delta(const Mesh& mesh, int tri, const Vec2& x) {
  const auto& t = mesh.triangles[tri];
  const Vec2 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
  Eigen::Matrix2d M;
  M.col(0) = b - a;
  M.col(1) = c - a;
  const Vec2 lm = M.inverse() * (x - a);
  const double l1 = lm.x(), l2 = lm.y(), l0 = 1.0 - l1 - l2;
  return l0 * mesh.delta[t[0]] + l1 * mesh.delta[t[1]] + l2 * mesh.delta[t[2]];
}

double exact_delta(const Mesh& mesh, const Vec2& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& be : mesh.boundary_edges) {
    const Vec2& a = mesh.vertices[be.a];
    const Vec2& b = mesh.vertices[be.b];
    const Vec2 ab = b - a;
    double t = (x - a).dot(ab) / ab.squaredNorm();
    t = std::clamp(t, 0.0, 1.0);
    d = std::min(d, (x - (a + t * ab)).norm());
  }
  return d;
}

// Sigma samples: edge endpoints plus flux quadrature points
std::vector<Vec2> sigma_samples(const Mesh& mesh) {
  std::vector<Vec2> pts;
  for (const auto& be : mesh.boundary_edges)
    if (be.tag == BoundaryTag::Sigma) pts.push_back(mesh.vertices[be.a]);
  for (const auto& q : boundary_quadrature(mesh, BoundaryTag::Sigma)) pts.push_back(q.x);
  for (int l : mesh.lambda_vertices) pts.push_back(mesh.vertices[l]);
  return pts;
}

}  // namespace

IdentityReport make_report(const std::string& name, double lhs, double rhs, double h) {
  IdentityReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = std::abs(lhs - rhs);
  r.scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
  r.relative = r.residual / r.scale;
  r.h = h;
  return r;
}

double compute_R(const Field& field) {
  const Mesh& mesh = field.mesh();
  const double vol = volume_integral(mesh, [](const Vec2& x) { return x.y(); });
  const double surf =
      boundary_integral(mesh, BoundaryTag::Sigma, [](const Vec2& x) { return x.y(); });
  if (!(std::abs(surf) > 1e-300))
    throw std::runtime_error("compute_R: moment of Sigma vanished");
  return 2.0 * vol / surf;
}

ZResult compute_z(const Field& field) {
  const Mesh& mesh = field.mesh();
  double area = 0.0;
  Vec2 first_moment = Vec2::Zero();
  Vec2 grad_int = Vec2::Zero();
  for (const auto& q : volume_quadrature(mesh)) {
    area += q.w;
    first_moment += q.w * q.x;
    grad_int += q.w * field.gradient(q.tri, q.x);
  }
  Vec2 steklov_moment = Vec2::Zero();
  for (const auto& fs : normal_derivative_on(field, BoundaryTag::TArc))
    steklov_moment += fs.w * fs.u * fs.x;

  ZResult out;
  out.z = (first_moment - steklov_moment) / area;
  out.z_volume = (first_moment - grad_int) / area;
  out.cross_check = (out.z - out.z_volume).norm();
  return out;
}

Vec2 compute_z_sigma(const Field& field, double sigma) {
  const Mesh& mesh = field.mesh();
  const auto keep = parallel_set_elements(mesh, sigma);
  if (keep.empty()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "parallel set is empty at sigma=%g; it exceeds the inradius", sigma);
    throw std::invalid_argument(buf);
  }
  const auto conn = parallel_set_connected(mesh, sigma);
  if (!conn.connected) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "parallel set disconnects at sigma=%g (%d components); keep sigma "
                  "below the connectedness threshold sigma0",
                  sigma, conn.components);
    throw std::invalid_argument(buf);
  }

  std::set<int> in(keep.begin(), keep.end());
  double area = 0.0;
  Vec2 first_moment = Vec2::Zero();
  Vec2 grad_int = Vec2::Zero();
  for (const auto& q : volume_quadrature(mesh)) {
    if (!in.count(q.tri)) continue;
    area += q.w;
    first_moment += q.w * q.x;
    grad_int += q.w * field.gradient(q.tri, q.x);
  }
  return (first_moment - grad_int) / area;
}

IdentityReport pohozaev_report(const Field& field) {
  const Mesh& mesh = field.mesh();
  double lhs = 0.0;
  for (const auto& q : volume_quadrature(mesh)) {
    const double u = field.value(q.tri, q.x);
    const Vec2 g = field.gradient(q.tri, q.x);
    lhs += q.w * q.x.y() * (0.5 * g.squaredNorm() - u) * 2.0;
  }
  double rhs = 0.0;
  for (const auto& fs : normal_derivative_on(field, BoundaryTag::Sigma))
    rhs += 0.5 * fs.w * fs.u_nu * fs.u_nu * killing_field2(fs.x).dot(fs.normal);
  return make_report("pohozaev", lhs, rhs, mesh.h);
}

IdentityReport fundamental_report(const Field& field, double c) {
  const Mesh& mesh = field.mesh();
  const auto& hess = field.elem_hessian;
  double lhs = 0.0;
  for (const auto& q : volume_quadrature(mesh)) {
    const Eigen::Matrix2d& H = hess[q.tri];
    const double deficit = H.squaredNorm() - 0.5 * H.trace() * H.trace();
    lhs += q.w * q.x.y() * (-field.value(q.tri, q.x)) * deficit;
  }
  double rhs = 0.0;
  for (const auto& fs : normal_derivative_on(field, BoundaryTag::Sigma)) {
    const double bracket = fs.x.y() * fs.u_nu - killing_field2(fs.x).dot(fs.normal);
    rhs += 0.5 * fs.w * (fs.u_nu * fs.u_nu - c * c) * bracket;
  }
  char name[64];
  std::snprintf(name, sizeof(name), "fundamental(c=%.12g)", c);
  return make_report(name, lhs, rhs, mesh.h);
}

double deficit_norm(const Field& field, double R) {
  double s = 0.0;
  for (const auto& fs : normal_derivative_on(field, BoundaryTag::Sigma))
    s += fs.w * std::abs(fs.u_nu * fs.u_nu - R * R);
  return s;
}

HQuantities h_quantities(const Field& field, const Vec2& z, double diameter) {
  const auto samples = sigma_samples(field.mesh());
  const auto [rho_e, rho_i] = rho_extremes(samples, z);
  HQuantities out;
  out.rho_e = rho_e;
  out.rho_i = rho_i;
  out.gap = rho_e - rho_i;
  out.osc_h = 0.5 * (rho_e * rho_e - rho_i * rho_i);
  out.gap_bound_rhs = 8.0 / diameter * out.osc_h;
  out.gap_bound_ok = out.gap <= out.gap_bound_rhs + 1e-14;
  return out;
}

double weighted_hessian_norm(const Field& field, double tau, bool exact_distance) {
  const bool valid = std::abs(tau - 0.5) < 1e-12 || std::abs(tau - 1.0) < 1e-12 ||
                     std::abs(tau - 1.5) < 1e-12;
  if (!valid)
    throw std::invalid_argument("weighted_hessian_norm: tau must be 1/2, 1 or 3/2");
  const Mesh& mesh = field.mesh();
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  double s = 0.0;
  for (const auto& q : volume_quadrature(mesh)) {
    const double d = exact_distance ? exact_delta(mesh, q.x)
                                    : interp_delta(mesh, q.tri, q.x);
    const double w = std::pow(std::max(d, 0.0), 2.0 * tau);
    s += q.w * w * (I - field.elem_hessian[q.tri]).squaredNorm();
  }
  return std::sqrt(std::max(s, 0.0));
}

DistanceBoundReport distance_lower_bound_check(const Field& field,
                                               std::optional<double> r_i,
                                               double slack_constant) {
  const Mesh& mesh = field.mesh();
  DistanceBoundReport rep;
  rep.slack = slack_constant * mesh.h * mesh.h;
  rep.linear_checked = r_i.has_value();
  for (const auto& q : volume_quadrature(mesh)) {
    const double minus_u = -field.value(q.tri, q.x);
    const double d = interp_delta(mesh, q.tri, q.x);
    const double quad_rhs = 0.5 * d * d;
    if (minus_u < quad_rhs - rep.slack)
      rep.quadratic.push_back({q.x, minus_u, quad_rhs});
    if (r_i) {
      const double lin_rhs = 0.5 * (*r_i) * d;
      if (minus_u < lin_rhs - rep.slack) rep.linear.push_back({q.x, minus_u, lin_rhs});
    }
  }
  return rep;
}

GradientBoundReport grad_h_bound_check(const Field& field, const Vec2& z) {
  const Mesh& mesh = field.mesh();
  GradientBoundReport rep;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    for (int v = 0; v < 3; ++v) {
      const Vec2 x = mesh.vertices[mesh.triangles[t][v]];
      const double g = (x - z - field.gradient(static_cast<int>(t), x)).norm();
      rep.grad_h_inf = std::max(rep.grad_h_inf, g);
    }
  }
  rep.bound = 2.0 * (lipschitz_bound(field) + 1.0);
  rep.ok = rep.grad_h_inf <= rep.bound;
  return rep;
}

MeanValueReport mean_value_band_check(const Field& field, const Vec2& z,
                                      double slack_constant) {
  const Mesh& mesh = field.mesh();
  MeanValueReport rep;
  rep.slack = slack_constant * mesh.h * mesh.h;

  std::vector<char> on_boundary(mesh.vertices.size(), 0);
  for (const auto& be : mesh.boundary_edges) {
    on_boundary[be.a] = 1;
    on_boundary[be.b] = 1;
  }
  auto h_of = [&](const Vec2& x, int tri) {
    return 0.5 * (x - z).squaredNorm() - field.value(tri, x);
  };

  std::vector<std::vector<int>> incident(mesh.vertices.size());
  for (size_t t = 0; t < mesh.triangles.size(); ++t)
    for (int v : mesh.triangles[t]) incident[v].push_back(static_cast<int>(t));

  for (size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (on_boundary[v] || incident[v].empty()) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int t : incident[v]) {
      for (int e = 0; e < 3; ++e) {
        const int u = mesh.triangles[t][e];
        if (u == static_cast<int>(v)) continue;
        const double val = h_of(mesh.vertices[u], t);
        lo = std::min(lo, val);
        hi = std::max(hi, val);
      }
    }
    const double hv = h_of(mesh.vertices[v], incident[v][0]);
    const double excess = std::max(lo - hv, hv - hi);
    if (excess > rep.slack) {
      ++rep.violations;
      rep.max_excess = std::max(rep.max_excess, excess);
    }
  }
  return rep;
}

double kappa(int N, double tau) {
  if (N < 2) throw std::invalid_argument("kappa: requires N >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("kappa: requires tau > 0");
  return 1.0 / (tau + 0.5 * N - 1.0);
}

double alpha_pq(int N, double p, double q) {
  if (N < 2) throw std::invalid_argument("alpha_pq: requires N >= 2");
  if (!(p >= 1.0 && p <= N))
    throw std::invalid_argument("alpha_pq: requires 1 <= p <= N");
  if (!(q > p)) throw std::invalid_argument("alpha_pq: requires q > p");
  const double alpha = std::isinf(q) ? p / N : p * (q - N) / (N * (q - p));
  if (!(p * (1.0 - alpha) < N))
    throw std::invalid_argument("alpha_pq: violated p(1-alpha) < N");
  return alpha;
}

double domain_diameter(const Mesh& mesh) {
  std::vector<int> bverts;
  std::vector<char> seen(mesh.vertices.size(), 0);
  for (const auto& be : mesh.boundary_edges) {
    if (!seen[be.a]) bverts.push_back(be.a), seen[be.a] = 1;
    if (!seen[be.b]) bverts.push_back(be.b), seen[be.b] = 1;
  }
  double d = 0.0;
  for (size_t i = 0; i < bverts.size(); ++i)
    for (size_t j = i + 1; j < bverts.size(); ++j)
      d = std::max(d, (mesh.vertices[bverts[i]] - mesh.vertices[bverts[j]]).norm());
  return d;
}

double boundary_min_height(const Mesh& mesh) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& be : mesh.boundary_edges)
    m = std::min({m, mesh.vertices[be.a].y(), mesh.vertices[be.b].y()});
  return m;
}

bool SolveCertificate::all_pass() const {
  for (const auto& c : checks)
    if (c.applicable && !c.pass) return false;
  return true;
}

SolveCertificate make_certificate(const Field& field, const DomainSpec& spec,
                                  const CertificateOptions& opts) {
  const Mesh& mesh = field.mesh();
  SolveCertificate cert;
  cert.h = mesh.h;
  cert.R = compute_R(field);
  const ZResult zr = compute_z(field);
  cert.z = zr.z;
  cert.z_cross_check = zr.cross_check;
  cert.deficit = deficit_norm(field, cert.R);
  cert.L = lipschitz_bound(field);
  cert.m = boundary_min_height(mesh);
  cert.w_half = weighted_hessian_norm(field, 0.5);
  cert.w_one = weighted_hessian_norm(field, 1.0);
  cert.w_threehalf = weighted_hessian_norm(field, 1.5);
  cert.pohozaev = pohozaev_report(field);
  cert.fundamental = fundamental_report(field, cert.R);

  const double diam = domain_diameter(mesh);
  const HQuantities hq = h_quantities(field, cert.z, diam);
  cert.gap = hq.gap;
  cert.osc_h = hq.osc_h;

  auto add = [&](const std::string& name, bool applicable, bool pass, double lhs,
                 double rhs) {
    cert.checks.push_back({name, applicable, pass, lhs, rhs});
  };

  add("sign", true, field.sign_ok, field.max_nodal, 1e-8);

  const auto db = distance_lower_bound_check(field, spec.inner_radius,
                                             opts.distance_slack);
  add("distance_quadratic", true, db.quadratic.empty(),
      static_cast<double>(db.quadratic.size()), 0.0);
  add("distance_linear", db.linear_checked, db.linear.empty(),
      static_cast<double>(db.linear.size()), 0.0);

  const double L2 = cert.L + 2.0;
  add("hessian_weighted_cone", true,
      cert.w_threehalf * cert.w_threehalf <= L2 * cert.deficit,
      cert.w_threehalf * cert.w_threehalf, L2 * cert.deficit);
  add("hessian_weighted_pinned", cert.m > 0.0,
      cert.w_one * cert.w_one <= L2 / std::max(cert.m, 1e-300) * cert.deficit,
      cert.w_one * cert.w_one, L2 / std::max(cert.m, 1e-300) * cert.deficit);
  if (spec.inner_radius) {
    const double ri = *spec.inner_radius;
    add("hessian_weighted_sphere", true, cert.w_one * cert.w_one <= L2 / ri * cert.deficit,
        cert.w_one * cert.w_one, L2 / ri * cert.deficit);
    add("hessian_weighted_sphere_pinned", cert.m > 0.0,
        cert.w_half * cert.w_half <= L2 / (cert.m * ri) * cert.deficit,
        cert.w_half * cert.w_half, L2 / (cert.m * ri) * cert.deficit);
  } else {
    add("hessian_weighted_sphere", false, true, 0.0, 0.0);
    add("hessian_weighted_sphere_pinned", false, true, 0.0, 0.0);
  }

  const auto gb = grad_h_bound_check(field, cert.z);
  add("gradient_bound", true, gb.ok, gb.grad_h_inf, gb.bound);

  add("oscillation_gap", true, hq.gap_bound_ok, hq.gap, hq.gap_bound_rhs);

  double max_delta = 0.0;
  for (double d : mesh.delta) max_delta = std::max(max_delta, d);
  add("weighted_norm_monotone", max_delta <= 1.0,
      cert.w_half >= cert.w_one - 1e-12 && cert.w_one >= cert.w_threehalf - 1e-12,
      cert.w_half - cert.w_one, cert.w_one - cert.w_threehalf);

  const auto mv = mean_value_band_check(field, cert.z, opts.mean_value_slack);
  add("mean_value_band", true, mv.violations == 0,
      static_cast<double>(mv.violations), 0.0);

  return cert;
}

std::string to_json_string(const SolveCertificate& cert) {
  nlohmann::json j;
  j["h"] = cert.h;
  j["R"] = cert.R;
  j["z"] = {cert.z.x(), cert.z.y()};
  j["z_cross_check"] = cert.z_cross_check;
  j["deficit"] = cert.deficit;
  j["gap"] = cert.gap;
  j["osc_h"] = cert.osc_h;
  j["L"] = cert.L;
  j["m"] = cert.m;
  j["weighted_norms"] = {{"half", cert.w_half},
                         {"one", cert.w_one},
                         {"three_half", cert.w_threehalf}};
  auto report = [](const IdentityReport& r) {
    return nlohmann::json{{"name", r.name},     {"lhs", r.lhs},
                          {"rhs", r.rhs},       {"residual", r.residual},
                          {"scale", r.scale},   {"relative", r.relative},
                          {"h", r.h}};
  };
  j["pohozaev"] = report(cert.pohozaev);
  j["fundamental"] = report(cert.fundamental);
  j["checks"] = nlohmann::json::array();
  for (const auto& c : cert.checks)
    j["checks"].push_back({{"name", c.name},
                           {"applicable", c.applicable},
                           {"pass", c.pass},
                           {"lhs", c.lhs},
                           {"rhs", c.rhs}});
  j["all_pass"] = cert.all_pass();
  return j.dump(2);
}

}  // namespace lens
