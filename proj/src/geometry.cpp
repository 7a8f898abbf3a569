#include "lens/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lens/mesh.hpp"

namespace lens {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_to_pi(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double wrap_positive(double a) {
  while (a < 0.0) a += 2.0 * kPi;
  while (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

Vec2 unit(double phi) { return Vec2(std::cos(phi), std::sin(phi)); }

// min x_N over the Sigma curve: dense bracket plus golden-section polish.
double minimize_sigma_height(const DomainSpec& spec) {
  const int n = 4096;
  const double lo = spec.perturbation.window_lo;
  const double hi = spec.perturbation.window_hi;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= n; ++i) {
    const double phi = lo + (hi - lo) * i / n;
    const double y = spec.sigma_point(phi).y();
    if (y < best) {
      best = y;
      best_i = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best_i - 1) / n;
  double b = lo + (hi - lo) * std::min(n, best_i + 1) / n;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (spec.sigma_point(c).y() < spec.sigma_point(d).y()) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return std::min(best, spec.sigma_point(0.5 * (a + b)).y());
}

void validate_lens_samples(const DomainSpec& spec) {
  const int n = 2048;
  const double lo = spec.perturbation.window_lo;
  const double hi = spec.perturbation.window_hi;
  for (int i = 0; i <= n; ++i) {
    const double phi = lo + (hi - lo) * i / n;
    const Vec2 x = spec.sigma_point(phi);
    const bool endpoint = (i == 0 || i == n);
    if (endpoint) {
      if (std::abs(x.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("lens corner is not on the unit circle");
      continue;
    }
    if (x.y() <= 0.0)
      throw std::invalid_argument(
          "inadmissible lens: the cap curve leaves the upper half-plane");
    if (x.norm() >= 1.0)
      throw std::invalid_argument(
          "inadmissible lens: the cap curve leaves the unit disk");
  }
  // simple curve: the polar radius must stay positive
  for (int i = 0; i <= n; ++i) {
    const double phi = lo + (hi - lo) * i / n;
    if (spec.sigma_radius(phi) <= 0.0)
      throw std::invalid_argument("inadmissible perturbation: radius vanished");
  }
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

std::string to_string(BoundaryTag tag) {
  return tag == BoundaryTag::Sigma ? "SIGMA" : "T_ARC";
}

double PerturbationProfile::g(double phi) const {
  if (shape == "none") return 0.0;
  if (shape == "hann") {
    if (phi <= window_lo || phi >= window_hi) return 0.0;
    const double s = (phi - window_lo) / (window_hi - window_lo);
    const double t = std::sin(kPi * s);
    return t * t;
  }
  throw std::invalid_argument("unknown perturbation shape: " + shape);
}

double PerturbationProfile::dg(double phi) const {
  if (shape == "none") return 0.0;
  if (shape == "hann") {
    if (phi <= window_lo || phi >= window_hi) return 0.0;
    const double w = window_hi - window_lo;
    const double s = (phi - window_lo) / w;
    return 2.0 * std::sin(kPi * s) * std::cos(kPi * s) * kPi / w;
  }
  throw std::invalid_argument("unknown perturbation shape: " + shape);
}

PerturbationProfile hann_bump() {
  PerturbationProfile p;
  p.shape = "hann";
  return p;
}

double DomainSpec::sigma_radius(double phi) const {
  return cap_radius * (1.0 + perturbation.amplitude * perturbation.g(phi));
}

double DomainSpec::sigma_radius_prime(double phi) const {
  return cap_radius * perturbation.amplitude * perturbation.dg(phi);
}

Vec2 DomainSpec::sigma_point(double phi) const {
  if (dimension != 2)
    throw std::invalid_argument("sigma_point: planar parameterization only");
  return Vec2(cap_center[0], cap_center[1]) + sigma_radius(phi) * unit(phi);
}

Vec2 DomainSpec::corner(int which) const {
  const double phi = which == 0 ? perturbation.window_lo : perturbation.window_hi;
  // corners sit exactly where the cap circle meets the unit circle; snap
  // the radial roundoff so downstream checks see |x| = 1 to full precision
  Vec2 x = Vec2(cap_center[0], cap_center[1]) + cap_radius * unit(phi);
  return x / x.norm();
}

double DomainSpec::tarc_angle(int which) const {
  const Vec2 c = corner(which);
  return std::atan2(c.y(), c.x());
}

DomainSpec make_symmetric_cap(int N, double R, const Eigen::VectorXd& azimuth) {
  if (N < 2) throw std::invalid_argument("dimension must be at least 2");
  if (!(R > 0.0)) throw std::invalid_argument("cap radius must be positive");
  if (azimuth.size() != N - 1)
    throw std::invalid_argument("azimuth must have N-1 components");
  const double norm2 = azimuth.squaredNorm();
  if (norm2 > 1.0 + 1e-14)
    throw std::invalid_argument(
        "cap does not meet the upper hemisphere: |z'| must be <= 1");

  DomainSpec spec;
  spec.dimension = N;
  spec.cap_radius = R;
  spec.cap_center.resize(N);
  spec.cap_center.head(N - 1) = azimuth;
  spec.cap_center[N - 1] = std::sqrt(1.0 + R * R - norm2);

  if (N == 2) {
    const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
    const double d = z.norm();
    const double gamma = std::acos(1.0 / d);  // corner half-aperture on the unit circle
    const double argz = std::atan2(z.y(), z.x());
    const double psi = std::atan2(-z.y(), -z.x());  // direction from z toward the origin
    const Vec2 ca(std::cos(argz + gamma), std::sin(argz + gamma));
    const Vec2 cb(std::cos(argz - gamma), std::sin(argz - gamma));
    const double pa = psi + wrap_to_pi(std::atan2((ca - z).y(), (ca - z).x()) - psi);
    const double pb = psi + wrap_to_pi(std::atan2((cb - z).y(), (cb - z).x()) - psi);
    spec.perturbation.window_lo = std::min(pa, pb);
    spec.perturbation.window_hi = std::max(pa, pb);
    validate_lens_samples(spec);
    spec.min_height = minimize_sigma_height(spec);
    // interior ball radius, from the two boundary curvatures
    spec.inner_radius = std::min(R, 1.0);
    // conservative cone parameters, wide enough margin that the discrete
    // parallel-set boundary keeps the half-height condition; certify per
    // instance with cone_condition_check
    spec.cone_theta = kPi / 12.0;
    spec.cone_a = 0.12;
  } else {
    if (spec.cap_center[N - 1] <= 1.0 / spec.cap_center.norm())
      throw std::invalid_argument("cap does not cut a lens in the upper half-ball");
    spec.min_height = spec.cap_center[N - 1] - R;  // axisymmetric caps only
    if (spec.min_height < 0.0) spec.min_height = 0.0;
    spec.inner_radius = std::min(R, 1.0);
  }
  return spec;
}

DomainSpec make_symmetric_cap(int N, double R) {
  return make_symmetric_cap(N, R, Eigen::VectorXd::Zero(N - 1));
}

DomainSpec make_perturbed_domain(const DomainSpec& base, double eps,
                                 const PerturbationProfile& shape) {
  if (base.dimension != 2)
    throw std::invalid_argument("perturbed domains are planar only");
  if (!base.is_symmetric())
    throw std::invalid_argument("base domain must be an unperturbed cap");

  DomainSpec spec = base;
  spec.perturbation.amplitude = eps;
  spec.perturbation.shape = eps == 0.0 ? "none" : shape.shape;
  // window endpoints are fixed by the base corners
  validate_lens_samples(spec);
  spec.min_height = minimize_sigma_height(spec);
  if (eps != 0.0) spec.inner_radius.reset();
  return spec;
}

double BoundaryPolyline::total_length() const {
  double s = 0.0;
  for (const auto& seg : segments) s += seg.length;
  return s;
}

double BoundaryPolyline::tagged_length(BoundaryTag tag) const {
  double s = 0.0;
  for (const auto& seg : segments)
    if (seg.tag == tag) s += seg.length;
  return s;
}

double BoundaryPolyline::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, (vertices[i] - vertices[j]).norm());
  return d;
}

BoundaryPolyline boundary_polyline(const DomainSpec& spec, int n) {
  if (spec.dimension != 2)
    throw std::invalid_argument("boundary_polyline: planar domains only");
  if (n < 16) throw std::invalid_argument("boundary_polyline: need n >= 16");

  const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
  const double lo = spec.perturbation.window_lo;
  const double hi = spec.perturbation.window_hi;

  // cumulative arc length of Sigma for (approximately) uniform spacing
  const int table = 4096;
  std::vector<double> cum(table + 1, 0.0);
  for (int i = 1; i <= table; ++i) {
    const double phi = lo + (hi - lo) * (i - 0.5) / table;
    const double r = spec.sigma_radius(phi);
    const double rp = spec.sigma_radius_prime(phi);
    cum[i] = cum[i - 1] + std::hypot(r, rp) * (hi - lo) / table;
  }
  const double len_sigma = cum.back();

  const double ta = spec.tarc_angle(0);
  const double tb = spec.tarc_angle(1);
  const double arc = wrap_positive(ta - tb);  // T runs ccw from corner(1) to corner(0)
  const double len_t = arc;

  int n_sigma = std::max(8, static_cast<int>(std::lround(n * len_sigma / (len_sigma + len_t))));
  int n_t = std::max(8, n - n_sigma);

  BoundaryPolyline poly;
  poly.vertices.reserve(n_sigma + n_t);

  auto phi_at_arclength = [&](double s) {
    const auto it = std::lower_bound(cum.begin(), cum.end(), s);
    int i = std::clamp(static_cast<int>(it - cum.begin()), 1, table);
    const double t = (s - cum[i - 1]) / std::max(cum[i] - cum[i - 1], 1e-300);
    return lo + (hi - lo) * (i - 1 + t) / table;
  };

  // Sigma from corner(0) to corner(1); corners snapped onto the unit circle
  poly.vertices.push_back(spec.corner(0));
  for (int i = 1; i < n_sigma; ++i)
    poly.vertices.push_back(spec.sigma_point(phi_at_arclength(len_sigma * i / n_sigma)));
  const int corner1 = static_cast<int>(poly.vertices.size());
  poly.vertices.push_back(spec.corner(1));
  for (int i = 1; i < n_t; ++i) {
    const double t = tb + arc * i / n_t;
    poly.vertices.push_back(unit(t));
  }

  const int m = static_cast<int>(poly.vertices.size());
  poly.segments.resize(m);
  for (int i = 0; i < m; ++i) {
    auto& seg = poly.segments[i];
    seg.a = i;
    seg.b = (i + 1) % m;
    seg.tag = (i < corner1) ? BoundaryTag::Sigma : BoundaryTag::TArc;
    const Vec2 d = poly.vertices[seg.b] - poly.vertices[seg.a];
    seg.length = d.norm();
    seg.normal = Vec2(d.y(), -d.x()) / seg.length;  // outward for ccw orientation
  }
  poly.lambda = {0, corner1};
  return poly;
}

BoundaryPolyline polygon_polyline(const std::vector<Vec2>& vertices, BoundaryTag tag) {
  if (vertices.size() < 3)
    throw std::invalid_argument("polygon needs at least 3 vertices");
  BoundaryPolyline poly;
  poly.vertices = vertices;
  const int m = static_cast<int>(vertices.size());
  poly.segments.resize(m);
  for (int i = 0; i < m; ++i) {
    auto& seg = poly.segments[i];
    seg.a = i;
    seg.b = (i + 1) % m;
    seg.tag = tag;
    const Vec2 d = vertices[seg.b] - vertices[seg.a];
    seg.length = d.norm();
    if (seg.length <= 0.0) throw std::invalid_argument("degenerate polygon edge");
    seg.normal = Vec2(d.y(), -d.x()) / seg.length;
  }
  return poly;
}

bool point_in_polygon(const BoundaryPolyline& poly, const Vec2& x) {
  // crossing test; points on the boundary count as inside
  bool inside = false;
  const auto& v = poly.vertices;
  const int n = static_cast<int>(v.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    if (segment_distance(x, v[j], v[i]) < 1e-13) return true;
    const bool straddles = (v[i].y() > x.y()) != (v[j].y() > x.y());
    if (straddles) {
      const double xc =
          v[j].x() + (v[i].x() - v[j].x()) * (x.y() - v[j].y()) / (v[i].y() - v[j].y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

DistanceResult distance_to_boundary(const BoundaryPolyline& poly, const Vec2& x) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& seg : poly.segments)
    d = std::min(d, segment_distance(x, poly.vertices[seg.a], poly.vertices[seg.b]));
  return {d, point_in_polygon(poly, x)};
}

std::pair<double, double> rho_extremes(std::span<const Vec2> sigma_samples,
                                       const Vec2& z) {
  if (sigma_samples.empty())
    throw std::invalid_argument("rho_extremes: empty sample set");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const Vec2& x : sigma_samples) {
    const double r = (x - z).norm();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {hi, lo};
}

double min_height(const BoundaryPolyline& poly) {
  double m = std::numeric_limits<double>::infinity();
  for (const Vec2& x : poly.vertices) m = std::min(m, x.y());
  return m;
}

double sigma0(double theta, double a, double delta0) {
  if (!(theta > 0.0 && theta <= kPi / 2.0))
    throw std::invalid_argument("sigma0: theta must lie in (0, pi/2]");
  if (!(a > 0.0) || !(delta0 > 0.0))
    throw std::invalid_argument("sigma0: a and delta0 must be positive");
  return std::min(0.5 * a * std::sin(theta) / (1.0 + std::sin(theta)), delta0);
}

double john_constant_bound(double theta, double a, double d_omega, double delta0) {
  if (!(theta > 0.0 && theta <= kPi / 2.0))
    throw std::invalid_argument("john_constant_bound: theta must lie in (0, pi/2]");
  if (!(a > 0.0) || !(d_omega > 0.0) || !(delta0 > 0.0))
    throw std::invalid_argument("john_constant_bound: parameters must be positive");
  const double s = std::sin(theta);
  const double reach = std::min(0.5 * a * s / (1.0 + s), delta0);
  return std::max(1.0 / s, d_omega / reach);
}

namespace {

struct ConeSampler {
  const BoundaryPolyline& poly;
  double theta, a;
  const ConeCheckConfig& cfg;

  // all sampled cone points from apex w along axis omega inside the domain?
  std::optional<Vec2> escaped(const Vec2& w, double omega) const {
    for (int k = 1; k <= cfg.cone_radial; ++k) {
      const double rho = a * k / cfg.cone_radial;
      for (int j = 0; j < cfg.cone_angular; ++j) {
        const double psi =
            omega - theta + 2.0 * theta * (j + 0.5) / cfg.cone_angular;
        const Vec2 y = w + rho * unit(psi);
        if (!point_in_polygon(poly, y)) return y;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

ConeCheckResult cone_condition_check(const BoundaryPolyline& poly, double theta,
                                     double a, const ConeCheckConfig& cfg) {
  if (!(theta > 0.0 && theta <= kPi / 2.0) || !(a > 0.0))
    throw std::invalid_argument("cone_condition_check: invalid cone parameters");

  ConeSampler sampler{poly, theta, a, cfg};
  ConeCheckResult result;
  result.pass = true;

  for (size_t vi = 0; vi < poly.vertices.size(); ++vi) {
    const Vec2 x = poly.vertices[vi];

    // inward direction estimate to order the axis candidates
    const auto& prev = poly.segments[(vi + poly.segments.size() - 1) % poly.segments.size()];
    const auto& next = poly.segments[vi];
    Vec2 inward = -(prev.normal + next.normal);
    if (inward.norm() < 1e-12) inward = Vec2(-prev.normal.y(), prev.normal.x());
    const double base = std::atan2(inward.y(), inward.x());

    // translates of the cone apex inside B_a(x) (x itself first)
    std::vector<Vec2> apexes = {x};
    for (int r = 1; r <= cfg.apex_rings; ++r) {
      const double rad = a * r / (cfg.apex_rings + 0.5);
      for (int j = 0; j < cfg.apex_samples; ++j) {
        const Vec2 w = x + rad * unit(2.0 * kPi * j / cfg.apex_samples);
        if (point_in_polygon(poly, w)) apexes.push_back(w);
      }
    }

    bool found = false;
    ConeWitness last_witness;
    for (int d = 0; d < cfg.directions && !found; ++d) {
      // alternate around the inward direction: 0, +1, -1, +2, ...
      const int off = (d + 1) / 2 * ((d % 2) ? 1 : -1);
      const double omega = base + 2.0 * kPi * off / cfg.directions;
      bool ok = true;
      for (const Vec2& w : apexes) {
        if (auto esc = sampler.escaped(w, omega)) {
          ok = false;
          last_witness = {x, w, *esc};
          break;
        }
      }
      found = ok;
    }
    if (!found) {
      result.pass = false;
      result.witness = last_witness;
      return result;
    }
  }
  return result;
}

std::vector<int> parallel_set_elements(const Mesh& mesh, double sigma) {
  std::vector<int> keep;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double d =
        (mesh.delta[tri[0]] + mesh.delta[tri[1]] + mesh.delta[tri[2]]) / 3.0;
    if (d > sigma) keep.push_back(static_cast<int>(t));
  }
  return keep;
}

namespace {

// connected components over shared edges, restricted to `keep`
int component_count(const Mesh& mesh, const std::vector<int>& keep) {
  if (keep.empty()) return 0;
  std::vector<int> id(mesh.triangles.size(), -1);
  for (size_t i = 0; i < keep.size(); ++i) id[keep[i]] = static_cast<int>(i);

  std::vector<int> parent(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::map<std::pair<int, int>, int> edge_owner;
  for (int t : keep) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      int u = tri[e], v = tri[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      auto [it, inserted] = edge_owner.try_emplace({u, v}, t);
      if (!inserted) {
        const int a = find(id[it->second]);
        const int b = find(id[t]);
        if (a != b) parent[a] = b;
      }
    }
  }
  int comps = 0;
  for (size_t i = 0; i < keep.size(); ++i)
    if (find(static_cast<int>(i)) == static_cast<int>(i)) ++comps;
  return comps;
}

}  // namespace

ParallelSetResult parallel_set_connected(const Mesh& mesh, double sigma) {
  const auto keep = parallel_set_elements(mesh, sigma);
  ParallelSetResult res;
  res.element_count = static_cast<int>(keep.size());
  res.components = component_count(mesh, keep);
  res.connected = res.components == 1;
  return res;
}

BoundaryPolyline parallel_set_boundary(const Mesh& mesh, double sigma) {
  const auto keep = parallel_set_elements(mesh, sigma);
  if (keep.empty())
    throw std::invalid_argument("parallel set is empty at this sigma");

  // boundary = edges owned by exactly one kept triangle, oriented ccw
  std::map<std::pair<int, int>, int> count;
  for (int t : keep) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      int u = tri[e], v = tri[(e + 1) % 3];
      if (u > v) std::swap(u, v);
      ++count[{u, v}];
    }
  }
  std::map<int, int> next_vertex;
  for (int t : keep) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int u = tri[e], v = tri[(e + 1) % 3];
      if (count[{std::min(u, v), std::max(u, v)}] == 1) next_vertex[u] = v;
    }
  }
  if (next_vertex.empty())
    throw std::runtime_error("parallel set has no boundary loop");

  std::vector<Vec2> loop;
  const int start = next_vertex.begin()->first;
  int cur = start;
  do {
    loop.push_back(mesh.vertices[cur]);
    auto it = next_vertex.find(cur);
    if (it == next_vertex.end())
      throw std::runtime_error("parallel set boundary is not a closed loop");
    cur = it->second;
  } while (cur != start && loop.size() <= next_vertex.size() + 1);
  if (loop.size() != next_vertex.size())
    throw std::runtime_error(
        "parallel set boundary has several loops; the set is not connected");
  return polygon_polyline(loop);
}

std::string to_json_string(const DomainSpec& spec) {
  nlohmann::json j;
  j["dimension"] = spec.dimension;
  j["cap_radius"] = spec.cap_radius;
  j["cap_center"] = std::vector<double>(spec.cap_center.data(),
                                        spec.cap_center.data() + spec.cap_center.size());
  j["perturbation"] = {{"amplitude", spec.perturbation.amplitude},
                       {"shape", spec.perturbation.shape},
                       {"window", {spec.perturbation.window_lo, spec.perturbation.window_hi}}};
  j["cone_theta"] = spec.cone_theta;
  j["cone_a"] = spec.cone_a;
  if (spec.inner_radius)
    j["inner_radius"] = *spec.inner_radius;
  else
    j["inner_radius"] = nullptr;
  return j.dump(2);
}

DomainSpec domain_spec_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int N = j.at("dimension").get<int>();
  const double R = j.at("cap_radius").get<double>();
  const auto center = j.at("cap_center").get<std::vector<double>>();
  if (static_cast<int>(center.size()) != N)
    throw std::invalid_argument("cap_center size does not match dimension");
  Eigen::VectorXd azimuth(N - 1);
  for (int i = 0; i < N - 1; ++i) azimuth[i] = center[i];

  DomainSpec spec = make_symmetric_cap(N, R, azimuth);
  if (j.contains("perturbation")) {
    const auto& p = j.at("perturbation");
    PerturbationProfile prof;
    prof.shape = p.at("shape").get<std::string>();
    const double eps = p.at("amplitude").get<double>();
    if (eps != 0.0 && prof.shape != "none")
      spec = make_perturbed_domain(spec, eps, prof);
  }
  if (j.contains("cone_theta")) spec.cone_theta = j.at("cone_theta").get<double>();
  if (j.contains("cone_a")) spec.cone_a = j.at("cone_a").get<double>();
  if (j.contains("inner_radius") && !j.at("inner_radius").is_null())
    spec.inner_radius = j.at("inner_radius").get<double>();
  return spec;
}

void write_polyline_csv(const BoundaryPolyline& poly, std::ostream& os) {
  os << "x1,x2,tag\n";
  char buf[128];
  for (const auto& seg : poly.segments) {
    const Vec2& v = poly.vertices[seg.a];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s\n", v.x(), v.y(),
                  to_string(seg.tag).c_str());
    os << buf;
  }
}

}  // namespace lens
