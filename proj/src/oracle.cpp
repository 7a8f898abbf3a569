#include "lens/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lens/quadrature.hpp"

namespace lens {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_positive(double a) {
  while (a < 0.0) a += 2.0 * kPi;
  while (a >= 2.0 * kPi) a -= 2.0 * kPi;
  return a;
}

// entry distance from z to the unit circle along direction omega
double sphere_entry(double z_dot_omega, double z_norm2) {
  const double disc = z_dot_omega * z_dot_omega - (z_norm2 - 1.0);
  if (disc < 0.0) throw std::runtime_error("ray misses the unit sphere");
  return -z_dot_omega - std::sqrt(disc);
}

struct Nested2D {
  const DomainSpec& spec;
  Vec2 z;
  double tol;
  mutable double inner_error = 0.0;

  double volume(const std::function<double(const Vec2&)>& f, double* err) const {
    const double lo = spec.perturbation.window_lo;
    const double hi = spec.perturbation.window_hi;
    const double inner_tol = tol / (8.0 * (hi - lo));
    inner_error = 0.0;
    auto outer = [&](double phi) {
      const Vec2 omega(std::cos(phi), std::sin(phi));
      const double t0 = sphere_entry(z.dot(omega), z.squaredNorm());
      const double t1 = spec.sigma_radius(phi);
      if (t1 <= t0) return 0.0;
      auto radial = [&](double r) { return f(z + r * omega) * r; };
      const auto q = integrate_adaptive(radial, t0, t1, inner_tol);
      inner_error = std::max(inner_error, q.error_estimate);
      return q.value;
    };
    const auto q = integrate_adaptive(outer, lo, hi, tol / 4.0);
    if (err) *err = q.error_estimate + inner_error * (hi - lo);
    return q.value;
  }

  double sigma(const std::function<double(const Vec2&)>& f, double* err) const {
    const double lo = spec.perturbation.window_lo;
    const double hi = spec.perturbation.window_hi;
    auto g = [&](double phi) {
      const double r = spec.sigma_radius(phi);
      const double rp = spec.sigma_radius_prime(phi);
      return f(spec.sigma_point(phi)) * std::hypot(r, rp);
    };
    const auto q = integrate_adaptive(g, lo, hi, tol / 4.0);
    if (err) *err = q.error_estimate;
    return q.value;
  }

  double tarc(const std::function<double(const Vec2&)>& f, double* err) const {
    const double tb = spec.tarc_angle(1);
    const double arc = wrap_positive(spec.tarc_angle(0) - tb);
    auto g = [&](double t) { return f(Vec2(std::cos(tb + t), std::sin(tb + t))); };
    const auto q = integrate_adaptive(g, 0.0, arc, tol / 4.0);
    if (err) *err = q.error_estimate;
    return q.value;
  }
};

// Axisymmetric reduction for N = 3: meridian coordinates (s, t) with s the
// distance to the axis and t = x_3; all integrands are evaluated at the
// meridian point (s, 0, t).
struct Meridian3D {
  double R;
  double zn;    // cap center height
  double tol;
  mutable double inner_error = 0.0;

  double phi_corner() const { return std::acos((zn - 1.0 / zn) / R); }

  Eigen::Vector3d embed(double s, double t) const { return {s, 0.0, t}; }

  double volume(const std::function<double(const Eigen::Vector3d&)>& f,
                double* err) const {
    const double phic = phi_corner();
    const double inner_tol = tol / (8.0 * phic);
    inner_error = 0.0;
    auto outer = [&](double phi) {
      const double cphi = std::cos(phi), sphi = std::sin(phi);
      const double t0 = zn * cphi - std::sqrt(zn * zn * cphi * cphi - zn * zn + 1.0);
      if (R <= t0) return 0.0;
      auto radial = [&](double r) {
        const double s = r * sphi;
        return f(embed(s, zn - r * cphi)) * s * r;
      };
      const auto q = integrate_adaptive(radial, t0, R, inner_tol);
      inner_error = std::max(inner_error, q.error_estimate);
      return q.value;
    };
    const auto q = integrate_adaptive(outer, 0.0, phic, tol / 4.0);
    if (err) *err = 2.0 * kPi * (q.error_estimate + inner_error * phic);
    return 2.0 * kPi * q.value;
  }

  double sigma(const std::function<double(const Eigen::Vector3d&)>& f,
               double* err) const {
    const double phic = phi_corner();
    auto g = [&](double phi) {
      const double s = R * std::sin(phi);
      return f(embed(s, zn - R * std::cos(phi))) * std::sin(phi);
    };
    const auto q = integrate_adaptive(g, 0.0, phic, tol / 4.0);
    if (err) *err = 2.0 * kPi * R * R * q.error_estimate;
    return 2.0 * kPi * R * R * q.value;
  }
};

}  // namespace

double ExactSolution::value(const Eigen::VectorXd& x) const {
  return 0.5 * ((x - center).squaredNorm() - radius * radius);
}

Eigen::VectorXd ExactSolution::gradient(const Eigen::VectorXd& x) const {
  return x - center;
}

double ExactSolution::value2(const Vec2& x) const {
  Eigen::VectorXd v(2);
  v << x.x(), x.y();
  return value(v);
}

Vec2 ExactSolution::gradient2(const Vec2& x) const {
  return Vec2(x.x() - center[0], x.y() - center[1]);
}

ExactSolution exact_solution(int N, double R, const Eigen::VectorXd& azimuth) {
  const DomainSpec spec = make_symmetric_cap(N, R, azimuth);  // admissibility
  ExactSolution sol;
  sol.dimension = N;
  sol.radius = R;
  sol.center = spec.cap_center;

  std::mt19937 rng(20240615u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd dir(N);
    for (int i = 0; i < N; ++i) dir[i] = gauss(rng);
    dir.normalize();

    // u vanishes on the cap sphere
    const Eigen::VectorXd on_cap = sol.center + R * dir;
    if (std::abs(sol.value(on_cap)) > 1e-12)
      throw std::runtime_error("exact solution does not vanish on the cap sphere");

    // Steklov identity u_nu = u on the unit sphere (any point of it)
    const Eigen::VectorXd on_sphere = dir;
    const double unu = sol.gradient(on_sphere).dot(on_sphere);
    if (std::abs(unu - sol.value(on_sphere)) > 1e-12)
      throw std::runtime_error("exact solution violates the Steklov condition");

    // Laplacian check by second differences, exact for a quadratic
    Eigen::VectorXd p(N);
    for (int i = 0; i < N; ++i) p[i] = 2.0 * gauss(rng);
    const double h = 0.5;
    double lap = 0.0;
    for (int i = 0; i < N; ++i) {
      Eigen::VectorXd hi = p, lo2 = p;
      hi[i] += h;
      lo2[i] -= h;
      lap += (sol.value(hi) - 2.0 * sol.value(p) + sol.value(lo2)) / (h * h);
    }
    if (std::abs(lap - N) > 1e-12)
      throw std::runtime_error("exact solution Laplacian is not the dimension");
  }
  return sol;
}

Eigen::VectorXd killing_field(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd v = x[n - 1] * x;
  v[n - 1] -= 0.5 * (x.squaredNorm() + 1.0);
  return v;
}

Vec2 killing_field2(const Vec2& x) {
  Vec2 v = x.y() * x;
  v.y() -= 0.5 * (x.squaredNorm() + 1.0);
  return v;
}

std::vector<OracleReport> oracle_identity_report(int N, double R,
                                                 const Eigen::VectorXd& azimuth,
                                                 double tol) {
  if (N != 2 && N != 3)
    throw std::invalid_argument("oracle identities cover N = 2 and N = 3 only");
  if (N == 3 && azimuth.norm() > 0.0)
    throw std::invalid_argument("N = 3 oracle requires an axisymmetric cap");

  const ExactSolution sol = exact_solution(N, R, azimuth);
  std::vector<OracleReport> reports;

  auto finish = [&](const std::string& name, double lhs, double rhs, double err) {
    reports.push_back({name, lhs, rhs, std::abs(lhs - rhs), err});
  };

  if (N == 2) {
    const DomainSpec spec = make_symmetric_cap(N, R, azimuth);
    const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
    Nested2D quad{spec, z, tol};

    auto u = [&](const Vec2& x) { return sol.value2(x); };
    auto grad = [&](const Vec2& x) { return sol.gradient2(x); };
    auto nu_sigma = [&](const Vec2& x) { return ((x - z) / R).eval(); };

    double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    const double lhs_poh =
        N * quad.volume(
                [&](const Vec2& x) {
                  return x.y() * (0.5 * grad(x).squaredNorm() - u(x));
                },
                &e1);
    const double rhs_poh =
        0.5 * quad.sigma(
                  [&](const Vec2& x) {
                    const double unu = grad(x).dot(nu_sigma(x));
                    return unu * unu * killing_field2(x).dot(nu_sigma(x));
                  },
                  &e2);
    finish("pohozaev", lhs_poh, rhs_poh, e1 + e2);

    const double lhs_fund = quad.volume(
        [&](const Vec2& x) {
          // Hessian of the quadratic is the identity: the deficit vanishes
          const double deficit = 2.0 - (2.0 * 2.0) / N;
          return x.y() * (-u(x)) * deficit;
        },
        &e1);
    const double rhs_fund =
        0.5 * quad.sigma(
                  [&](const Vec2& x) {
                    const Vec2 nu = nu_sigma(x);
                    const double unu = grad(x).dot(nu);
                    return (unu * unu - R * R) *
                           (x.y() * unu - killing_field2(x).dot(nu));
                  },
                  &e2);
    finish("fundamental", lhs_fund, rhs_fund, e1 + e2);

    const double vol_moment =
        quad.volume([&](const Vec2& x) { return x.y(); }, &e3);
    const double sigma_moment =
        quad.sigma([&](const Vec2& x) { return x.y(); }, &e4);
    const double r_est = N * vol_moment / sigma_moment;
    finish("r_formula", r_est, R, (N * e3 + std::abs(r_est) * e4) / sigma_moment);
  } else {
    const double zn = std::sqrt(1.0 + R * R);
    Meridian3D quad{R, zn, tol};
    Eigen::VectorXd z(3);
    z << 0, 0, zn;

    auto u = [&](const Eigen::Vector3d& x) {
      return 0.5 * ((x - z).squaredNorm() - R * R);
    };
    auto grad = [&](const Eigen::Vector3d& x) { return (x - z).eval(); };
    auto nu_sigma = [&](const Eigen::Vector3d& x) { return ((x - z) / R).eval(); };
    auto xq = [&](const Eigen::Vector3d& x) {
      Eigen::Vector3d v = x[2] * x;
      v[2] -= 0.5 * (x.squaredNorm() + 1.0);
      return v;
    };

    double e1 = 0, e2 = 0, e3 = 0, e4 = 0;
    const double lhs_poh =
        N * quad.volume(
                [&](const Eigen::Vector3d& x) {
                  return x[2] * (0.5 * grad(x).squaredNorm() - u(x));
                },
                &e1);
    const double rhs_poh =
        0.5 * quad.sigma(
                  [&](const Eigen::Vector3d& x) {
                    const double unu = grad(x).dot(nu_sigma(x));
                    return unu * unu * xq(x).dot(nu_sigma(x));
                  },
                  &e2);
    finish("pohozaev", lhs_poh, rhs_poh, e1 + e2);

    const double lhs_fund = quad.volume(
        [&](const Eigen::Vector3d& x) {
          const double deficit = 3.0 - (3.0 * 3.0) / N;
          return x[2] * (-u(x)) * deficit;
        },
        &e1);
    const double rhs_fund =
        0.5 * quad.sigma(
                  [&](const Eigen::Vector3d& x) {
                    const auto nu = nu_sigma(x);
                    const double unu = grad(x).dot(nu);
                    return (unu * unu - R * R) * (x[2] * unu - xq(x).dot(nu));
                  },
                  &e2);
    finish("fundamental", lhs_fund, rhs_fund, e1 + e2);

    const double vol_moment =
        quad.volume([&](const Eigen::Vector3d& x) { return x[2]; }, &e3);
    const double sigma_moment =
        quad.sigma([&](const Eigen::Vector3d& x) { return x[2]; }, &e4);
    const double r_est = N * vol_moment / sigma_moment;
    finish("r_formula", r_est, R, (N * e3 + std::abs(r_est) * e4) / sigma_moment);
  }
  return reports;
}

double lens_volume_integral(const DomainSpec& spec,
                            const std::function<double(const Vec2&)>& f, double tol) {
  if (spec.dimension != 2)
    throw std::invalid_argument("lens integrals are planar only");
  const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
  Nested2D quad{spec, z, tol};
  return quad.volume(f, nullptr);
}

double lens_sigma_integral(const DomainSpec& spec,
                           const std::function<double(const Vec2&)>& f, double tol) {
  if (spec.dimension != 2)
    throw std::invalid_argument("lens integrals are planar only");
  const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
  Nested2D quad{spec, z, tol};
  return quad.sigma(f, nullptr);
}

double lens_tarc_integral(const DomainSpec& spec,
                          const std::function<double(const Vec2&)>& f, double tol) {
  if (spec.dimension != 2)
    throw std::invalid_argument("lens integrals are planar only");
  const Vec2 z(spec.cap_center[0], spec.cap_center[1]);
  Nested2D quad{spec, z, tol};
  return quad.tarc(f, nullptr);
}

double lens_area(const DomainSpec& spec, double tol) {
  return lens_volume_integral(spec, [](const Vec2&) { return 1.0; }, tol);
}

double lens_r_formula(const DomainSpec& spec, double tol) {
  const double vol = lens_volume_integral(
      spec, [](const Vec2& x) { return x.y(); }, tol);
  const double surf = lens_sigma_integral(
      spec, [](const Vec2& x) { return x.y(); }, tol);
  return spec.dimension * vol / surf;
}

std::string to_json_string(const std::vector<OracleReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports)
    arr.push_back({{"identity", r.identity},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"residual", r.residual},
                   {"quad_error_estimate", r.quad_error_estimate}});
  return arr.dump(2);
}

}  // namespace lens
