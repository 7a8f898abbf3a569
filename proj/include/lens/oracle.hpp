#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "lens/geometry.hpp"

namespace lens {

// Closed-form solution on the symmetric lens: u = (|x-z|^2 - R^2) / 2,
// gradient x - z, Hessian the identity.
struct ExactSolution {
  int dimension = 2;
  double radius = 1.0;
  Eigen::VectorXd center;

  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  double value2(const Vec2& x) const;
  Vec2 gradient2(const Vec2& x) const;
};

// Certifies the defining identities at 1000 sample points to 1e-12.
ExactSolution exact_solution(int N, double R, const Eigen::VectorXd& azimuth);

// Conformal Killing-type field x_N x - (|x|^2 + 1)/2 e_N; tangent to the
// unit sphere, divergence N x_N.
Eigen::VectorXd killing_field(const Eigen::VectorXd& x);
Vec2 killing_field2(const Vec2& x);

struct OracleReport {
  std::string identity;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double quad_error_estimate = 0.0;
};

// Mesh-free verification of the Pohozaev identity, the fundamental identity
// at c = R, and the volume/surface formula for R, all by nested adaptive
// quadrature in polar coordinates around the cap center. N = 3 requires an
// axisymmetric cap (azimuth zero) so integrals reduce to the meridian plane.
std::vector<OracleReport> oracle_identity_report(int N, double R,
                                                 const Eigen::VectorXd& azimuth,
                                                 double tol = 1e-9);

// Mesh-free integrals over planar (possibly perturbed) lens domains.
double lens_volume_integral(const DomainSpec& spec,
                            const std::function<double(const Vec2&)>& f, double tol);
double lens_sigma_integral(const DomainSpec& spec,
                           const std::function<double(const Vec2&)>& f, double tol);
double lens_tarc_integral(const DomainSpec& spec,
                          const std::function<double(const Vec2&)>& f, double tol);
double lens_area(const DomainSpec& spec, double tol);
double lens_r_formula(const DomainSpec& spec, double tol);

std::string to_json_string(const std::vector<OracleReport>& reports);

}  // namespace lens
