#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lens/fem.hpp"

namespace lens {

struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double scale = 0.0;  // max(|lhs|, |rhs|, 1e-30)
  double relative = 0.0;
  double h = 0.0;
};

IdentityReport make_report(const std::string& name, double lhs, double rhs, double h);

// R = N int_Omega x_N dx / int_Sigma x_N dS, by mesh quadrature.
double compute_R(const Field& field);

struct ZResult {
  Vec2 z = Vec2::Zero();             // surface form: (int x - int_T u x dS) / |Omega|
  Vec2 z_volume = Vec2::Zero();      // volume form: (int x - int grad u dx) / |Omega|
  double cross_check = 0.0;          // |z - z_volume|
};
ZResult compute_z(const Field& field);

// Center of mass variant over the parallel set {delta > sigma}; throws if
// the parallel set is empty or disconnected at this sigma.
Vec2 compute_z_sigma(const Field& field, double sigma);

IdentityReport pohozaev_report(const Field& field);
IdentityReport fundamental_report(const Field& field, double c);

double deficit_norm(const Field& field, double R);

struct HQuantities {
  double osc_h = 0.0;  // oscillation of |x-z|^2/2 over the Sigma samples
  double rho_e = 0.0;
  double rho_i = 0.0;
  double gap = 0.0;
  bool gap_bound_ok = false;  // gap <= (8/diameter) * osc_h
  double gap_bound_rhs = 0.0;
};
HQuantities h_quantities(const Field& field, const Vec2& z, double diameter);

// sqrt of int delta^{2 tau} |I - Hess u_h|^2; tau in {1/2, 1, 3/2}.
double weighted_hessian_norm(const Field& field, double tau,
                             bool exact_distance = false);

struct PointViolation {
  Vec2 x = Vec2::Zero();
  double lhs = 0.0;
  double rhs = 0.0;
};

struct DistanceBoundReport {
  std::vector<PointViolation> quadratic;  // -u >= delta^2/2 failures beyond slack
  std::vector<PointViolation> linear;     // -u >= (r_i/2) delta failures
  double slack = 0.0;
  bool linear_checked = false;
};
DistanceBoundReport distance_lower_bound_check(const Field& field,
                                               std::optional<double> r_i,
                                               double slack_constant = 0.5);

struct GradientBoundReport {
  double grad_h_inf = 0.0;
  double bound = 0.0;  // 2 (L + 1)
  bool ok = false;
};
GradientBoundReport grad_h_bound_check(const Field& field, const Vec2& z);

// Discrete mean-value screen for the harmonic part: at interior vertices,
// h must lie between the min and max of h over the surrounding ring,
// within slack_constant * h^2.
struct MeanValueReport {
  int violations = 0;
  double max_excess = 0.0;
  double slack = 0.0;
};
MeanValueReport mean_value_band_check(const Field& field, const Vec2& z,
                                      double slack_constant = 10.0);

double kappa(int N, double tau);
double alpha_pq(int N, double p, double q);

double domain_diameter(const Mesh& mesh);
double boundary_min_height(const Mesh& mesh);

struct CheckResult {
  std::string name;
  bool applicable = true;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct CertificateOptions {
  double distance_slack = 0.5;    // times h^2
  double mean_value_slack = 10.0; // times h^2
};

// One bundled verdict per solve: derived quantities, both integral
// identities, and every inequality check whose hypotheses hold.
struct SolveCertificate {
  double h = 0.0;
  double R = 0.0;
  Vec2 z = Vec2::Zero();
  double z_cross_check = 0.0;
  double deficit = 0.0;
  double gap = 0.0;
  double osc_h = 0.0;
  double L = 0.0;
  double m = 0.0;
  double w_half = 0.0, w_one = 0.0, w_threehalf = 0.0;
  IdentityReport pohozaev;
  IdentityReport fundamental;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

SolveCertificate make_certificate(const Field& field, const DomainSpec& spec,
                                  const CertificateOptions& opts = {});

std::string to_json_string(const SolveCertificate& cert);

}  // namespace lens
