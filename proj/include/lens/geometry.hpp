#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lens {

using Vec2 = Eigen::Vector2d;

enum class BoundaryTag { Sigma, TArc };

std::string to_string(BoundaryTag tag);

// Radial perturbation of the cap curve, expressed in the polar angle phi
// around the cap center: r(phi) = R0 * (1 + amplitude * g(phi)).
// g and g' vanish at the window endpoints so the corner points stay fixed
// on the unit circle and the corner angle is preserved.
struct PerturbationProfile {
  double amplitude = 0.0;
  std::string shape = "none";  // "none" | "hann"
  double window_lo = 0.0;
  double window_hi = 0.0;

  double g(double phi) const;
  double dg(double phi) const;
  bool is_identity() const { return amplitude == 0.0 || shape == "none"; }
};

PerturbationProfile hann_bump();

// A lens domain inside the upper half-ball: the region between a (possibly
// perturbed) cap curve Sigma centered at cap_center and the unit-sphere
// patch T, meeting at the two corner points Lambda.
struct DomainSpec {
  int dimension = 2;
  double cap_radius = 1.0;
  Eigen::VectorXd cap_center;  // z0, |z0|^2 = 1 + cap_radius^2
  PerturbationProfile perturbation;
  double cone_theta = 0.0;  // certified interior cone parameters
  double cone_a = 0.0;
  double min_height = 0.0;  // min x_N over the closure, cached at build time
  std::optional<double> inner_radius;

  // 2-D parameterizations (throw for dimension != 2)
  double sigma_radius(double phi) const;
  double sigma_radius_prime(double phi) const;
  Vec2 sigma_point(double phi) const;
  Vec2 corner(int which) const;     // which in {0,1}: window_lo / window_hi end
  double tarc_angle(int which) const;  // polar angle of corner on the unit circle
  bool is_symmetric() const { return perturbation.is_identity(); }
};

struct BoundaryPolyline {
  struct Segment {
    int a = 0, b = 0;
    BoundaryTag tag = BoundaryTag::Sigma;
    double length = 0.0;
    Vec2 normal = Vec2::Zero();  // outward unit normal
  };
  std::vector<Vec2> vertices;  // closed, simple, positively oriented
  std::vector<Segment> segments;
  std::vector<int> lambda;  // corner vertex ids (2 for lens domains)

  double total_length() const;
  double tagged_length(BoundaryTag tag) const;
  double diameter() const;  // max pairwise vertex distance
};

struct DistanceResult {
  double distance = 0.0;  // always >= 0
  bool inside = false;
};

// azimuth holds the first N-1 components of the cap center; the last one is
// fixed by the orthogonal-intersection constraint |z|^2 = 1 + R^2.
DomainSpec make_symmetric_cap(int N, double R, const Eigen::VectorXd& azimuth);
DomainSpec make_symmetric_cap(int N, double R);

DomainSpec make_perturbed_domain(const DomainSpec& base, double eps,
                                 const PerturbationProfile& shape);

BoundaryPolyline boundary_polyline(const DomainSpec& spec, int n);

// Polyline for an arbitrary simple polygon; used by test fixtures.
BoundaryPolyline polygon_polyline(const std::vector<Vec2>& vertices,
                                  BoundaryTag tag = BoundaryTag::Sigma);

bool point_in_polygon(const BoundaryPolyline& poly, const Vec2& x);
DistanceResult distance_to_boundary(const BoundaryPolyline& poly, const Vec2& x);

std::pair<double, double> rho_extremes(std::span<const Vec2> sigma_samples,
                                       const Vec2& z);

double min_height(const BoundaryPolyline& poly);

double sigma0(double theta, double a, double delta0);

// May return +inf as sin(theta) -> 0.
double john_constant_bound(double theta, double a, double d_omega, double delta0);

struct ConeCheckConfig {
  int directions = 64;      // candidate cone axes per boundary point
  int apex_samples = 12;    // translates w sampled in B_a(x) per ring
  int apex_rings = 3;
  int cone_radial = 5;      // cone sample shells
  int cone_angular = 9;     // cone samples per shell
};

struct ConeWitness {
  Vec2 boundary_point = Vec2::Zero();
  Vec2 apex = Vec2::Zero();            // translate w that failed
  Vec2 escaped_point = Vec2::Zero();   // cone sample found outside
};

struct ConeCheckResult {
  bool pass = false;
  std::optional<ConeWitness> witness;
};

// Sampled certificate: finite direction set, sampled translates and cone
// points. A pass certifies the condition at the sampling density only.
ConeCheckResult cone_condition_check(const BoundaryPolyline& poly, double theta,
                                     double a, const ConeCheckConfig& cfg = {});

struct Mesh;  // mesh.hpp

struct ParallelSetResult {
  bool connected = false;
  int components = 0;
  int element_count = 0;  // 0 means sigma exceeded the inradius
};

// Elements whose centroid distance-to-boundary exceeds sigma (vertex-average rule).
std::vector<int> parallel_set_elements(const Mesh& mesh, double sigma);
ParallelSetResult parallel_set_connected(const Mesh& mesh, double sigma);
// Oriented boundary loop(s) of the parallel sub-mesh, for cone re-checks.
BoundaryPolyline parallel_set_boundary(const Mesh& mesh, double sigma);

std::string to_json_string(const DomainSpec& spec);
DomainSpec domain_spec_from_json(const std::string& text);
void write_polyline_csv(const BoundaryPolyline& poly, std::ostream& os);

}  // namespace lens
