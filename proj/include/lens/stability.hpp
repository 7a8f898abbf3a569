#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lens/identities.hpp"

namespace lens {

struct SweepRecord {
  double eps = 0.0;
  double h = 0.0;
  double R = 0.0;
  Vec2 z = Vec2::Zero();
  double deficit = 0.0;
  double gap = 0.0;
  double osc_h = 0.0;
  double L = 0.0;
  double m = 0.0;
  double w_half = 0.0, w_one = 0.0, w_threehalf = 0.0;
  bool cert_ok = false;
  bool has_inner_radius = false;
  double inner_radius = 0.0;
};

struct SweepConfig {
  double h_target = 0.05;
  int refinements = 1;
  CertificateOptions cert;
  int threads = 0;  // 0: LENS_TORSION_THREADS or hardware default
};

struct SweepResult {
  std::vector<SweepRecord> records;  // ordered by eps, failed points omitted
  std::vector<SolveCertificate> certificates;
  SweepRecord rigid;                       // eps = 0 run under the same policy
  std::vector<SweepRecord> refined_small;  // two smallest eps, one extra refinement
  double floor_deficit = 0.0;
  double floor_gap = 0.0;
  std::vector<std::string> diagnostics;  // per-eps failures
};

SweepResult run_sweep(const DomainSpec& base, const std::vector<double>& eps_list,
                      const PerturbationProfile& shape, double h_target,
                      int refinements, const SweepConfig& cfg = {});

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double eps_min = 0.0, eps_max = 0.0;
  int n_used = 0;
};

// Least squares of log(gap) against log(deficit) over records whose deficit
// exceeds ten times the discretization floor.
ExponentFit fit_exponent(const std::vector<SweepRecord>& records, double floor_deficit);

enum class StabilityForm {
  Pinned,        // needs min height m > 0
  Smooth,        // needs interior sphere radius
  SmoothPinned,  // needs both
  General,       // cone condition only
};

std::string to_string(StabilityForm form);

struct TheoremParams {
  int N = 2;
  double eta = 0.1;  // general form, N = 2 only
};

struct TheoremCertificate {
  std::string theorem;
  std::string verdict;  // "PASS" | "FAIL" | "not applicable"
  double c_min = 0.0;
  double slope = 0.0;
  bool pass = false;
  double refinement_growth = 0.0;  // c on refined pair / c on coarse pair
  int n_usable = 0;
};

double stability_shape(StabilityForm form, int N, double deficit, double eta);

TheoremCertificate check_theorem_bound(const SweepResult& sweep, StabilityForm form,
                                       const TheoremParams& params = {});

void write_sweep_csv(const SweepResult& sweep, std::ostream& os);
std::vector<SweepRecord> read_sweep_csv(std::istream& is);
std::string to_json_string(const TheoremCertificate& cert);
void write_gnuplot_script(const SweepResult& sweep,
                          const std::vector<TheoremCertificate>& certs,
                          const std::string& csv_name, std::ostream& os);

}  // namespace lens
