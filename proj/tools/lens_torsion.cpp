// Command-line driver: mesh-free identity checks, single solves with a
// bundled certificate, perturbation sweeps with stability certificates, and
// geometric diagnostics of the lens fixtures.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "lens/identities.hpp"
#include "lens/oracle.hpp"
#include "lens/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  double h = 0.05;
  int refine = 1;
  std::vector<double> eps;
  double tol = 1e-9;
  bool require_cone = false;
  double R = 1.0;
  int N = 2;
  double azimuth = 0.0;
};

json echo_config(const CommonOpts& o, const std::string& command) {
  json j;
  j["command"] = command;
  j["N"] = o.N;
  j["R"] = o.R;
  j["azimuth"] = o.azimuth;
  j["h"] = o.h;
  j["refine"] = o.refine;
  j["eps"] = o.eps;
  j["tol"] = o.tol;
  j["require_cone"] = o.require_cone;
  return j;
}

void load_config(CommonOpts& o) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw std::runtime_error("cannot open config " + o.config_path);
  json j;
  in >> j;
  if (j.contains("N")) o.N = j["N"].get<int>();
  if (j.contains("R")) o.R = j["R"].get<double>();
  if (j.contains("azimuth")) o.azimuth = j["azimuth"].get<double>();
  if (j.contains("h")) o.h = j["h"].get<double>();
  if (j.contains("refine")) o.refine = j["refine"].get<int>();
  if (j.contains("eps")) o.eps = j["eps"].get<std::vector<double>>();
  if (j.contains("tol")) o.tol = j["tol"].get<double>();
  if (j.contains("require_cone")) o.require_cone = j["require_cone"].get<bool>();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

lens::DomainSpec spec_from(const CommonOpts& o) {
  Eigen::VectorXd az(o.N - 1);
  az.setZero();
  if (o.N >= 2) az[0] = o.azimuth;
  return lens::make_symmetric_cap(o.N, o.R, az);
}

int cmd_oracle_check(CommonOpts o) {
  load_config(o);
  std::vector<lens::OracleReport> reports;
  try {
    Eigen::VectorXd az(o.N - 1);
    az.setZero();
    if (o.N >= 2) az[0] = o.azimuth;
    reports = lens::oracle_identity_report(o.N, o.R, az, o.tol);
  } catch (const std::exception& e) {
    std::cerr << "inadmissible geometry: " << e.what() << "\n";
    return 2;
  }
  bool ok = true;
  std::printf("%-14s %22s %22s %12s %12s\n", "identity", "lhs", "rhs", "residual",
              "quad_err");
  for (const auto& r : reports) {
    std::printf("%-14s %22.15g %22.15g %12.5g %12.5g\n", r.identity.c_str(), r.lhs,
                r.rhs, r.residual, r.quad_error_estimate);
    ok = ok && r.residual <= o.tol;
  }
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    write_text(fs::path(o.out_dir) / "oracle_reports.json", to_json_string(reports));
    write_text(fs::path(o.out_dir) / "config.json",
               echo_config(o, "oracle-check").dump(2));
  }
  return ok ? 0 : 1;
}

int cmd_solve(CommonOpts o, double eps) {
  load_config(o);
  fs::create_directories(o.out_dir);
  try {
    lens::DomainSpec spec = spec_from(o);
    if (eps != 0.0) spec = lens::make_perturbed_domain(spec, eps, lens::hann_bump());

    lens::Mesh mesh = lens::triangulate(spec, o.h);
    for (int r = 0; r < o.refine; ++r) mesh = lens::refine(mesh, spec);
    auto space = lens::build_space(std::make_shared<lens::Mesh>(std::move(mesh)));
    const lens::Field field = lens::solve(lens::assemble(space, true));
    const lens::SolveCertificate cert = lens::make_certificate(field, spec);

    {
      std::ofstream os(fs::path(o.out_dir) / "field.csv");
      os << "node,x1,x2,u\n";
      char buf[160];
      for (int i = 0; i < space->n_nodes; ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", i,
                      space->node_pos[i].x(), space->node_pos[i].y(),
                      field.coeffs[i]);
        os << buf;
      }
    }
    {
      std::ofstream os(fs::path(o.out_dir) / "flux.csv");
      os << "tag,x1,x2,u_nu\n";
      char buf[160];
      for (auto tag : {lens::BoundaryTag::Sigma, lens::BoundaryTag::TArc})
        for (const auto& fsmp : lens::normal_derivative_on(field, tag)) {
          std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n",
                        lens::to_string(tag).c_str(), fsmp.x.x(), fsmp.x.y(),
                        fsmp.u_nu);
          os << buf;
        }
    }
    {
      std::ofstream os(fs::path(o.out_dir) / "mesh.txt");
      lens::write_mesh_text(field.mesh(), os);
    }
    write_text(fs::path(o.out_dir) / "certificate.json", to_json_string(cert));
    json cfg = echo_config(o, "solve");
    cfg["eps"] = eps;
    write_text(fs::path(o.out_dir) / "config.json", cfg.dump(2));

    std::cout << "R = " << cert.R << "  z = (" << cert.z.x() << ", " << cert.z.y()
              << ")  deficit = " << cert.deficit << "  gap = " << cert.gap
              << "  all_pass = " << (cert.all_pass() ? "yes" : "no") << "\n";
    return cert.all_pass() ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver diagnostic: " << e.what() << "\n";
    return 1;
  }
}

int cmd_sweep(CommonOpts o) {
  load_config(o);
  if (o.eps.empty()) {
    std::cerr << "sweep: empty eps list\n";
    return 2;
  }
  fs::create_directories(o.out_dir);
  const lens::DomainSpec base = spec_from(o);
  const lens::SweepResult sweep =
      lens::run_sweep(base, o.eps, lens::hann_bump(), o.h, o.refine);

  for (const auto& d : sweep.diagnostics) std::cerr << "diagnostic: " << d << "\n";

  std::vector<lens::TheoremCertificate> certs;
  for (auto form : {lens::StabilityForm::Pinned, lens::StabilityForm::Smooth,
                    lens::StabilityForm::SmoothPinned, lens::StabilityForm::General})
    certs.push_back(lens::check_theorem_bound(sweep, form));

  {
    std::ofstream os(fs::path(o.out_dir) / "sweep.csv");
    lens::write_sweep_csv(sweep, os);
  }
  for (const auto& c : certs)
    write_text(fs::path(o.out_dir) / ("certificate_" + c.theorem + ".json"),
               to_json_string(c));
  {
    std::ofstream os(fs::path(o.out_dir) / "plot.gp");
    lens::write_gnuplot_script(sweep, certs, "sweep.csv", os);
  }
  for (size_t i = 0; i < sweep.certificates.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "solve_certificate_%02zu.json", i);
    write_text(fs::path(o.out_dir) / name, to_json_string(sweep.certificates[i]));
  }
  write_text(fs::path(o.out_dir) / "config.json", echo_config(o, "sweep").dump(2));

  bool ok = sweep.diagnostics.empty();
  for (const auto& c : certs) {
    std::printf("%-14s %-16s c_min=%-12.6g slope=%-10.4g\n", c.theorem.c_str(),
                c.verdict.c_str(), c.c_min, c.slope);
    ok = ok && (c.verdict == "PASS" || c.verdict == "not applicable");
  }
  return ok ? 0 : 1;
}

int cmd_geometry(CommonOpts o) {
  load_config(o);
  const lens::DomainSpec spec = spec_from(o);
  const lens::BoundaryPolyline poly = lens::boundary_polyline(spec, 256);

  const double delta0 = spec.cone_a / 4.0;
  const double s0 = lens::sigma0(spec.cone_theta, spec.cone_a, delta0);
  const double john =
      lens::john_constant_bound(spec.cone_theta, spec.cone_a, 2.0, delta0);
  std::printf("sigma0      = %.12g\n", s0);
  std::printf("john_bound  = %.12g\n", john);
  std::printf("min_height  = %.12g\n", spec.min_height);

  const auto cone = lens::cone_condition_check(poly, spec.cone_theta, spec.cone_a);
  std::printf("cone_check(theta=%.4g, a=%.4g): %s\n", spec.cone_theta, spec.cone_a,
              cone.pass ? "pass" : "FAIL");
  if (!cone.pass && cone.witness) {
    std::printf("  witness at boundary point (%.6g, %.6g), apex (%.6g, %.6g), "
                "escaped (%.6g, %.6g)\n",
                cone.witness->boundary_point.x(), cone.witness->boundary_point.y(),
                cone.witness->apex.x(), cone.witness->apex.y(),
                cone.witness->escaped_point.x(), cone.witness->escaped_point.y());
  }

  const lens::Mesh mesh = lens::triangulate(spec, o.h);
  std::printf("%10s %12s %10s\n", "sigma", "elements", "components");
  for (int i = 0; i <= 8; ++i) {
    const double sigma = s0 * i / 8.0;
    const auto par = lens::parallel_set_connected(mesh, sigma);
    std::printf("%10.6f %12d %10d\n", sigma, par.element_count, par.components);
  }

  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    std::ofstream os(fs::path(o.out_dir) / "boundary.csv");
    lens::write_polyline_csv(poly, os);
    write_text(fs::path(o.out_dir) / "domain.json", lens::to_json_string(spec));
    write_text(fs::path(o.out_dir) / "config.json",
               echo_config(o, "geometry").dump(2));
  }
  if (o.require_cone && !cone.pass) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained-torsion lens solver and verification harness"};
  app.require_subcommand(1);

  CommonOpts o;
  double solve_eps = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--h", o.h, "target mesh size");
    cmd->add_option("--refine", o.refine, "refinement count");
    cmd->add_option("--eps", o.eps, "perturbation amplitudes");
    cmd->add_option("--tol", o.tol, "tolerance");
    cmd->add_option("--R", o.R, "cap radius");
    cmd->add_option("--N", o.N, "space dimension");
    cmd->add_option("--azimuth", o.azimuth, "first component of the cap center");
    cmd->add_flag("--require-cone", o.require_cone, "fail if the cone check fails");
  };

  auto* oracle = app.add_subcommand("oracle-check", "mesh-free identity residuals");
  add_common(oracle);
  auto* solve = app.add_subcommand("solve", "mesh, solve, certify one domain");
  add_common(solve);
  solve->add_option("--perturb-eps", solve_eps, "bump amplitude for the cap");
  auto* sweep = app.add_subcommand("sweep", "perturbation sweep and certificates");
  add_common(sweep);
  auto* geometry = app.add_subcommand("geometry", "geometric diagnostics");
  add_common(geometry);

  CLI11_PARSE(app, argc, argv);

  try {
    if (oracle->parsed()) return cmd_oracle_check(o);
    if (solve->parsed()) return cmd_solve(o, solve_eps);
    if (sweep->parsed()) return cmd_sweep(o);
    if (geometry->parsed()) return cmd_geometry(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
