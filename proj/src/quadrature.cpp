#include "lens/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace lens {

namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1]
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct PanelResult {
  double kronrod = 0.0;
  double error = 0.0;
};

PanelResult panel(const std::function<double(double)>& f, double a, double b,
                  long& evals) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - hl * kXgk[i]);
    fv[14 - i] = f(c + hl * kXgk[i]);
  }
  fv[7] = f(c);
  evals += 15;

  double kron = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) kron += kWgk[i] * (fv[i] + fv[14 - i]);
  for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);

  PanelResult r;
  r.kronrod = kron * hl;
  r.error = std::abs((kron - gauss) * hl);
  return r;
}

void recurse(const std::function<double(double)>& f, double a, double b,
             double tol, int depth, int max_depth, QuadResult& out) {
  const PanelResult p = panel(f, a, b, out.evaluations);
  if (p.error <= tol || depth >= max_depth) {
    out.value += p.kronrod;
    out.error_estimate += p.error;
    if (p.error > tol) out.converged = false;
    return;
  }
  const double c = 0.5 * (a + b);
  recurse(f, a, c, 0.5 * tol, depth + 1, max_depth, out);
  recurse(f, c, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, int max_depth) {
  QuadResult out;
  out.converged = true;
  if (a == b) return out;
  recurse(f, a, b, std::max(abs_tol, 1e-15), 0, max_depth, out);
  return out;
}

}  // namespace lens
