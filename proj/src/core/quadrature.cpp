#include "core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "core/errors.hpp"

namespace vqns {

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resg = 0.0, resk = 0.0;
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  for (int i = 0; i < 8; ++i) {
    const double sum = (i == 7) ? fv[7] : fv[i] + fv[14 - i];
    resk += kWgk[i] * sum;
    if (i % 2 == 1) resg += kWg[i / 2] * sum;  // Gauss points are the odd ones
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * h;
  // QUADPACK-style error sharpening.
  const double raw = std::abs((resk - resg) * h);
  const double resabs = std::abs(resk * h);
  p.error = raw;
  if (resabs > 0.0 && raw > 0.0) {
    const double scaled = 200.0 * raw / resabs;
    p.error = resabs * std::min(1.0, scaled * std::sqrt(scaled));
  }
  return p;
}

}  // namespace

QuadratureResult gk15_panel(const std::function<double(double)>& f, double a,
                            double b) {
  const Panel p = eval_panel(f, a, b);
  return {p.value, p.error, 1};
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breakpoints,
                                    double abs_tol, double rel_tol,
                                    int max_subdivisions) {
  if (!(b > a)) return {0.0, 0.0, 0};
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw InvalidArgumentError("integrate_adaptive: tolerances must be > 0");

  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  int panels = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Panel p = eval_panel(f, edges[i], edges[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
    ++panels;
  }

  auto tol = [&](double v) { return std::max(abs_tol, rel_tol * std::abs(v)); };

  while (total_err > tol(total) && panels < max_subdivisions) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Panel no longer splittable in double precision; keep its estimate.
      heap.push(worst);
      break;
    }
    Panel left = eval_panel(f, worst.a, mid);
    Panel right = eval_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }

  if (!(total_err <= tol(total)) || !std::isfinite(total))
    throw ToleranceError("integrate_adaptive: tolerance not met", total,
                         total_err);
  return {total, total_err, panels};
}

}  // namespace vqns
