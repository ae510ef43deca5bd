#pragma once

#include <functional>
#include <vector>

namespace vqns {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double omega_max = 0.0;  // 0 = choose automatically from the integrand
  int max_subdivisions = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error (incl. any tail bound)
  int subdivisions = 0;
};

// Adaptive 15-point Gauss-Kronrod integration of f over [a, b].
// `breakpoints` (optional, inside (a, b)) seed the initial panel layout so
// sharp features start on panel boundaries. Throws ToleranceError carrying
// the best value and achieved error estimate if the subdivision budget is
// exhausted before the tolerance is met.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const std::vector<double>& breakpoints,
                                    double abs_tol, double rel_tol,
                                    int max_subdivisions);

// Single GK15 panel, returns {value, error estimate}.
QuadratureResult gk15_panel(const std::function<double(double)>& f, double a,
                            double b);

}  // namespace vqns
