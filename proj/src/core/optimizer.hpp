#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace vqns {

// Flat parameter vector theta, layout (B_0, d_0, wc_0, B_1, ...).
struct ParameterVector {
  std::vector<double> values;
  int n_basis = 0;

  static ParameterVector from_model(const SpectrumModel& model);
  SpectrumModel to_model() const;
  std::size_t size() const { return values.size(); }
};

enum class Algorithm { kAdam, kAdamW };
enum class GradMode { kAnalytic, kCentralDifference };

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::kAdam;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // AdamW only
  double xi = 1e-5;           // convergence threshold on the loss
  int max_iter = 10000;
  int max_restarts = 10;
  GradMode grad_mode = GradMode::kAnalytic;
  // Projection floor for the widths. Raising it toward the measurement
  // resolution keeps every basis term visible to the data, which rules out
  // the degenerate near-delta terms the global floor only bounds.
  double width_floor = kOmegaCFloor;

  void validate() const;
};

// Per-figure optimizer profiles from the reference study.
OptimizerConfig preset_config(const std::string& name);  // fig2, fig3cd, ...
std::vector<std::string> preset_names();

struct InitRanges {
  double amplitude_max = 10.0;  // B ~ U[0, 10]
  double width_min = 0.1;       // wc ~ U[0.1, 10]
  double width_max = 10.0;
  double center_max = 20.0;  // d_i ~ U[i*dd, (i+1)*dd], dd = d_max/N_basis
};

// Stochastic initialization; deterministic for a given seed. The center
// intervals are zero-based so their union covers [0, d_max].
ParameterVector init_params(int n_basis, const InitRanges& ranges,
                            std::uint64_t seed);

// Discrete MSE loss: N_t^{-1} sum_{j,k} w_{j,k} |C_j(t_k) - C_j^trial(t_k)|^2
// with w the grid spacing on uniform grids and trapezoid weights otherwise.
// `trial` must be aligned curve-by-curve and point-by-point with `measured`.
double loss_mse(const MeasurementSet& measured,
                const std::vector<std::vector<double>>& trial);

// Precomputes weights and provides loss/gradient for a fixed measurement set.
class FitObjective {
 public:
  explicit FitObjective(const MeasurementSet& measured);

  double loss(const ParameterVector& theta) const;
  // Returns the loss and fills grad (resized to theta.size()).
  double loss_and_grad(const ParameterVector& theta, std::vector<double>& grad,
                       GradMode mode = GradMode::kAnalytic) const;

  const MeasurementSet& measured() const { return measured_; }

 private:
  MeasurementSet measured_;
  std::vector<std::vector<double>> weights_;  // per curve, per point
  double inv_total_points_ = 0.0;
};

// Central finite differences of the objective, h = 1e-5 relative.
std::vector<double> finite_difference_gradient(const FitObjective& objective,
                                               const ParameterVector& theta,
                                               double rel_step = 1e-5);

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment
  long iteration = 0;     // completed steps
};

// One optimizer step in place, followed by projection onto the feasible set
// (B, d >= 0; wc >= omega_c floor).
void adam_step(ParameterVector& theta, AdamState& state,
               const std::vector<double>& grad, const OptimizerConfig& cfg);

void project_feasible(ParameterVector& theta,
                      double width_floor = kOmegaCFloor);

struct RunResult {
  ParameterVector theta;
  double final_loss = 0.0;
  long iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  std::vector<double> loss_history;
};

// Full variational fit: init, iterate Adam/AdamW until loss <= xi, restart
// with a derived seed on failure (up to cfg.max_restarts). Never throws on
// non-convergence; the result carries converged = false.
RunResult fit(const MeasurementSet& measured, int n_basis,
              const OptimizerConfig& cfg, std::uint64_t seed);

RunResult fit(const FitObjective& objective, int n_basis,
              const OptimizerConfig& cfg, std::uint64_t seed);

}  // namespace vqns
