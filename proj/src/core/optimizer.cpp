#include "core/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "core/attenuation.hpp"
#include "core/errors.hpp"
#include "core/seeding.hpp"

namespace vqns {

ParameterVector ParameterVector::from_model(const SpectrumModel& model) {
  ParameterVector theta;
  theta.n_basis = static_cast<int>(model.terms.size());
  theta.values.reserve(3 * model.terms.size());
  for (const auto& term : model.terms) {
    theta.values.push_back(term.amplitude);
    theta.values.push_back(term.center);
    theta.values.push_back(term.width);
  }
  return theta;
}

SpectrumModel ParameterVector::to_model() const {
  SpectrumModel model;
  model.terms.reserve(n_basis);
  for (int i = 0; i < n_basis; ++i) {
    model.terms.push_back({values[3 * i], values[3 * i + 1], values[3 * i + 2]});
  }
  return model;
}

void OptimizerConfig::validate() const {
  if (!(lr > 0.0)) throw InvalidArgumentError("OptimizerConfig: lr must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw InvalidArgumentError("OptimizerConfig: betas must lie in [0, 1)");
  if (!(xi > 0.0)) throw InvalidArgumentError("OptimizerConfig: xi must be > 0");
  if (!(eps > 0.0)) throw InvalidArgumentError("OptimizerConfig: eps must be > 0");
  if (weight_decay < 0.0)
    throw InvalidArgumentError("OptimizerConfig: weight_decay must be >= 0");
  if (max_iter < 1 || max_restarts < 0)
    throw InvalidArgumentError("OptimizerConfig: bad iteration limits");
  if (!(width_floor >= kOmegaCFloor) || !std::isfinite(width_floor))
    throw InvalidArgumentError(
        "OptimizerConfig: width_floor must be >= the global width floor");
}

OptimizerConfig preset_config(const std::string& name) {
  OptimizerConfig cfg;
  if (name == "fig2") {
    cfg.algorithm = Algorithm::kAdam;
    cfg.lr = 0.01;
  } else if (name == "fig3cd") {
    cfg.algorithm = Algorithm::kAdamW;
    cfg.lr = 0.01;
    cfg.eps = 1e-6;
    cfg.weight_decay = 0.01;
    cfg.beta1 = 0.9;
    cfg.beta2 = 0.9;
  } else if (name == "fig4") {
    cfg.algorithm = Algorithm::kAdamW;
    cfg.lr = 0.02;
    cfg.weight_decay = 0.4;
  } else if (name == "fig-ftns") {
    cfg.algorithm = Algorithm::kAdamW;
    cfg.lr = 0.01;
    cfg.weight_decay = 0.1;
  } else {
    throw InvalidArgumentError("unknown optimizer preset: " + name);
  }
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"fig2", "fig3cd", "fig4", "fig-ftns"};
}

ParameterVector init_params(int n_basis, const InitRanges& ranges,
                            std::uint64_t seed) {
  if (n_basis < 1) throw InvalidArgumentError("init_params: n_basis must be >= 1");
  Rng rng(seed);
  ParameterVector theta;
  theta.n_basis = n_basis;
  theta.values.resize(3 * n_basis);
  const double dd = ranges.center_max / n_basis;
  for (int i = 0; i < n_basis; ++i) {
    theta.values[3 * i] = rng.uniform(0.0, ranges.amplitude_max);
    theta.values[3 * i + 1] = rng.uniform(i * dd, (i + 1) * dd);
    theta.values[3 * i + 2] = rng.uniform(ranges.width_min, ranges.width_max);
  }
  return theta;
}

namespace {

// Grid spacing weights: constant dt on uniform grids, trapezoid otherwise.
std::vector<double> grid_weights(const std::vector<double>& times) {
  const std::size_t n = times.size();
  if (n < 2)
    throw InvalidArgumentError("loss: each curve needs at least 2 points");
  const double dt0 = times[1] - times[0];
  bool uniform = true;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (std::abs((times[k + 1] - times[k]) - dt0) > 1e-9 * std::max(dt0, 1e-12)) {
      uniform = false;
      break;
    }
  }
  std::vector<double> w(n);
  if (uniform) {
    std::fill(w.begin(), w.end(), dt0);
  } else {
    w[0] = 0.5 * (times[1] - times[0]);
    for (std::size_t k = 1; k + 1 < n; ++k)
      w[k] = 0.5 * (times[k + 1] - times[k - 1]);
    w[n - 1] = 0.5 * (times[n - 1] - times[n - 2]);
  }
  return w;
}

}  // namespace

double loss_mse(const MeasurementSet& measured,
                const std::vector<std::vector<double>>& trial) {
  if (trial.size() != measured.curves.size())
    throw InvalidArgumentError("loss: curve count mismatch");
  double acc = 0.0;
  std::size_t total = 0;
  for (std::size_t j = 0; j < trial.size(); ++j) {
    const auto& curve = measured.curves[j];
    if (trial[j].size() != curve.times.size())
      throw InvalidArgumentError("loss: grid mismatch on curve " +
                                 std::to_string(j));
    const auto w = grid_weights(curve.times);
    for (std::size_t k = 0; k < trial[j].size(); ++k) {
      const double r = trial[j][k] - curve.values[k];
      acc += w[k] * r * r;
    }
    total += trial[j].size();
  }
  return acc / static_cast<double>(total);
}

FitObjective::FitObjective(const MeasurementSet& measured)
    : measured_(measured) {
  validate(measured_);
  std::size_t total = 0;
  weights_.reserve(measured_.curves.size());
  for (const auto& curve : measured_.curves) {
    weights_.push_back(grid_weights(curve.times));
    total += curve.times.size();
  }
  inv_total_points_ = 1.0 / static_cast<double>(total);
}

double FitObjective::loss(const ParameterVector& theta) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < measured_.curves.size(); ++j) {
    const auto& curve = measured_.curves[j];
    const auto& w = weights_[j];
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
      double chi = 0.0;
      for (int i = 0; i < theta.n_basis; ++i) {
        const LorentzianTerm term{theta.values[3 * i], theta.values[3 * i + 1],
                                  theta.values[3 * i + 2]};
        chi += chi_analytic(term, curve.seq.n_pulses, curve.times[k]);
      }
      const double c = std::exp(-std::min(chi, kChiClamp));
      const double r = c - curve.values[k];
      acc += w[k] * r * r;
    }
  }
  return acc * inv_total_points_;
}

double FitObjective::loss_and_grad(const ParameterVector& theta,
                                   std::vector<double>& grad,
                                   GradMode mode) const {
  grad.assign(theta.size(), 0.0);
  if (mode == GradMode::kCentralDifference) {
    grad = finite_difference_gradient(*this, theta);
    return loss(theta);
  }
  double acc = 0.0;
  std::vector<ChiGrad> term_grads(theta.n_basis);
  for (std::size_t j = 0; j < measured_.curves.size(); ++j) {
    const auto& curve = measured_.curves[j];
    const auto& w = weights_[j];
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
      double chi = 0.0;
      for (int i = 0; i < theta.n_basis; ++i) {
        const LorentzianTerm term{theta.values[3 * i], theta.values[3 * i + 1],
                                  theta.values[3 * i + 2]};
        term_grads[i] =
            chi_analytic_grad(term, curve.seq.n_pulses, curve.times[k]);
        chi += term_grads[i].chi;
      }
      const double c = std::exp(-std::min(chi, kChiClamp));
      const double r = c - curve.values[k];
      acc += w[k] * r * r;
      // dL/dtheta = inv_Nt * w * 2r * (-c) * dchi/dtheta
      const double f = inv_total_points_ * w[k] * 2.0 * r * (-c);
      for (int i = 0; i < theta.n_basis; ++i) {
        grad[3 * i] += f * term_grads[i].d_amplitude;
        grad[3 * i + 1] += f * term_grads[i].d_center;
        grad[3 * i + 2] += f * term_grads[i].d_width;
      }
    }
  }
  return acc * inv_total_points_;
}

std::vector<double> finite_difference_gradient(const FitObjective& objective,
                                               const ParameterVector& theta,
                                               double rel_step) {
  std::vector<double> grad(theta.size());
  ParameterVector probe = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double x = theta.values[i];
    const double h = rel_step * std::max(std::abs(x), 1.0);
    probe.values[i] = x + h;
    const double up = objective.loss(probe);
    probe.values[i] = x - h;
    const double down = objective.loss(probe);
    probe.values[i] = x;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

void project_feasible(ParameterVector& theta, double width_floor) {
  for (int i = 0; i < theta.n_basis; ++i) {
    theta.values[3 * i] = std::max(theta.values[3 * i], 0.0);
    theta.values[3 * i + 1] = std::max(theta.values[3 * i + 1], 0.0);
    theta.values[3 * i + 2] = std::max(theta.values[3 * i + 2], width_floor);
  }
}

void adam_step(ParameterVector& theta, AdamState& state,
               const std::vector<double>& grad, const OptimizerConfig& cfg) {
  const std::size_t n = theta.size();
  if (state.m.size() != n) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.iteration = 0;
  }
  const long it = state.iteration + 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(it));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(it));
  for (std::size_t i = 0; i < n; ++i) {
    if (cfg.algorithm == Algorithm::kAdamW && cfg.weight_decay != 0.0)
      theta.values[i] -= cfg.lr * cfg.weight_decay * theta.values[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    theta.values[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  state.iteration = it;
  project_feasible(theta, cfg.width_floor);
}

RunResult fit(const FitObjective& objective, int n_basis,
              const OptimizerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.seed = seed;

  std::vector<double> grad;
  for (int attempt = 0; attempt <= cfg.max_restarts; ++attempt) {
    const std::uint64_t attempt_seed =
        attempt == 0 ? seed : derive_seed(seed, static_cast<std::uint64_t>(attempt));
    ParameterVector theta = init_params(n_basis, InitRanges{}, attempt_seed);
    project_feasible(theta, cfg.width_floor);
    AdamState state;
    result.restarts_used = attempt;

    for (long iter = 0; iter <= cfg.max_iter; ++iter) {
      const double L = objective.loss_and_grad(theta, grad, cfg.grad_mode);
      result.loss_history.push_back(L);
      result.final_loss = L;
      result.theta = theta;
      result.iterations = iter;
      if (L <= cfg.xi) {
        result.converged = true;
        result.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        return result;
      }
      if (iter == cfg.max_iter) break;  // attempt exhausted
      adam_step(theta, state, grad, cfg);
    }
  }

  result.converged = false;
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

RunResult fit(const MeasurementSet& measured, int n_basis,
              const OptimizerConfig& cfg, std::uint64_t seed) {
  return fit(FitObjective(measured), n_basis, cfg, seed);
}

}  // namespace vqns
