#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/attenuation.hpp"
#include "core/errors.hpp"
#include "core/optimizer.hpp"
#include "core/seeding.hpp"

using namespace vqns;

namespace {

MeasurementSet synth_set(const SpectrumModel& model,
                         const std::vector<int>& pulse_counts, int n_points,
                         double t_end) {
  MeasurementSet set;
  for (int np : pulse_counts) {
    CoherenceCurve curve;
    curve.seq.n_pulses = np;
    for (int k = 0; k < n_points; ++k)
      curve.times.push_back(t_end * k / (n_points - 1));
    curve.values = coherence(model, curve.seq, curve.times).values;
    set.curves.push_back(std::move(curve));
  }
  return set;
}

}  // namespace

TEST_CASE("initialization ranges and determinism") {
  const InitRanges ranges;
  const double dd = ranges.center_max / 2;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const ParameterVector theta = init_params(2, ranges, seed);
    for (int i = 0; i < 2; ++i) {
      CHECK(theta.values[3 * i] >= 0.0);
      CHECK(theta.values[3 * i] <= 10.0);
      CHECK(theta.values[3 * i + 1] >= i * dd);
      CHECK(theta.values[3 * i + 1] <= (i + 1) * dd);
      CHECK(theta.values[3 * i + 2] >= 0.1);
      CHECK(theta.values[3 * i + 2] <= 10.0);
    }
  }
  const ParameterVector a = init_params(5, ranges, 7);
  const ParameterVector b = init_params(5, ranges, 7);
  CHECK(a.values == b.values);
}

TEST_CASE("loss identities") {
  SpectrumModel model{{{1.0, 1.0, 0.8}}, {}};
  const MeasurementSet set = synth_set(model, {0, 2}, 21, 4.0);

  std::vector<std::vector<double>> trial;
  for (const auto& curve : set.curves) trial.push_back(curve.values);
  CHECK(loss_mse(set, trial) == 0.0);

  const double dt = set.curves[0].times[1] - set.curves[0].times[0];
  const double delta = 0.013;
  for (auto& row : trial)
    for (auto& v : row) v += delta;
  CHECK(loss_mse(set, trial) ==
        doctest::Approx(dt * delta * delta).epsilon(1e-12));

  // Doubling every residual quadruples the loss.
  std::vector<std::vector<double>> doubled;
  for (std::size_t j = 0; j < trial.size(); ++j) {
    doubled.push_back(set.curves[j].values);
    for (std::size_t k = 0; k < doubled[j].size(); ++k)
      doubled[j][k] += 2 * delta;
  }
  CHECK(loss_mse(set, doubled) ==
        doctest::Approx(4.0 * loss_mse(set, trial)).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    SpectrumModel model;
    const int n_basis = 1 + trial % 3;
    for (int i = 0; i < n_basis; ++i)
      model.terms.push_back({rng.uniform(0.5, 4.0), rng.uniform(0.0, 8.0),
                             rng.uniform(0.3, 3.0)});
    const MeasurementSet set = synth_set(model, {0, 1, 4}, 15, 3.0);
    const FitObjective objective(set);
    const ParameterVector theta = init_params(n_basis, {}, rng.next_u64());

    std::vector<double> grad;
    objective.loss_and_grad(theta, grad);
    const std::vector<double> fd = finite_difference_gradient(objective, theta);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double scale = std::max({std::abs(grad[i]), std::abs(fd[i]), 1e-8});
      CHECK(std::abs(grad[i] - fd[i]) / scale <= 1e-4);
    }
  }
}

TEST_CASE("gradient is zero at an exact fit") {
  SpectrumModel model{{{2.0, 3.0, 1.5}}, {}};
  const MeasurementSet set = synth_set(model, {0, 2}, 15, 3.0);
  const FitObjective objective(set);
  const ParameterVector theta = ParameterVector::from_model(model);
  std::vector<double> grad;
  const double loss = objective.loss_and_grad(theta, grad);
  CHECK(loss <= 1e-20);
  for (double g : grad) CHECK(std::abs(g) <= 1e-10);
}

TEST_CASE("projection clamps and is idempotent") {
  ParameterVector theta;
  theta.n_basis = 2;
  theta.values = {-0.3, 5.0, 0.5, 1.0, -2.0, 1e-9};
  project_feasible(theta);
  CHECK(theta.values[0] == 0.0);
  CHECK(theta.values[4] == 0.0);
  CHECK(theta.values[5] == kOmegaCFloor);
  const auto snapshot = theta.values;
  project_feasible(theta);
  CHECK(theta.values == snapshot);
}

TEST_CASE("raised width floor is honored and validated") {
  ParameterVector theta;
  theta.n_basis = 2;
  theta.values = {1.0, 2.0, 0.01, 0.5, 1.0, 0.2};
  project_feasible(theta, 0.05);
  CHECK(theta.values[2] == 0.05);
  CHECK(theta.values[5] == 0.2);

  OptimizerConfig cfg;
  cfg.width_floor = 0.05;
  cfg.validate();
  AdamState state;
  adam_step(theta, state, {0.0, 0.0, 1.0, 0.0, 0.0, 0.0}, cfg);
  CHECK(theta.values[2] >= 0.05);

  cfg.width_floor = kOmegaCFloor / 10;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
}

TEST_CASE("fit keeps widths at or above the configured floor") {
  SpectrumModel model{{{1.5, 2.0, 0.9}}, {}};
  const MeasurementSet set = synth_set(model, {0, 1, 4}, 21, 4.0);
  OptimizerConfig cfg;
  cfg.xi = 1e-4;
  cfg.width_floor = 0.3;
  const RunResult result = fit(set, 2, cfg, 7);
  for (const auto& term : result.theta.to_model().terms)
    CHECK(term.width >= 0.3);
}

TEST_CASE("adam step basics") {
  OptimizerConfig cfg;
  cfg.lr = 0.01;
  cfg.eps = 1e-12;

  ParameterVector theta;
  theta.n_basis = 1;
  theta.values = {1.0, 2.0, 3.0};
  AdamState state;
  adam_step(theta, state, {0.0, 0.0, 0.0}, cfg);
  CHECK(theta.values == std::vector<double>{1.0, 2.0, 3.0});

  // First bias-corrected step has magnitude ~ lr for any gradient scale.
  ParameterVector x;
  x.n_basis = 1;
  x.values = {1.0, 2.0, 3.0};
  AdamState s2;
  adam_step(x, s2, {0.5, 0.5, 0.5}, cfg);
  CHECK(x.values[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
}

TEST_CASE("adamw with zero decay is bitwise adam") {
  SpectrumModel model{{{1.0, 2.0, 1.0}}, {}};
  const MeasurementSet set = synth_set(model, {1}, 11, 3.0);
  const FitObjective objective(set);

  OptimizerConfig adam;
  OptimizerConfig adamw = adam;
  adamw.algorithm = Algorithm::kAdamW;
  adamw.weight_decay = 0.0;

  ParameterVector ta = init_params(1, {}, 99);
  ParameterVector tw = ta;
  AdamState sa, sw;
  std::vector<double> grad;
  for (int it = 0; it < 50; ++it) {
    objective.loss_and_grad(ta, grad);
    adam_step(ta, sa, grad, adam);
    objective.loss_and_grad(tw, grad);
    adam_step(tw, sw, grad, adamw);
  }
  CHECK(ta.values == tw.values);
}

TEST_CASE("fit recovers a one-term model") {
  SpectrumModel model{{{1.5, 2.0, 0.9}}, {}};
  const MeasurementSet set = synth_set(model, {0, 1, 4}, 31, 4.0);
  OptimizerConfig cfg;
  cfg.xi = 1e-5;
  const RunResult run = fit(set, 1, cfg, 12345);
  CHECK(run.converged);
  CHECK(run.final_loss <= 1e-5);
}

TEST_CASE("threshold above initial loss converges without stepping") {
  SpectrumModel model{{{1.0, 0.0, 1.0}}, {}};
  const MeasurementSet set = synth_set(model, {0}, 11, 2.0);
  OptimizerConfig cfg;
  cfg.xi = 1e6;
  const RunResult run = fit(set, 1, cfg, 3);
  CHECK(run.converged);
  CHECK(run.iterations == 0);
}

TEST_CASE("identical seeds give identical runs") {
  SpectrumModel model{{{1.0, 1.5, 0.7}}, {}};
  const MeasurementSet set = synth_set(model, {0, 2}, 21, 3.0);
  OptimizerConfig cfg;
  cfg.max_iter = 300;
  cfg.max_restarts = 1;
  const RunResult a = fit(set, 2, cfg, 77);
  const RunResult b = fit(set, 2, cfg, 77);
  CHECK(a.theta.values == b.theta.values);
  CHECK(a.final_loss == b.final_loss);
  CHECK(a.iterations == b.iterations);
  CHECK(a.restarts_used == b.restarts_used);
  CHECK(a.converged == b.converged);
  CHECK(a.loss_history == b.loss_history);
}

TEST_CASE("converged flag matches the threshold exactly") {
  SpectrumModel model{{{1.0, 4.0, 1.0}}, {}};
  const MeasurementSet set = synth_set(model, {1}, 11, 3.0);
  OptimizerConfig cfg;
  cfg.max_iter = 50;
  cfg.max_restarts = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RunResult run = fit(set, 1, cfg, seed);
    CHECK(run.converged == (run.final_loss <= cfg.xi));
  }
}

TEST_CASE("loss trend is windowed-nonincreasing in most smoke runs") {
  Rng rng(31);
  int ok = 0, total = 0;
  for (int trial = 0; trial < 10; ++trial) {
    SpectrumModel model{
        {{rng.uniform(0.5, 3.0), rng.uniform(0.0, 6.0), rng.uniform(0.3, 2.0)}},
        {}};
    const MeasurementSet set = synth_set(model, {0, 2}, 15, 3.0);
    OptimizerConfig cfg;
    cfg.max_iter = 200;
    cfg.max_restarts = 0;
    cfg.xi = 1e-12;  // force a full trajectory
    const RunResult run = fit(set, 1, cfg, rng.next_u64());
    const auto& h = run.loss_history;
    for (std::size_t i = 0; i + 50 < h.size(); i += 50) {
      ++total;
      if (h[i + 50] <= h[i] * (1.0 + 1e-9)) ++ok;
    }
  }
  CHECK(ok >= static_cast<int>(0.9 * total));
}

TEST_CASE("presets carry the documented profiles") {
  const OptimizerConfig fig3 = preset_config("fig3cd");
  CHECK(fig3.algorithm == Algorithm::kAdamW);
  CHECK(fig3.lr == 0.01);
  CHECK(fig3.eps == 1e-6);
  CHECK(fig3.weight_decay == 0.01);
  CHECK(fig3.beta1 == 0.9);
  CHECK(fig3.beta2 == 0.9);
  CHECK_THROWS_AS(preset_config("nope"), InvalidArgumentError);
}
