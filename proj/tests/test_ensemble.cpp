#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/attenuation.hpp"
#include "core/ensemble.hpp"
#include "core/errors.hpp"

using namespace vqns;

namespace {

MeasurementSet one_term_set() {
  SpectrumModel model{{{1.2, 1.0, 0.8}}, {}};
  MeasurementSet set;
  for (int np : {0, 1, 4}) {
    CoherenceCurve curve;
    curve.seq.n_pulses = np;
    for (int k = 0; k < 21; ++k) curve.times.push_back(4.0 * k / 20);
    curve.values = coherence(model, curve.seq, curve.times).values;
    set.curves.push_back(std::move(curve));
  }
  return set;
}

}  // namespace

TEST_CASE("grids") {
  const auto lin = linear_grid(0.0, 10.0, 11);
  CHECK(lin.front() == 0.0);
  CHECK(lin.back() == 10.0);
  CHECK(lin[3] == doctest::Approx(3.0));
  const auto lg = log_grid(0.1, 10.0, 5);
  CHECK(lg.front() == doctest::Approx(0.1));
  CHECK(lg.back() == doctest::Approx(10.0));
  CHECK(lg[2] == doctest::Approx(1.0));
  CHECK(default_omega_grid().size() == 1001);
  CHECK(default_omega_grid().back() == doctest::Approx(20.0));
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), InvalidArgumentError);
}

TEST_CASE("single-run ensemble has zero std") {
  const MeasurementSet set = one_term_set();
  OptimizerConfig cfg;
  cfg.max_iter = 2000;
  const auto grid = linear_grid(0.0, 10.0, 51);
  const EnsembleResult result = run_ensemble(set, 1, cfg, 1, 5, grid, 1);
  for (double s : result.std) CHECK(s == 0.0);
  CHECK(result.runs.size() == 1);
}

TEST_CASE("ensembles are deterministic and thread-count independent") {
  const MeasurementSet set = one_term_set();
  OptimizerConfig cfg;
  cfg.xi = 1e-4;
  cfg.max_iter = 3000;
  cfg.max_restarts = 0;
  const auto grid = linear_grid(0.0, 10.0, 41);
  const EnsembleResult serial = run_ensemble(set, 1, cfg, 4, 17, grid, 1);
  const EnsembleResult again = run_ensemble(set, 1, cfg, 4, 17, grid, 1);
  const EnsembleResult threaded = run_ensemble(set, 1, cfg, 4, 17, grid, 4);
  CHECK(serial.mean == again.mean);
  CHECK(serial.std == again.std);
  CHECK(serial.mean == threaded.mean);
  CHECK(serial.std == threaded.std);
}

TEST_CASE("aggregates match an independent recomputation") {
  const MeasurementSet set = one_term_set();
  OptimizerConfig cfg;
  cfg.max_iter = 1500;
  const auto grid = linear_grid(0.0, 8.0, 17);
  const EnsembleResult result = run_ensemble(set, 1, cfg, 5, 3, grid, 1);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0.0;
    int n = 0;
    for (const auto& run : result.runs) {
      if (!run.converged) continue;
      mean += eval_spectrum(run.theta.to_model(), grid[i]);
      ++n;
    }
    REQUIRE(n > 0);
    mean /= n;
    double var = 0.0;
    for (const auto& run : result.runs) {
      if (!run.converged) continue;
      const double dev = eval_spectrum(run.theta.to_model(), grid[i]) - mean;
      var += dev * dev;
    }
    CHECK(std::abs(result.mean[i] - mean) <= 1e-12 * std::max(1.0, mean));
    CHECK(std::abs(result.std[i] - std::sqrt(var / n)) <= 1e-12);
  }
}

TEST_CASE("all-failed ensemble throws") {
  const MeasurementSet set = one_term_set();
  OptimizerConfig cfg;
  cfg.xi = 1e-30;  // unreachable
  cfg.max_iter = 5;
  cfg.max_restarts = 0;
  CHECK_THROWS_AS(
      run_ensemble(set, 1, cfg, 3, 1, linear_grid(0, 5, 11), 1),
      AllRunsFailedError);
}

TEST_CASE("study mechanics with stub runners") {
  const std::vector<double> xis = {1e-4, 1e-5};
  const std::vector<int> sizes = {1, 2, 3};

  StudyRunner always = [](double, int, std::uint64_t) {
    return std::make_pair(true, 0.001);
  };
  StudyReport report = convergence_study_with_runner(always, xis, sizes, 20, 9);
  CHECK(report.cells.size() == 6);
  for (const auto& cell : report.cells) {
    CHECK(cell.successes == 20);
    CHECK(cell.failures == 0);
    CHECK(cell.success);
  }

  StudyRunner never = [](double, int, std::uint64_t) {
    return std::make_pair(false, 0.001);
  };
  report = convergence_study_with_runner(never, xis, sizes, 20, 9);
  for (const auto& cell : report.cells) {
    CHECK(cell.successes == 0);
    CHECK(cell.failures == 10);  // ceil(20/2) failures, then stop
    CHECK_FALSE(cell.success);
  }

  // Seed-dependent runner: accounting always balances.
  StudyRunner flaky = [](double, int, std::uint64_t seed) {
    return std::make_pair(seed % 3 != 0, 0.001);
  };
  report = convergence_study_with_runner(flaky, xis, sizes, 6, 9);
  for (const auto& cell : report.cells) {
    CHECK(cell.successes + cell.failures >= 1);
    CHECK(cell.success == (cell.successes == 6));
    if (!cell.success) CHECK(cell.failures == 3);
  }
}

TEST_CASE("subsample study basics") {
  const MeasurementSet set = one_term_set();
  OptimizerConfig cfg;
  cfg.xi = 1e-4;
  cfg.max_iter = 3000;
  const auto grid = linear_grid(0.0, 8.0, 17);

  const auto full = run_ensemble(set, 1, cfg, 2, 21, grid, 1);
  const auto studies =
      subsample_study(set, {{0, 1, 2}, {0}, {1}}, 1, cfg, 2, 21, grid, 1);
  CHECK(studies.size() == 3);
  CHECK(studies[0].mean == full.mean);
  CHECK(studies[0].std == full.std);

  CHECK_THROWS_AS(
      subsample_study(set, {{9}}, 1, cfg, 1, 0, grid, 1),
      InvalidArgumentError);
}
