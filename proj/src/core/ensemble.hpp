#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/optimizer.hpp"
#include "core/types.hpp"

namespace vqns {

struct EnsembleResult {
  std::vector<double> omega_grid;
  std::vector<double> mean;  // pointwise mean over converged runs
  std::vector<double> std;   // pointwise population standard deviation
  std::vector<RunResult> runs;
  int failures = 0;  // non-converged runs (excluded from mean/std)
};

// Default reconstruction grid: 1001 uniform points on [0, 20].
std::vector<double> default_omega_grid();
std::vector<double> linear_grid(double lo, double hi, std::size_t n);
std::vector<double> log_grid(double lo, double hi, std::size_t n);

// N_runs independent fits with per-run seeds derived from master_seed,
// aggregated pointwise on omega_grid. Runs may execute concurrently
// (`threads` > 1); results are indexed by run, so aggregates are identical
// regardless of execution order. Throws AllRunsFailedError if no run
// converges.
EnsembleResult run_ensemble(const MeasurementSet& measured, int n_basis,
                            const OptimizerConfig& cfg, int n_runs,
                            std::uint64_t master_seed,
                            const std::vector<double>& omega_grid,
                            int threads = 0);

struct StudyCell {
  double xi = 0.0;
  int n_basis = 0;
  int successes = 0;
  int failures = 0;
  double wall_time_s = 0.0;  // informational only
  bool success = false;      // N_runs successes before ceil(N_runs/2) failures
};

struct StudyReport {
  std::vector<StudyCell> cells;
  int n_runs = 0;
};

// One optimization attempt; returns converged flag and elapsed seconds.
using StudyRunner =
    std::function<std::pair<bool, double>(double xi, int n_basis,
                                          std::uint64_t seed)>;

// Convergence benchmarking: for each (xi, n_basis) cell, attempts runs
// until n_runs successes or ceil(n_runs/2) failures, whichever first.
StudyReport convergence_study(const MeasurementSet& measured,
                              const std::vector<double>& xi_list,
                              const std::vector<int>& n_basis_list, int n_runs,
                              int max_iter, std::uint64_t master_seed,
                              const OptimizerConfig& base_cfg = {});

// Same mechanics with an injected runner (used by tests and by the public
// overload above).
StudyReport convergence_study_with_runner(const StudyRunner& runner,
                                          const std::vector<double>& xi_list,
                                          const std::vector<int>& n_basis_list,
                                          int n_runs,
                                          std::uint64_t master_seed);

// One ensemble per curve-index subset of `measured`.
std::vector<EnsembleResult> subsample_study(
    const MeasurementSet& measured,
    const std::vector<std::vector<std::size_t>>& subsets, int n_basis,
    const OptimizerConfig& cfg, int n_runs, std::uint64_t master_seed,
    const std::vector<double>& omega_grid, int threads = 0);

}  // namespace vqns
