#include "core/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "core/errors.hpp"
#include "core/seeding.hpp"

namespace vqns {

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n < 1 || !(hi >= lo))
    throw InvalidArgumentError("linear_grid: bad arguments");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo))
    throw InvalidArgumentError("log_grid: needs 0 < lo < hi");
  auto g = linear_grid(std::log(lo), std::log(hi), n);
  for (double& x : g) x = std::exp(x);
  return g;
}

std::vector<double> default_omega_grid() { return linear_grid(0.0, 20.0, 1001); }

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("VQNS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

EnsembleResult run_ensemble(const MeasurementSet& measured, int n_basis,
                            const OptimizerConfig& cfg, int n_runs,
                            std::uint64_t master_seed,
                            const std::vector<double>& omega_grid,
                            int threads) {
  if (n_runs < 1) throw InvalidArgumentError("run_ensemble: n_runs must be >= 1");
  for (std::size_t i = 1; i < omega_grid.size(); ++i)
    if (!(omega_grid[i] >= omega_grid[i - 1]))
      throw InvalidArgumentError("run_ensemble: omega_grid must be sorted");

  const FitObjective objective(measured);
  EnsembleResult result;
  result.omega_grid = omega_grid;
  result.runs.resize(n_runs);

  const int nthreads = std::min(resolve_threads(threads), n_runs);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= n_runs) break;
      result.runs[r] = fit(objective, n_basis, cfg,
                           derive_seed(master_seed, static_cast<std::uint64_t>(r)));
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Pointwise aggregation over converged runs only, in run-index order.
  const std::size_t g = omega_grid.size();
  result.mean.assign(g, 0.0);
  result.std.assign(g, 0.0);
  int converged = 0;
  std::vector<std::vector<double>> spectra;
  for (const auto& run : result.runs) {
    if (!run.converged) {
      ++result.failures;
      continue;
    }
    ++converged;
    const SpectrumModel model = run.theta.to_model();
    std::vector<double> s(g);
    for (std::size_t i = 0; i < g; ++i) s[i] = eval_spectrum(model, omega_grid[i]);
    spectra.push_back(std::move(s));
  }
  if (converged == 0)
    throw AllRunsFailedError("run_ensemble: no run converged (" +
                             std::to_string(result.failures) + " failures)");
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < g; ++i) result.mean[i] += s[i];
  for (std::size_t i = 0; i < g; ++i) result.mean[i] /= converged;
  for (const auto& s : spectra)
    for (std::size_t i = 0; i < g; ++i) {
      const double dev = s[i] - result.mean[i];
      result.std[i] += dev * dev;
    }
  for (std::size_t i = 0; i < g; ++i)
    result.std[i] = std::sqrt(result.std[i] / converged);
  return result;
}

StudyReport convergence_study_with_runner(const StudyRunner& runner,
                                          const std::vector<double>& xi_list,
                                          const std::vector<int>& n_basis_list,
                                          int n_runs,
                                          std::uint64_t master_seed) {
  if (xi_list.empty() || n_basis_list.empty() || n_runs < 1)
    throw InvalidArgumentError("convergence_study: empty inputs");
  const int max_failures = (n_runs + 1) / 2;  // ceil(n_runs / 2)
  StudyReport report;
  report.n_runs = n_runs;
  std::uint64_t cell_index = 0;
  for (double xi : xi_list) {
    for (int nb : n_basis_list) {
      StudyCell cell;
      cell.xi = xi;
      cell.n_basis = nb;
      const std::uint64_t cell_seed = derive_seed(master_seed, cell_index++);
      std::uint64_t attempt = 0;
      while (cell.successes < n_runs && cell.failures < max_failures) {
        auto [ok, secs] = runner(xi, nb, derive_seed(cell_seed, attempt++));
        cell.wall_time_s += secs;
        if (ok)
          ++cell.successes;
        else
          ++cell.failures;
      }
      cell.success = cell.successes >= n_runs;
      report.cells.push_back(cell);
    }
  }
  return report;
}

StudyReport convergence_study(const MeasurementSet& measured,
                              const std::vector<double>& xi_list,
                              const std::vector<int>& n_basis_list, int n_runs,
                              int max_iter, std::uint64_t master_seed,
                              const OptimizerConfig& base_cfg) {
  const FitObjective objective(measured);
  StudyRunner runner = [&](double xi, int nb, std::uint64_t seed) {
    OptimizerConfig cfg = base_cfg;
    cfg.xi = xi;
    cfg.max_iter = max_iter;
    cfg.max_restarts = 0;  // every attempt is one optimization cycle
    const RunResult run = fit(objective, nb, cfg, seed);
    return std::make_pair(run.converged, run.wall_time_s);
  };
  return convergence_study_with_runner(runner, xi_list, n_basis_list, n_runs,
                                       master_seed);
}

std::vector<EnsembleResult> subsample_study(
    const MeasurementSet& measured,
    const std::vector<std::vector<std::size_t>>& subsets, int n_basis,
    const OptimizerConfig& cfg, int n_runs, std::uint64_t master_seed,
    const std::vector<double>& omega_grid, int threads) {
  std::vector<EnsembleResult> results;
  results.reserve(subsets.size());
  for (const auto& subset : subsets) {
    if (subset.empty())
      throw InvalidArgumentError("subsample_study: empty subset");
    MeasurementSet sub;
    sub.omega0_hz = measured.omega0_hz;
    for (std::size_t idx : subset) {
      if (idx >= measured.curves.size())
        throw InvalidArgumentError("subsample_study: curve index " +
                                   std::to_string(idx) + " out of range");
      sub.curves.push_back(measured.curves[idx]);
    }
    results.push_back(run_ensemble(sub, n_basis, cfg, n_runs, master_seed,
                                   omega_grid, threads));
  }
  return results;
}

}  // namespace vqns
