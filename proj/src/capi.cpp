#include "vqns/vqns.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "core/attenuation.hpp"
#include "core/commands.hpp"
#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/filter.hpp"
#include "core/io.hpp"
#include "core/optimizer.hpp"

struct vqns_spectrum {
  vqns::SpectrumModel model;
};

struct vqns_measurements {
  vqns::MeasurementSet set;
};

struct vqns_ensemble {
  vqns::EnsembleResult result;
};

namespace {

thread_local std::string g_last_error;

vqns_status fail(vqns_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Maps the C++ exception hierarchy onto status codes; every API entry point
// funnels through this.
template <typename Fn>
vqns_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VQNS_OK;
  } catch (const vqns::InvalidArgumentError& e) {
    return fail(VQNS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const vqns::ToleranceError& e) {
    return fail(VQNS_ERR_TOLERANCE, e.what());
  } catch (const vqns::DivergenceError& e) {
    return fail(VQNS_ERR_DIVERGENCE, e.what());
  } catch (const vqns::OverflowGuardError& e) {
    return fail(VQNS_ERR_OVERFLOW_GUARD, e.what());
  } catch (const vqns::ParseError& e) {
    return fail(VQNS_ERR_PARSE, e.what());
  } catch (const vqns::IoError& e) {
    return fail(VQNS_ERR_IO, e.what());
  } catch (const vqns::AllRunsFailedError& e) {
    return fail(VQNS_ERR_ALL_RUNS_FAILED, e.what());
  } catch (const std::exception& e) {
    return fail(VQNS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VQNS_ERR_INTERNAL, "unknown error");
  }
}

vqns_status require(bool ok, const char* message) {
  return ok ? VQNS_OK : fail(VQNS_ERR_INVALID_ARGUMENT, message);
}

}  // namespace

extern "C" {

const char* vqns_last_error(void) { return g_last_error.c_str(); }

vqns_status vqns_spectrum_create(const double* terms, size_t n_terms,
                                 vqns_spectrum** out) {
  if (auto s = require(out && (terms || n_terms == 0), "null argument"))
    return s;
  return guarded([&] {
    auto spectrum = std::make_unique<vqns_spectrum>();
    spectrum->model.terms.reserve(n_terms);
    for (size_t i = 0; i < n_terms; ++i)
      spectrum->model.terms.push_back(
          {terms[3 * i], terms[3 * i + 1], terms[3 * i + 2]});
    vqns::validate(spectrum->model);
    *out = spectrum.release();
  });
}

void vqns_spectrum_free(vqns_spectrum* spectrum) { delete spectrum; }

vqns_status vqns_spectrum_eval(const vqns_spectrum* spectrum,
                               const double* omega, size_t n, double* out) {
  if (auto s = require(spectrum && omega && out, "null argument")) return s;
  return guarded([&] {
    for (size_t i = 0; i < n; ++i)
      out[i] = vqns::eval_spectrum(spectrum->model, omega[i]);
  });
}

vqns_status vqns_filter_function(int n_pulses, double omega, double t,
                                 double* out) {
  if (auto s = require(out && n_pulses >= 0 && t >= 0.0, "bad argument"))
    return s;
  return guarded(
      [&] { *out = vqns::filter_function({n_pulses}, omega, t); });
}

vqns_status vqns_chi_analytic(const vqns_spectrum* spectrum, int n_pulses,
                              double t, double* out) {
  if (auto s = require(spectrum && out && n_pulses >= 0, "bad argument"))
    return s;
  return guarded(
      [&] { *out = vqns::chi_analytic(spectrum->model, {n_pulses}, t); });
}

vqns_status vqns_chi_quadrature(const vqns_spectrum* spectrum, int n_pulses,
                                double t, double abs_tol, double rel_tol,
                                double* out) {
  if (auto s = require(spectrum && out && n_pulses >= 0, "bad argument"))
    return s;
  return guarded([&] {
    vqns::QuadratureConfig cfg;
    if (abs_tol > 0.0) cfg.abs_tol = abs_tol;
    if (rel_tol > 0.0) cfg.rel_tol = rel_tol;
    *out = vqns::chi_quadrature(spectrum->model, {n_pulses}, t, cfg);
  });
}

vqns_status vqns_coherence(const vqns_spectrum* spectrum, int n_pulses,
                           const double* times, size_t n, double* out) {
  if (auto s = require(spectrum && times && out && n_pulses >= 0,
                       "bad argument"))
    return s;
  return guarded([&] {
    const std::vector<double> ts(times, times + n);
    const auto values = vqns::coherence(spectrum->model, {n_pulses}, ts);
    std::memcpy(out, values.values.data(), n * sizeof(double));
  });
}

vqns_status vqns_measurements_create(vqns_measurements** out) {
  if (auto s = require(out != nullptr, "null argument")) return s;
  return guarded([&] { *out = new vqns_measurements(); });
}

vqns_status vqns_measurements_load(const char* manifest_path,
                                   vqns_measurements** out) {
  if (auto s = require(manifest_path && out, "null argument")) return s;
  return guarded([&] {
    auto set = std::make_unique<vqns_measurements>();
    set->set = vqns::parse_manifest(manifest_path);
    *out = set.release();
  });
}

vqns_status vqns_measurements_add_curve(vqns_measurements* set, int n_pulses,
                                        const double* times,
                                        const double* values, size_t n) {
  if (auto s = require(set && times && values && n_pulses >= 0 && n >= 2,
                       "bad argument"))
    return s;
  return guarded([&] {
    vqns::CoherenceCurve curve;
    curve.seq.n_pulses = n_pulses;
    curve.times.assign(times, times + n);
    curve.values.assign(values, values + n);
    vqns::validate(curve);
    set->set.curves.push_back(std::move(curve));
  });
}

vqns_status vqns_measurements_curve_count(const vqns_measurements* set,
                                          size_t* out) {
  if (auto s = require(set && out, "null argument")) return s;
  *out = set->set.curves.size();
  g_last_error.clear();
  return VQNS_OK;
}

void vqns_measurements_free(vqns_measurements* set) { delete set; }

vqns_status vqns_run_ensemble(const vqns_measurements* set, int n_basis,
                              const char* optimizer_json, int n_runs,
                              uint64_t seed, const double* omega_grid,
                              size_t grid_len, int threads,
                              vqns_ensemble** out) {
  if (auto s = require(set && optimizer_json && omega_grid && out &&
                           n_basis >= 1 && n_runs >= 1 && grid_len >= 1,
                       "bad argument"))
    return s;
  return guarded([&] {
    nlohmann::json cfg_json;
    try {
      cfg_json = nlohmann::json::parse(optimizer_json);
    } catch (const nlohmann::json::exception& e) {
      throw vqns::ParseError(std::string("optimizer config: ") + e.what(), 0,
                             0);
    }
    auto [cfg, echo] = vqns::resolve_optimizer(cfg_json);
    (void)echo;
    const std::vector<double> grid(omega_grid, omega_grid + grid_len);
    auto ensemble = std::make_unique<vqns_ensemble>();
    ensemble->result =
        vqns::run_ensemble(set->set, n_basis, cfg, n_runs, seed, grid, threads);
    *out = ensemble.release();
  });
}

vqns_status vqns_ensemble_stats(const vqns_ensemble* ensemble, double* mean,
                                double* std_dev) {
  if (auto s = require(ensemble && mean && std_dev, "null argument")) return s;
  const size_t n = ensemble->result.omega_grid.size();
  std::memcpy(mean, ensemble->result.mean.data(), n * sizeof(double));
  std::memcpy(std_dev, ensemble->result.std.data(), n * sizeof(double));
  g_last_error.clear();
  return VQNS_OK;
}

vqns_status vqns_ensemble_counts(const vqns_ensemble* ensemble, int* converged,
                                 int* failures) {
  if (auto s = require(ensemble && converged && failures, "null argument"))
    return s;
  int ok = 0;
  for (const auto& run : ensemble->result.runs)
    if (run.converged) ++ok;
  *converged = ok;
  *failures = ensemble->result.failures;
  g_last_error.clear();
  return VQNS_OK;
}

vqns_status vqns_ensemble_best_params(const vqns_ensemble* ensemble,
                                      double* params, size_t params_len) {
  if (auto s = require(ensemble && params, "null argument")) return s;
  const vqns::RunResult* best = nullptr;
  for (const auto& run : ensemble->result.runs) {
    if (!run.converged) continue;
    if (!best || run.final_loss < best->final_loss) best = &run;
  }
  if (!best) return fail(VQNS_ERR_ALL_RUNS_FAILED, "no converged run");
  if (params_len < best->theta.values.size())
    return fail(VQNS_ERR_INVALID_ARGUMENT, "params buffer too small");
  std::memcpy(params, best->theta.values.data(),
              best->theta.values.size() * sizeof(double));
  g_last_error.clear();
  return VQNS_OK;
}

void vqns_ensemble_free(vqns_ensemble* ensemble) { delete ensemble; }

vqns_status vqns_run_command_json(const char* config_json) {
  if (auto s = require(config_json != nullptr, "null argument")) return s;
  return guarded([&] {
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw vqns::ParseError(std::string("config: ") + e.what(), 0, 0);
    }
    vqns::run_command(cfg);
  });
}

vqns_status vqns_replay(const char* echo_path, const char* out_override) {
  if (auto s = require(echo_path != nullptr, "null argument")) return s;
  return guarded([&] {
    vqns::replay_command(echo_path, out_override ? out_override : "");
  });
}

}  // extern "C"
