#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "vqns/vqns.h"

#include "CLI11.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

int run(const json& config) {
  const std::string text = config.dump();
  const vqns_status status = vqns_run_command_json(text.c_str());
  if (status != VQNS_OK) {
    const json err = {{"error", static_cast<int>(status)},
                      {"message", vqns_last_error()}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}

void set_if(json& cfg, const std::string& key, const CLI::Option* opt,
            const json& value) {
  if (opt->count() > 0) cfg[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise spectroscopy from coherence decays: simulate "
               "measurements, fit Lorentzian spectra, rank follow-up pulse "
               "sequences."};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Generate coherence measurements from an analytic spectrum");
  std::string sim_spectrum, sim_out;
  std::vector<int> sim_pulses;
  int sim_points = 101, sim_downsample = 0;
  double sim_noise = 0.0;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--spectrum", sim_spectrum,
                       "Spectrum config path, or builtin 'ohmic'/'one-over-f'")
      ->required();
  simulate->add_option("--pulses", sim_pulses, "Pulse counts, e.g. 0,1,2,8")
      ->required()
      ->delimiter(',');
  simulate->add_option("--points", sim_points, "Time points per sequence");
  simulate->add_option("--noise", sim_noise, "Uniform noise half-width");
  simulate->add_option("--seed", sim_seed, "Master seed");
  auto* sim_ds_opt = simulate->add_option("--downsample", sim_downsample,
                                          "Downsample each grid to N points");
  simulate->add_option("--out", sim_out, "Output directory")->required();

  // fit
  auto* fit = app.add_subcommand(
      "fit", "Reconstruct a spectrum from measured coherence decays");
  std::string fit_manifest, fit_preset, fit_grid, fit_out;
  int fit_nbasis = 3, fit_nruns = 20, fit_threads = 0, fit_max_iter = 0,
      fit_max_restarts = -1;
  double fit_xi = 1e-5;
  std::uint64_t fit_seed = 0;
  fit->add_option("--manifest", fit_manifest, "Measurement manifest path")
      ->required();
  fit->add_option("--nbasis", fit_nbasis, "Number of basis Lorentzians");
  auto* fit_xi_opt =
      fit->add_option("--xi", fit_xi, "Loss convergence threshold");
  fit->add_option("--nruns", fit_nruns, "Ensemble size");
  auto* fit_preset_opt = fit->add_option(
      "--preset", fit_preset, "Optimizer preset (fig2, fig3cd, fig4, fig-ftns)");
  fit->add_option("--seed", fit_seed, "Master seed");
  auto* fit_grid_opt = fit->add_option(
      "--grid", fit_grid, "Frequency grid, [log:]lo:hi:n (default 0:20:1001)");
  auto* fit_mi_opt =
      fit->add_option("--max-iter", fit_max_iter, "Iterations per attempt");
  auto* fit_mr_opt = fit->add_option("--max-restarts", fit_max_restarts,
                                     "Restart budget per run");
  double fit_wfloor = 0.0;
  auto* fit_wf_opt = fit->add_option(
      "--width-floor", fit_wfloor, "Lower bound projected onto basis widths");
  fit->add_option("--threads", fit_threads,
                  "Worker threads (0 = VQNS_THREADS env or hardware)");
  fit->add_option("--out", fit_out, "Output directory")->required();

  // sensitivity
  auto* sens = app.add_subcommand(
      "sensitivity", "Sensitivity coverage and next-measurement ranking");
  std::string sens_spectrum, sens_from, sens_grid, sens_out;
  std::vector<int> sens_sequences, sens_candidates;
  std::vector<double> sens_tf, sens_cand_tf;
  double sens_fraction = 0.05;
  auto* sens_spec_opt = sens->add_option(
      "--spectrum", sens_spectrum, "Spectrum config (Lorentzian sum)");
  auto* sens_from_opt = sens->add_option(
      "--spectrum-from", sens_from, "Fit output directory (best run's model)");
  sens->add_option("--sequences", sens_sequences, "Measured pulse counts")
      ->required()
      ->delimiter(',');
  auto* sens_cand_opt =
      sens->add_option("--candidates", sens_candidates, "Candidate pulse counts")
          ->delimiter(',');
  auto* sens_tf_opt = sens->add_option("--tf-list", sens_tf,
                                       "Horizons per sequence (default auto)")
                          ->delimiter(',');
  auto* sens_ctf_opt =
      sens->add_option("--candidate-tf-list", sens_cand_tf,
                       "Horizons per candidate (default auto)")
          ->delimiter(',');
  auto* sens_frac_opt = sens->add_option(
      "--flag-fraction", sens_fraction, "Low-sensitivity threshold fraction");
  auto* sens_grid_opt =
      sens->add_option("--grid", sens_grid, "Frequency grid, [log:]lo:hi:n");
  sens->add_option("--out", sens_out, "Output directory")->required();

  // benchmark
  auto* bench = app.add_subcommand(
      "benchmark", "Convergence study over (xi, n_basis) cells");
  std::string bench_manifest, bench_preset, bench_out;
  std::vector<double> bench_xi;
  std::vector<int> bench_nbasis;
  int bench_nruns = 20, bench_max_iter = 10000;
  std::uint64_t bench_seed = 0;
  bench->add_option("--manifest", bench_manifest, "Measurement manifest path")
      ->required();
  bench->add_option("--xi-list", bench_xi, "Convergence thresholds")
      ->required()
      ->delimiter(',');
  bench->add_option("--nbasis-list", bench_nbasis, "Basis sizes")
      ->required()
      ->delimiter(',');
  bench->add_option("--nruns", bench_nruns, "Successes required per cell");
  bench->add_option("--max-iter", bench_max_iter, "Iterations per attempt");
  bench->add_option("--seed", bench_seed, "Master seed");
  auto* bench_preset_opt =
      bench->add_option("--preset", bench_preset, "Optimizer preset");
  bench->add_option("--out", bench_out, "Output directory")->required();

  // subsample
  auto* sub = app.add_subcommand(
      "subsample", "Fit ensembles on curve subsets (robustness check)");
  std::string sub_manifest, sub_subsets, sub_preset, sub_grid, sub_out;
  int sub_nbasis = 3, sub_nruns = 20, sub_threads = 0;
  double sub_xi = 1e-5;
  std::uint64_t sub_seed = 0;
  sub->add_option("--manifest", sub_manifest, "Measurement manifest path")
      ->required();
  sub->add_option("--subsets", sub_subsets,
                  "Curve index subsets, e.g. '0,1,2;3,4,5'")
      ->required();
  sub->add_option("--nbasis", sub_nbasis, "Number of basis Lorentzians");
  auto* sub_xi_opt = sub->add_option("--xi", sub_xi, "Convergence threshold");
  sub->add_option("--nruns", sub_nruns, "Ensemble size per subset");
  sub->add_option("--seed", sub_seed, "Master seed");
  auto* sub_preset_opt =
      sub->add_option("--preset", sub_preset, "Optimizer preset");
  auto* sub_grid_opt =
      sub->add_option("--grid", sub_grid, "Frequency grid, [log:]lo:hi:n");
  sub->add_option("--threads", sub_threads, "Worker threads");
  sub->add_option("--out", sub_out, "Output directory")->required();

  // replay
  auto* replay = app.add_subcommand(
      "replay", "Rerun a command from its config_echo.json");
  std::string replay_config, replay_out;
  replay->add_option("--config", replay_config, "Path to config_echo.json")
      ->required();
  auto* replay_out_opt =
      replay->add_option("--out", replay_out, "Override output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (simulate->parsed()) {
    json cfg = {{"command", "simulate"}, {"spectrum", sim_spectrum},
                {"pulses", sim_pulses},  {"points", sim_points},
                {"noise", sim_noise},    {"seed", sim_seed},
                {"out", sim_out}};
    set_if(cfg, "downsample", sim_ds_opt, sim_downsample);
    return run(cfg);
  }
  if (fit->parsed()) {
    json cfg = {{"command", "fit"},   {"manifest", fit_manifest},
                {"nbasis", fit_nbasis}, {"nruns", fit_nruns},
                {"seed", fit_seed},   {"threads", fit_threads},
                {"out", fit_out}};
    set_if(cfg, "xi", fit_xi_opt, fit_xi);
    set_if(cfg, "preset", fit_preset_opt, fit_preset);
    set_if(cfg, "grid", fit_grid_opt, fit_grid);
    set_if(cfg, "max_iter", fit_mi_opt, fit_max_iter);
    set_if(cfg, "max_restarts", fit_mr_opt, fit_max_restarts);
    set_if(cfg, "width_floor", fit_wf_opt, fit_wfloor);
    return run(cfg);
  }
  if (sens->parsed()) {
    json cfg = {{"command", "sensitivity"},
                {"sequences", sens_sequences},
                {"out", sens_out}};
    set_if(cfg, "spectrum", sens_spec_opt, sens_spectrum);
    set_if(cfg, "spectrum-from", sens_from_opt, sens_from);
    set_if(cfg, "candidates", sens_cand_opt, sens_candidates);
    set_if(cfg, "tf-list", sens_tf_opt, sens_tf);
    set_if(cfg, "candidate-tf-list", sens_ctf_opt, sens_cand_tf);
    set_if(cfg, "flag-fraction", sens_frac_opt, sens_fraction);
    set_if(cfg, "grid", sens_grid_opt, sens_grid);
    return run(cfg);
  }
  if (bench->parsed()) {
    json cfg = {{"command", "benchmark"},   {"manifest", bench_manifest},
                {"xi-list", bench_xi},      {"nbasis-list", bench_nbasis},
                {"nruns", bench_nruns},     {"max_iter", bench_max_iter},
                {"seed", bench_seed},       {"out", bench_out}};
    set_if(cfg, "preset", bench_preset_opt, bench_preset);
    return run(cfg);
  }
  if (sub->parsed()) {
    json cfg = {{"command", "subsample"}, {"manifest", sub_manifest},
                {"subsets", sub_subsets}, {"nbasis", sub_nbasis},
                {"nruns", sub_nruns},     {"seed", sub_seed},
                {"threads", sub_threads}, {"out", sub_out}};
    set_if(cfg, "xi", sub_xi_opt, sub_xi);
    set_if(cfg, "preset", sub_preset_opt, sub_preset);
    set_if(cfg, "grid", sub_grid_opt, sub_grid);
    return run(cfg);
  }
  if (replay->parsed()) {
    const vqns_status status = vqns_replay(
        replay_config.c_str(),
        replay_out_opt->count() > 0 ? replay_out.c_str() : nullptr);
    if (status != VQNS_OK) {
      const json err = {{"error", static_cast<int>(status)},
                        {"message", vqns_last_error()}};
      std::fprintf(stderr, "%s\n", err.dump().c_str());
      return 1;
    }
    return 0;
  }
  return 2;
}
