#include "core/commands.hpp"

#include <algorithm>
#include <cstdio>

#include "core/attenuation.hpp"
#include "core/ensemble.hpp"
#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/optimizer.hpp"
#include "core/sensitivity.hpp"

namespace vqns {

namespace fs = std::filesystem;
using nlohmann::json;

AnalyticSpectrum spectrum_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind"))
    throw InvalidArgumentError("spectrum config: missing 'kind'");
  const std::string kind = doc["kind"].get<std::string>();
  AnalyticSpectrum spec;
  if (kind == "lorentzian-sum") {
    spec.kind = SpectrumKind::kLorentzianSum;
    if (!doc.contains("terms") || !doc["terms"].is_array())
      throw InvalidArgumentError("spectrum config: missing 'terms'");
    for (const auto& t : doc["terms"])
      spec.model.terms.push_back({t.at("B").get<double>(),
                                  t.at("d").get<double>(),
                                  t.at("omega_c").get<double>()});
    if (doc.contains("omega0_hz"))
      spec.model.omega0_hz = doc["omega0_hz"].get<double>();
  } else if (kind == "ohmic") {
    spec.kind = SpectrumKind::kOhmic;
    spec.eta = doc.at("eta").get<double>();
    spec.gamma = doc.at("gamma").get<double>();
  } else if (kind == "one-over-f") {
    spec.kind = SpectrumKind::kOneOverF;
    spec.zeta = doc.at("zeta").get<double>();
  } else {
    throw InvalidArgumentError("spectrum config: unknown kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

json spectrum_to_json(const AnalyticSpectrum& spec) {
  json doc;
  switch (spec.kind) {
    case SpectrumKind::kLorentzianSum: {
      doc["kind"] = "lorentzian-sum";
      doc["terms"] = json::array();
      for (const auto& t : spec.model.terms)
        doc["terms"].push_back(
            {{"B", t.amplitude}, {"d", t.center}, {"omega_c", t.width}});
      if (spec.model.omega0_hz) doc["omega0_hz"] = *spec.model.omega0_hz;
      break;
    }
    case SpectrumKind::kOhmic:
      doc["kind"] = "ohmic";
      doc["eta"] = spec.eta;
      doc["gamma"] = spec.gamma;
      break;
    case SpectrumKind::kOneOverF:
      doc["kind"] = "one-over-f";
      doc["zeta"] = spec.zeta;
      break;
  }
  return doc;
}

AnalyticSpectrum load_spectrum(const std::string& name_or_path) {
  if (name_or_path == "ohmic") {
    AnalyticSpectrum spec;
    spec.kind = SpectrumKind::kOhmic;
    spec.eta = 3.3;
    spec.gamma = 1.1;
    return spec;
  }
  if (name_or_path == "one-over-f") {
    AnalyticSpectrum spec;
    spec.kind = SpectrumKind::kOneOverF;
    spec.zeta = 6.0;
    return spec;
  }
  json doc;
  try {
    doc = json::parse(read_file(name_or_path));
  } catch (const json::exception& e) {
    throw ParseError("spectrum config '" + name_or_path + "': " + e.what(), 0,
                     0);
  }
  return spectrum_from_json(doc);
}

namespace {

template <typename T>
T get_or(const json& cfg, const std::string& key, T fallback) {
  if (!cfg.contains(key)) return fallback;
  return cfg[key].get<T>();
}

AnalyticSpectrum resolve_spectrum(const json& value) {
  if (value.is_string()) return load_spectrum(value.get<std::string>());
  return spectrum_from_json(value);
}

// Accepts {"kind":"linear"|"log","lo":..,"hi":..,"n":..} or the compact
// strings "lo:hi:n" and "log:lo:hi:n"; returns the normalized object form.
json normalize_grid(const json& value) {
  if (value.is_null())
    return {{"kind", "linear"}, {"lo", 0.0}, {"hi", 20.0}, {"n", 1001}};
  if (value.is_object()) {
    json g = value;
    if (!g.contains("kind")) g["kind"] = "linear";
    return g;
  }
  const std::string text = value.get<std::string>();
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  std::string kind = "linear";
  if (!parts.empty() && (parts[0] == "log" || parts[0] == "linear")) {
    kind = parts[0];
    parts.erase(parts.begin());
  }
  if (parts.size() != 3)
    throw InvalidArgumentError("grid: expected [log:]lo:hi:n, got '" + text +
                               "'");
  return {{"kind", kind},
          {"lo", std::stod(parts[0])},
          {"hi", std::stod(parts[1])},
          {"n", std::stoi(parts[2])}};
}

std::vector<double> build_grid(const json& g) {
  const std::size_t n = g.at("n").get<std::size_t>();
  const double lo = g.at("lo").get<double>();
  const double hi = g.at("hi").get<double>();
  return g.at("kind").get<std::string>() == "log" ? log_grid(lo, hi, n)
                                                  : linear_grid(lo, hi, n);
}

}  // namespace

// Resolves preset + overrides into a full optimizer config and returns the
// normalized JSON actually used (so the echo replays exactly).
std::pair<OptimizerConfig, json> resolve_optimizer(const json& cfg) {
  OptimizerConfig ocfg;
  if (cfg.contains("preset"))
    ocfg = preset_config(cfg["preset"].get<std::string>());
  if (cfg.contains("algorithm")) {
    const std::string a = cfg["algorithm"].get<std::string>();
    if (a == "adam")
      ocfg.algorithm = Algorithm::kAdam;
    else if (a == "adamw")
      ocfg.algorithm = Algorithm::kAdamW;
    else
      throw InvalidArgumentError("unknown algorithm '" + a + "'");
  }
  ocfg.lr = get_or(cfg, "lr", ocfg.lr);
  ocfg.beta1 = get_or(cfg, "beta1", ocfg.beta1);
  ocfg.beta2 = get_or(cfg, "beta2", ocfg.beta2);
  ocfg.eps = get_or(cfg, "eps", ocfg.eps);
  ocfg.weight_decay = get_or(cfg, "weight_decay", ocfg.weight_decay);
  ocfg.xi = get_or(cfg, "xi", ocfg.xi);
  ocfg.max_iter = get_or(cfg, "max_iter", ocfg.max_iter);
  ocfg.max_restarts = get_or(cfg, "max_restarts", ocfg.max_restarts);
  ocfg.width_floor = get_or(cfg, "width_floor", ocfg.width_floor);
  ocfg.validate();
  json echo = {
      {"algorithm", ocfg.algorithm == Algorithm::kAdam ? "adam" : "adamw"},
      {"lr", ocfg.lr},
      {"beta1", ocfg.beta1},
      {"beta2", ocfg.beta2},
      {"eps", ocfg.eps},
      {"weight_decay", ocfg.weight_decay},
      {"xi", ocfg.xi},
      {"max_iter", ocfg.max_iter},
      {"max_restarts", ocfg.max_restarts},
      {"width_floor", ocfg.width_floor}};
  return {ocfg, echo};
}

namespace {

// Fresh configs carry optimizer keys at the top level; config echoes carry
// the fully resolved settings under "optimizer". The nested form wins so a
// replay reproduces the original run exactly.
std::pair<OptimizerConfig, json> optimizer_from_config(const json& cfg) {
  return resolve_optimizer(cfg.contains("optimizer") ? cfg["optimizer"] : cfg);
}

void write_echo(const json& echo, const fs::path& out_dir) {
  write_file_atomic(out_dir / "config_echo.json", echo.dump(2) + "\n");
}

fs::path require_out(const json& cfg) {
  if (!cfg.contains("out"))
    throw InvalidArgumentError("missing required option 'out'");
  const fs::path out = cfg["out"].get<std::string>();
  fs::create_directories(out);
  return out;
}

SpectrumModel model_from_runs_json(const fs::path& runs_path) {
  json doc;
  try {
    doc = json::parse(read_file(runs_path));
  } catch (const json::exception& e) {
    throw ParseError("runs file '" + runs_path.string() + "': " + e.what(), 0,
                     0);
  }
  const json* best = nullptr;
  for (const auto& run : doc.at("runs")) {
    if (!run.at("converged").get<bool>()) continue;
    if (!best ||
        run.at("final_loss").get<double>() < best->at("final_loss").get<double>())
      best = &run;
  }
  if (!best)
    throw InvalidArgumentError("no converged run in " + runs_path.string());
  ParameterVector theta;
  theta.values = best->at("theta").get<std::vector<double>>();
  theta.n_basis = best->at("n_basis").get<int>();
  return theta.to_model();
}

void cmd_simulate(const json& cfg) {
  const fs::path out = require_out(cfg);
  if (!cfg.contains("spectrum"))
    throw InvalidArgumentError("simulate: missing 'spectrum'");
  const AnalyticSpectrum spec = resolve_spectrum(cfg["spectrum"]);
  if (!cfg.contains("pulses"))
    throw InvalidArgumentError("simulate: missing 'pulses'");
  const auto pulses = cfg["pulses"].get<std::vector<int>>();
  const int points = get_or(cfg, "points", 101);
  const double noise = get_or(cfg, "noise", 0.0);
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);

  std::vector<SimGrid> grids;
  for (int np : pulses) {
    PulseSequence seq{np};
    grids.push_back({seq, default_time_grid(spec, seq, points)});
  }
  NoiseSpec noise_spec{noise, seed};
  std::optional<int> downsample;
  if (cfg.contains("downsample")) downsample = cfg["downsample"].get<int>();
  const MeasurementSet set =
      simulate_measurements(spec, grids, noise_spec, downsample);
  write_measurements(set, out);

  json echo = {{"command", "simulate"},
               {"spectrum", spectrum_to_json(spec)},
               {"pulses", pulses},
               {"points", points},
               {"noise", noise},
               {"seed", seed},
               {"out", out.string()}};
  if (downsample) echo["downsample"] = *downsample;
  write_echo(echo, out);
}

void cmd_fit(const json& cfg) {
  const fs::path out = require_out(cfg);
  if (!cfg.contains("manifest"))
    throw InvalidArgumentError("fit: missing 'manifest'");
  const std::string manifest = cfg["manifest"].get<std::string>();
  const MeasurementSet measured = parse_manifest(manifest);
  const int n_basis = get_or(cfg, "nbasis", 3);
  const int n_runs = get_or(cfg, "nruns", 20);
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const int threads = get_or(cfg, "threads", 0);
  auto [ocfg, opt_echo] = optimizer_from_config(cfg);
  const json grid_cfg =
      normalize_grid(cfg.contains("grid") ? cfg["grid"] : json());
  const std::vector<double> grid = build_grid(grid_cfg);

  json echo = {{"command", "fit"},     {"manifest", manifest},
               {"nbasis", n_basis},    {"nruns", n_runs},
               {"seed", seed},         {"threads", threads},
               {"optimizer", opt_echo}, {"grid", grid_cfg},
               {"out", out.string()}};
  if (cfg.contains("preset")) echo["preset"] = cfg["preset"];

  const EnsembleResult result =
      run_ensemble(measured, n_basis, ocfg, n_runs, seed, grid, threads);
  write_spectrum_csv(result, out / "spectrum.csv", measured.omega0_hz);
  write_runs_json(result, out / "runs.json");
  write_report_json(result, echo.dump(), out / "report.json");
  write_echo(echo, out);
}

void cmd_sensitivity(const json& cfg) {
  const fs::path out = require_out(cfg);
  SpectrumModel model;
  if (cfg.contains("spectrum")) {
    const AnalyticSpectrum spec = resolve_spectrum(cfg["spectrum"]);
    if (spec.kind != SpectrumKind::kLorentzianSum)
      throw InvalidArgumentError(
          "sensitivity: spectrum must be a Lorentzian sum");
    model = spec.model;
  } else if (cfg.contains("spectrum-from")) {
    model = model_from_runs_json(
        fs::path(cfg["spectrum-from"].get<std::string>()) / "runs.json");
  } else {
    throw InvalidArgumentError(
        "sensitivity: need 'spectrum' or 'spectrum-from'");
  }
  if (!cfg.contains("sequences"))
    throw InvalidArgumentError("sensitivity: missing 'sequences'");
  const auto seq_np = cfg["sequences"].get<std::vector<int>>();
  std::vector<PulseSequence> sequences;
  for (int np : seq_np) sequences.push_back({np});
  const auto cand_np = get_or(cfg, "candidates", std::vector<int>{});
  std::vector<PulseSequence> candidates;
  for (int np : cand_np) candidates.push_back({np});

  std::vector<double> t_f = get_or(cfg, "tf-list", std::vector<double>{});
  if (t_f.empty())
    for (const auto& seq : sequences)
      t_f.push_back(default_horizon(model, seq));
  if (t_f.size() != sequences.size())
    throw InvalidArgumentError("sensitivity: tf-list length mismatch");
  std::vector<double> cand_tf =
      get_or(cfg, "candidate-tf-list", std::vector<double>{});
  if (cand_tf.empty())
    for (const auto& seq : candidates)
      cand_tf.push_back(default_horizon(model, seq));
  if (cand_tf.size() != candidates.size())
    throw InvalidArgumentError("sensitivity: candidate-tf-list length mismatch");

  const double fraction = get_or(cfg, "flag-fraction", 0.05);
  const json grid_cfg =
      normalize_grid(cfg.contains("grid") ? cfg["grid"] : json());
  const std::vector<double> grid = build_grid(grid_cfg);

  const CoverageReport report = coverage_report(
      model, sequences, t_f, grid, candidates, cand_tf, fraction);
  write_sensitivity_csv(report, out / "sensitivity.csv");

  json rec;
  rec["threshold"] = report.threshold;
  rec["flagged_regions"] = json::array();
  for (const auto& region : report.regions)
    rec["flagged_regions"].push_back(
        {{"omega_lo", report.omega_grid[region.first]},
         {"omega_hi", report.omega_grid[region.last]}});
  rec["ranking"] = json::array();
  for (const auto& entry : report.ranking)
    rec["ranking"].push_back({{"n_pulses", entry.seq.n_pulses},
                              {"t_f", entry.t_f},
                              {"score", entry.score}});
  if (!report.ranking.empty())
    rec["recommended_n_pulses"] = report.ranking.front().seq.n_pulses;
  write_file_atomic(out / "recommendation.json", rec.dump(2) + "\n");

  // Echo embeds the resolved spectrum so a replay is self-contained even
  // when the model came from a fit directory.
  AnalyticSpectrum resolved;
  resolved.model = model;
  json echo = {{"command", "sensitivity"},
               {"spectrum", spectrum_to_json(resolved)},
               {"sequences", seq_np},
               {"candidates", cand_np},
               {"tf-list", t_f},
               {"candidate-tf-list", cand_tf},
               {"flag-fraction", fraction},
               {"grid", grid_cfg},
               {"out", out.string()}};
  write_echo(echo, out);
}

void cmd_benchmark(const json& cfg) {
  const fs::path out = require_out(cfg);
  if (!cfg.contains("manifest"))
    throw InvalidArgumentError("benchmark: missing 'manifest'");
  const std::string manifest = cfg["manifest"].get<std::string>();
  const MeasurementSet measured = parse_manifest(manifest);
  if (!cfg.contains("xi-list") || !cfg.contains("nbasis-list"))
    throw InvalidArgumentError("benchmark: missing 'xi-list' or 'nbasis-list'");
  const auto xi_list = cfg["xi-list"].get<std::vector<double>>();
  const auto nbasis_list = cfg["nbasis-list"].get<std::vector<int>>();
  const int n_runs = get_or(cfg, "nruns", 20);
  const int max_iter = get_or(cfg, "max_iter", 10000);
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  auto [ocfg, opt_echo] = optimizer_from_config(cfg);

  const StudyReport report = convergence_study(measured, xi_list, nbasis_list,
                                               n_runs, max_iter, seed, ocfg);
  write_study_csv(report, out / "study.csv");
  write_study_timing_json(report, out / "study_timing.json");

  json echo = {{"command", "benchmark"}, {"manifest", manifest},
               {"xi-list", xi_list},     {"nbasis-list", nbasis_list},
               {"nruns", n_runs},        {"max_iter", max_iter},
               {"seed", seed},           {"optimizer", opt_echo},
               {"out", out.string()}};
  if (cfg.contains("preset")) echo["preset"] = cfg["preset"];
  write_echo(echo, out);
}

void cmd_subsample(const json& cfg) {
  const fs::path out = require_out(cfg);
  if (!cfg.contains("manifest"))
    throw InvalidArgumentError("subsample: missing 'manifest'");
  const std::string manifest = cfg["manifest"].get<std::string>();
  const MeasurementSet measured = parse_manifest(manifest);
  if (!cfg.contains("subsets"))
    throw InvalidArgumentError("subsample: missing 'subsets'");

  // Subsets come as nested arrays or the compact string "0,1,2;3,4".
  std::vector<std::vector<std::size_t>> subsets;
  if (cfg["subsets"].is_string()) {
    const std::string text = cfg["subsets"].get<std::string>();
    std::vector<std::size_t> current;
    std::string token;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || text[i] == ';' || text[i] == ',') {
        if (!token.empty()) {
          current.push_back(std::stoul(token));
          token.clear();
        }
        if ((i == text.size() || text[i] == ';') && !current.empty()) {
          subsets.push_back(current);
          current.clear();
        }
      } else {
        token += text[i];
      }
    }
  } else {
    subsets = cfg["subsets"].get<std::vector<std::vector<std::size_t>>>();
  }
  if (subsets.empty())
    throw InvalidArgumentError("subsample: empty subset list");

  const int n_basis = get_or(cfg, "nbasis", 3);
  const int n_runs = get_or(cfg, "nruns", 20);
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const int threads = get_or(cfg, "threads", 0);
  auto [ocfg, opt_echo] = optimizer_from_config(cfg);
  const json grid_cfg =
      normalize_grid(cfg.contains("grid") ? cfg["grid"] : json());
  const std::vector<double> grid = build_grid(grid_cfg);

  const std::vector<EnsembleResult> results = subsample_study(
      measured, subsets, n_basis, ocfg, n_runs, seed, grid, threads);
  for (std::size_t k = 0; k < results.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "subset_%02zu_spectrum.csv", k);
    write_spectrum_csv(results[k], out / name, measured.omega0_hz);
    std::snprintf(name, sizeof(name), "subset_%02zu_runs.json", k);
    write_runs_json(results[k], out / name);
  }

  json echo = {{"command", "subsample"}, {"manifest", manifest},
               {"subsets", subsets},     {"nbasis", n_basis},
               {"nruns", n_runs},        {"seed", seed},
               {"threads", threads},     {"optimizer", opt_echo},
               {"grid", grid_cfg},       {"out", out.string()}};
  if (cfg.contains("preset")) echo["preset"] = cfg["preset"];
  write_echo(echo, out);
}

}  // namespace

void run_command(const json& config) {
  if (!config.contains("command"))
    throw InvalidArgumentError("config: missing 'command'");
  const std::string command = config["command"].get<std::string>();
  if (command == "simulate")
    cmd_simulate(config);
  else if (command == "fit")
    cmd_fit(config);
  else if (command == "sensitivity")
    cmd_sensitivity(config);
  else if (command == "benchmark")
    cmd_benchmark(config);
  else if (command == "subsample")
    cmd_subsample(config);
  else
    throw InvalidArgumentError("unknown command '" + command + "'");
}

void replay_command(const fs::path& echo_path, const std::string& out_override) {
  json cfg;
  try {
    cfg = json::parse(read_file(echo_path));
  } catch (const json::exception& e) {
    throw ParseError("config echo '" + echo_path.string() + "': " + e.what(),
                     0, 0);
  }
  if (!out_override.empty()) cfg["out"] = out_override;
  run_command(cfg);
}

}  // namespace vqns
