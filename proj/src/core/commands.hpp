#pragma once

#include <filesystem>
#include <string>

#include "core/optimizer.hpp"
#include "core/synthgen.hpp"

#include "json.hpp"

namespace vqns {

// Builds an analytic spectrum from a JSON description:
//   {"kind": "lorentzian-sum", "terms": [{"B":..,"d":..,"omega_c":..},...],
//    "omega0_hz": optional}
//   {"kind": "ohmic", "eta":.., "gamma":..}
//   {"kind": "one-over-f", "zeta":..}
AnalyticSpectrum spectrum_from_json(const nlohmann::json& doc);
nlohmann::json spectrum_to_json(const AnalyticSpectrum& spec);

// Resolves a --spectrum argument: the builtin names "ohmic" (eta=3.3,
// gamma=1.1) and "one-over-f" (zeta=6), or a path to a JSON config.
AnalyticSpectrum load_spectrum(const std::string& name_or_path);

// Resolves {"preset": ..., "lr": ..., "xi": ..., ...} (preset first, then
// field overrides) into an optimizer config plus the normalized JSON echo.
std::pair<OptimizerConfig, nlohmann::json> resolve_optimizer(
    const nlohmann::json& cfg);

// Executes one command described by a config object (key "command" selects
// simulate | fit | sensitivity | benchmark | subsample). Writes outputs
// plus config_echo.json into config["out"]; rerunning the echo reproduces
// every numeric output byte for byte. Throws on failure.
void run_command(const nlohmann::json& config);

// Loads a config echo and reruns it, optionally redirecting the output
// directory.
void replay_command(const std::filesystem::path& echo_path,
                    const std::string& out_override = "");

}  // namespace vqns
