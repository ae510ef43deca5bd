#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/ensemble.hpp"
#include "core/sensitivity.hpp"
#include "core/types.hpp"

namespace vqns {

inline constexpr int kManifestVersion = 1;

// 17 significant digits; enough to round-trip any double exactly.
std::string format_double(double x);

// Writes content to path via a temp file + rename so readers never observe
// a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

// --- Measurement input ----------------------------------------------------
//
// A manifest is a JSON file {"version": 1, "omega0_hz": optional,
// "curves": [{"path": ..., "sequence": {"n_pulses": ...}, "label": ...}],
// "notes": optional}. Curve paths resolve relative to the manifest.
// Curve files are comma-delimited text with a header row (t, C[, sigma])
// and '#' comment lines. When omega0_hz is present, file times are seconds
// and are converted to dimensionless t * (2 pi omega0_hz) on load.

MeasurementSet parse_manifest(const std::filesystem::path& path);

// Parses one curve file; sequence and label are filled by the caller.
CoherenceCurve parse_curve_file(const std::filesystem::path& path);

// Writes per-curve CSV files plus manifest.json into out_dir; returns the
// manifest path. Dimensionless values are converted back to seconds when
// set.omega0_hz is present, so write -> parse is the identity.
std::filesystem::path write_measurements(const MeasurementSet& set,
                                         const std::filesystem::path& out_dir);

// --- Result output ---------------------------------------------------------

// spectrum.csv: omega, mean, std. Frequencies are emitted in Hz when
// omega0_hz is set (omega_hz = omega * omega0_hz), dimensionless otherwise.
void write_spectrum_csv(const EnsembleResult& result,
                        const std::filesystem::path& path,
                        std::optional<double> omega0_hz = {});

// runs.json: per-run parameters, loss history, seed, convergence flag.
void write_runs_json(const EnsembleResult& result,
                     const std::filesystem::path& path);

// report.json: config echo, converged/failed counts, wall times.
void write_report_json(const EnsembleResult& result,
                       const std::string& config_echo_json,
                       const std::filesystem::path& path);

// sensitivity.csv: omega, one G column per sequence, sum.
void write_sensitivity_csv(const CoverageReport& report,
                           const std::filesystem::path& path);

// study.csv carries only the deterministic columns; wall times go to the
// timing JSON so the CSV is byte-identical across reruns.
void write_study_csv(const StudyReport& report,
                     const std::filesystem::path& path);

void write_study_timing_json(const StudyReport& report,
                             const std::filesystem::path& path);

}  // namespace vqns
