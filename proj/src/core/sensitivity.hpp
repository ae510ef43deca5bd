#pragma once

#include <cstddef>
#include <vector>

#include "core/quadrature.hpp"
#include "core/types.hpp"

namespace vqns {

// Time-integrated sensitivity of one pulse sequence to spectral weight at
// omega: G(omega) = integral_0^{t_f} F_seq(omega, t) exp(-chi_seq(t)) dt,
// units time^3. High G means the sequence still resolves changes of the
// spectrum at that frequency within the measured window.
struct SensitivityCurve {
  PulseSequence seq;
  double t_f = 0.0;  // integration horizon, units 1/omega_0
  std::vector<double> omega_grid;
  std::vector<double> values;
};

SensitivityCurve sensitivity_curve(const SpectrumModel& spectrum,
                                   const PulseSequence& seq, double t_f,
                                   const std::vector<double>& omega_grid,
                                   const QuadratureConfig& cfg = {});

// Default horizon: the per-sequence window used in practice (3, 4, 5, 5, 6
// for 0, 1, 5, 8, 32 pulses), extended until the coherence under `spectrum`
// has dropped to 0.01.
double default_horizon(const SpectrumModel& spectrum, const PulseSequence& seq);

struct FlaggedRegion {
  std::size_t first = 0;  // inclusive grid-index range
  std::size_t last = 0;
};

struct CandidateScore {
  PulseSequence seq;
  double t_f = 0.0;
  double score = 0.0;  // integral of the candidate's G over flagged regions
};

struct CoverageReport {
  std::vector<double> omega_grid;
  std::vector<SensitivityCurve> curves;  // one per input sequence
  std::vector<double> summed;            // sum of the curves
  double threshold = 0.0;                // low_fraction * max(summed)
  std::vector<FlaggedRegion> regions;    // contiguous low-sensitivity runs
  std::vector<CandidateScore> ranking;   // descending score, ties by n_pulses
};

// Sums the per-sequence sensitivities, flags contiguous grid regions below
// low_fraction of the peak, and ranks candidate sequences by how much
// sensitivity they add inside the flagged regions. The top-ranked candidate
// is the recommended next measurement.
CoverageReport coverage_report(const SpectrumModel& spectrum,
                               const std::vector<PulseSequence>& sequences,
                               const std::vector<double>& t_f,
                               const std::vector<double>& omega_grid,
                               const std::vector<PulseSequence>& candidates,
                               const std::vector<double>& candidate_t_f,
                               double low_fraction = 0.05,
                               const QuadratureConfig& cfg = {});

}  // namespace vqns
