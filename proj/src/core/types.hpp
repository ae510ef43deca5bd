#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vqns {

// Lower bound for Lorentzian half-widths; keeps basis terms from collapsing
// into delta-like spikes during optimization.
inline constexpr double kOmegaCFloor = 1e-6;

// Clamp applied to the attenuation exponent before exp(-chi).
inline constexpr double kChiClamp = 700.0;

// One symmetrized Lorentzian. All quantities are dimensionless: frequencies
// in units of the reference frequency omega_0, amplitudes in 1/omega_0.
struct LorentzianTerm {
  double amplitude = 0.0;  // B >= 0
  double center = 0.0;     // d >= 0
  double width = 1.0;      // omega_c >= kOmegaCFloor
};

// Sum of symmetrized Lorentzians; the trial spectrum of the variational fit.
struct SpectrumModel {
  std::vector<LorentzianTerm> terms;
  std::optional<double> omega0_hz;  // physical scale, only used at IO edges
};

// Throws InvalidArgumentError if an invariant is violated.
void validate(const LorentzianTerm& term);
void validate(const SpectrumModel& model);

// S(omega) = sum_i B_i [wc^2/(wc^2+(w-d)^2) + wc^2/(wc^2+(w+d)^2)].
double eval_spectrum(const SpectrumModel& model, double omega);

// FID (0 pulses), SE (1), or CPMG with n_pulses equally spaced pi-pulses.
struct PulseSequence {
  int n_pulses = 0;
  bool is_fid() const { return n_pulses == 0; }
};

// One measured (or simulated) coherence decay.
struct CoherenceCurve {
  PulseSequence seq;
  std::vector<double> times;   // strictly increasing, >= 0, units 1/omega_0
  std::vector<double> values;  // coherences in [0, 1]
  std::vector<double> sigma;   // optional per-point uncertainty, may be empty
  std::string label;
};

void validate(const CoherenceCurve& curve);

struct MeasurementSet {
  std::vector<CoherenceCurve> curves;
  std::optional<double> omega0_hz;
};

void validate(const MeasurementSet& set);

}  // namespace vqns
