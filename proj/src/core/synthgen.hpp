#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/quadrature.hpp"
#include "core/types.hpp"

namespace vqns {

// Ground-truth spectra for simulated experiments: an explicit Lorentzian
// sum, an Ohmic spectrum eta*|w|/(w^2 + gamma^2), or a 1/f spectrum
// zeta/|w| (divergent at w = 0).
enum class SpectrumKind { kLorentzianSum, kOhmic, kOneOverF };

struct AnalyticSpectrum {
  SpectrumKind kind = SpectrumKind::kLorentzianSum;
  SpectrumModel model;  // lorentzian-sum only
  double eta = 0.0;     // ohmic coupling
  double gamma = 0.0;   // ohmic cutoff rate
  double zeta = 0.0;    // 1/f coupling
};

void validate(const AnalyticSpectrum& spec);

// Throws DivergenceError for the 1/f spectrum at omega = 0.
double eval_analytic(const AnalyticSpectrum& spec, double omega);

struct NoiseSpec {
  double epsilon = 0.0;  // additive noise u ~ U[-eps, eps) per point
  std::uint64_t seed = 0;
};

struct SimGrid {
  PulseSequence seq;
  std::vector<double> times;  // strictly increasing, first may be 0
};

// n_points equally spaced times from 0, extended until the clean coherence
// has decayed to 0.01 (capped at t = 200).
std::vector<double> default_time_grid(const AnalyticSpectrum& spec,
                                      const PulseSequence& seq,
                                      int n_points = 101);

// Ground-truth coherences via quadrature of the spectral integral — never
// through the closed forms used by the fitting path, so roundtrip tests are
// not self-confirming. Additive uniform noise is clipped to [0, 1].
// Downsampling keeps the first and last time and picks equidistant indices.
// Rejects FID grids for 1/f spectra (the coherence integral diverges).
MeasurementSet simulate_measurements(const AnalyticSpectrum& spec,
                                     const std::vector<SimGrid>& grids,
                                     const NoiseSpec& noise,
                                     std::optional<int> downsample_to = {},
                                     const QuadratureConfig& cfg = {});

struct OuResult {
  std::vector<double> times;
  std::vector<double> values;      // |<e^{i phi}>| over trajectories
  std::vector<double> std_errors;  // per-point standard error
};

// Monte-Carlo coherence from Ornstein-Uhlenbeck dephasing noise with
// correlation rate omega_c and variance B*omega_c (the d = 0 Lorentzian).
// Each measurement time is an independent experiment with its own pulse
// schedule; dt_sim <= 0 selects min(0.01/omega_c, pulse interval/20).
OuResult ou_oracle(const LorentzianTerm& term, const PulseSequence& seq,
                   const std::vector<double>& times, int n_traj, double dt_sim,
                   std::uint64_t seed);

}  // namespace vqns
