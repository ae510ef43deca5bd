#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "core/cdual.hpp"
#include "core/quadrature.hpp"
#include "core/types.hpp"

namespace vqns {

// --- Closed-form attenuation -------------------------------------------
//
// For a symmetrized Lorentzian {B, d, omega_c} the noise autocorrelation is
// B*omega_c*Re[exp(-q|tau|)] with q = omega_c + i d, so
//
//   chi(t) = B*omega_c * Re[ I(q) ],
//   I(q)   = (1/2) integral_0^t integral_0^t s(t1) s(t2) exp(-q|t1-t2|)
//
// with s the +/-1 switching function of the pulse sequence. For the evenly
// spaced CPMG layout the double integral collapses to short geometric sums
// whose exponentials all have non-positive real exponents, so the
// evaluation never cancels exponentially large intermediates. The result is
// an algebraic rearrangement of the textbook even/odd CPMG closed forms and
// is cross-validated against quadrature of the filter-function integral.

// Shared shape factor I(q). T is std::complex<double> or CDual (derivative
// with respect to q). n_pulses == 0 gives the FID closed form.
template <typename T>
T chi_shape(const T& q, double t, int n_pulses);

// chi for one Lorentzian term under CPMG with n_pulses >= 1.
double chi_cpmg_analytic(const LorentzianTerm& term, int n_pulses, double t);

// FID closed form, chi = B*omega_c*Re[(qt - 1 + e^{-qt})/q^2]; matches the
// quadrature route to better than 1e-8 (see tests).
double chi_fid_analytic(const LorentzianTerm& term, double t);

// Dispatch on n_pulses (0 = FID).
double chi_analytic(const LorentzianTerm& term, int n_pulses, double t);

double chi_analytic(const SpectrumModel& model, const PulseSequence& seq,
                    double t);

struct ChiGrad {
  double chi = 0.0;
  double d_amplitude = 0.0;  // dchi/dB
  double d_center = 0.0;     // dchi/dd
  double d_width = 0.0;      // dchi/domega_c
};

ChiGrad chi_analytic_grad(const LorentzianTerm& term, int n_pulses, double t);

// --- Quadrature route (oracle / generic spectra) ------------------------

// chi = (1/2pi) integral_0^inf S(w) F(w t) dw for an even, nonnegative
// spectrum given as a callable. omega_max must be positive (cfg.omega_max,
// or pass a config from default_quadrature_config). The tail beyond
// omega_max is bounded analytically (S decaying at least like 1/w, filter
// bounded by 4(Np+1)^2/w^2) and folded into the error estimate only.
// Throws ToleranceError when the requested tolerance cannot be certified.
double chi_quadrature(const std::function<double(double)>& spectrum,
                      const PulseSequence& seq, double t,
                      const QuadratureConfig& cfg,
                      const std::vector<double>& spectrum_breakpoints = {});

// Convenience overload: Lorentzian model spectrum with automatic
// omega_max = 200 * max(omega_c_i + d_i) and breakpoints at the peaks.
double chi_quadrature(const SpectrumModel& model, const PulseSequence& seq,
                      double t, QuadratureConfig cfg = {});

QuadratureConfig default_quadrature_config(const SpectrumModel& model);

// --- Coherence -----------------------------------------------------------

struct CoherenceValues {
  std::vector<double> values;           // C(t_k) in (0, 1]
  std::vector<std::uint8_t> underflow;  // 1 where chi exceeded the clamp
};

// C(t_k) = exp(-chi(t_k)) via the analytic route for every term.
CoherenceValues coherence(const SpectrumModel& model, const PulseSequence& seq,
                          const std::vector<double>& times);

}  // namespace vqns
