#include "core/attenuation.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/filter.hpp"

namespace vqns {

namespace {

constexpr double kSeriesCutoff = 0.5;

// e^x - 1, series below the cutoff to avoid cancellation.
template <typename T>
T expm1_t(const T& x) {
  if (abs_value(x) >= kSeriesCutoff) return exp(x) - 1.0;
  T term = x;
  T sum = x;
  for (int n = 2; n <= 24; ++n) {
    term = term * x * (1.0 / n);
    sum = sum + term;
    if (abs_value(term) < 1e-20 * (abs_value(sum) + 1e-300)) break;
  }
  return sum;
}

// e^{-x} - 1 + x, series below the cutoff.
template <typename T>
T em1px_t(const T& x) {
  if (abs_value(x) >= kSeriesCutoff) return exp(-x) - 1.0 + x;
  T xn = x * x;  // (-1)^n x^n / n! with alternating handling below
  T term = xn * 0.5;
  T sum = term;
  double sign = -1.0;
  T pow = xn * x;
  double fact = 6.0;
  for (int n = 3; n <= 24; ++n) {
    term = pow * (sign / fact);
    sum = sum + term;
    if (abs_value(term) < 1e-20 * (abs_value(sum) + 1e-300)) break;
    pow = pow * x;
    fact *= (n + 1);
    sign = -sign;
  }
  return sum;
}

}  // namespace

template <typename T>
T chi_shape(const T& q, double t, int n_pulses) {
  if (t == 0.0) return T(0.0);
  if (n_pulses == 0) {
    const T x = q * t;
    return em1px_t(x) / (q * q);
  }
  const int np = n_pulses;
  const double h = t / np;
  const T xh = q * h;
  const T em_half = expm1_t(-(xh * 0.5));  // e^{-qh/2} - 1
  const T em_full = expm1_t(-xh);          // e^{-qh} - 1
  const T E = em_full + 1.0;               // e^{-qh}
  const T u = -em_half;                    // 1 - e^{-qh/2}
  const T U = -em_full;                    // 1 - e^{-qh}

  // Diagonal blocks: two half-length edge intervals plus np-1 interior ones.
  T diag = 4.0 * em1px_t(xh * 0.5) + (2.0 * (np - 1)) * em1px_t(xh);

  // Off-diagonal blocks, grouped by inter-interval gap (units of h).
  // S1: edge-to-interior (and, by symmetry, interior-to-edge).
  T s1(0.0);
  {
    T epow(1.0);
    double sign = -1.0;
    for (int m = 0; m <= np - 2; ++m) {
      s1 = s1 + sign * epow;
      epow = epow * E;
      sign = -sign;
    }
    // epow now holds E^{np-1}, reused below.
    const double edge_sign = (np % 2 == 0) ? 1.0 : -1.0;
    const T s2 = edge_sign * epow * (u * u);  // edge-to-edge
    s1 = (u * U) * s1;

    // S3: interior-to-interior pairs, np-1-g pairs at gap g.
    T s3(0.0);
    T egow(1.0);
    double gsign = -1.0;
    for (int g = 1; g <= np - 2; ++g) {
      s3 = s3 + (static_cast<double>(np - 1 - g) * gsign) * egow;
      egow = egow * E;
      gsign = -gsign;
    }
    s3 = (U * U) * s3;

    const T cross = 2.0 * s1 + s2 + s3;
    return (diag + 2.0 * cross) * 0.5 / (q * q);
  }
}

template std::complex<double> chi_shape(const std::complex<double>&, double,
                                        int);
template CDual chi_shape(const CDual&, double, int);

namespace {

double finish_chi(const LorentzianTerm& term,
                  const std::complex<double>& shape) {
  const double chi = term.amplitude * term.width * shape.real();
  if (!std::isfinite(chi))
    throw OverflowGuardError("chi_analytic: non-finite result");
  return chi;
}

}  // namespace

double chi_cpmg_analytic(const LorentzianTerm& term, int n_pulses, double t) {
  if (n_pulses < 1)
    throw InvalidArgumentError("chi_cpmg_analytic: n_pulses must be >= 1");
  if (t < 0.0) throw InvalidArgumentError("chi_cpmg_analytic: t must be >= 0");
  const std::complex<double> q(term.width, term.center);
  return finish_chi(term, chi_shape(q, t, n_pulses));
}

double chi_fid_analytic(const LorentzianTerm& term, double t) {
  if (t < 0.0) throw InvalidArgumentError("chi_fid_analytic: t must be >= 0");
  const std::complex<double> q(term.width, term.center);
  return finish_chi(term, chi_shape(q, t, 0));
}

double chi_analytic(const LorentzianTerm& term, int n_pulses, double t) {
  return n_pulses == 0 ? chi_fid_analytic(term, t)
                       : chi_cpmg_analytic(term, n_pulses, t);
}

double chi_analytic(const SpectrumModel& model, const PulseSequence& seq,
                    double t) {
  double chi = 0.0;
  for (const auto& term : model.terms)
    chi += chi_analytic(term, seq.n_pulses, t);
  return chi;
}

ChiGrad chi_analytic_grad(const LorentzianTerm& term, int n_pulses, double t) {
  const CDual q(std::complex<double>(term.width, term.center),
                std::complex<double>(1.0, 0.0));
  const CDual shape = chi_shape(q, t, n_pulses);
  const double re = shape.v.real();
  ChiGrad g;
  g.chi = term.amplitude * term.width * re;
  g.d_amplitude = term.width * re;
  g.d_width = term.amplitude * re + term.amplitude * term.width * shape.d.real();
  // dq/dd = i, so dchi/dd = B*wc*Re(i * dI/dq) = -B*wc*Im(dI/dq).
  g.d_center = -term.amplitude * term.width * shape.d.imag();
  if (!std::isfinite(g.chi))
    throw OverflowGuardError("chi_analytic_grad: non-finite result");
  return g;
}

namespace {

// Breakpoints aligned with the filter structure inside [lo, hi]: passband
// maxima at (2k+1) pi Np / t padded to width pi Np / (10 t) for CPMG, lobe
// boundaries at multiples of 2 pi / t for FID. Capped so panel counts stay
// bounded; the adaptive loop refines whatever the cap leaves unresolved.
void append_filter_breaks(const PulseSequence& seq, double t, double lo,
                          double hi, std::vector<double>& breaks) {
  constexpr std::size_t kMaxBreaks = 1500;
  if (seq.n_pulses >= 1) {
    const double spacing = 2.0 * M_PI * seq.n_pulses / t;
    const double pad = M_PI * seq.n_pulses / (10.0 * t);
    double wk = 0.5 * spacing;
    if (wk < lo) wk += spacing * std::ceil((lo - wk) / spacing);
    for (; wk < hi && breaks.size() < kMaxBreaks; wk += spacing) {
      breaks.push_back(wk - pad);
      breaks.push_back(wk);
      breaks.push_back(wk + pad);
      breaks.push_back(wk + 0.5 * spacing);  // zero between passbands
    }
  } else {
    const double spacing = 2.0 * M_PI / t;
    double wk = spacing * std::ceil(std::max(lo, spacing) / spacing);
    for (; wk < hi && breaks.size() < kMaxBreaks; wk += spacing)
      breaks.push_back(wk);
  }
}

// Upper estimate for the neglected tail beyond omega_hi. Uses the filter's
// period average (~6 Np / w^2; Fejer-kernel mean of the resonant factor)
// plus the FID envelope 4/w^2, and assumes S decays at least like 1/w.
double tail_estimate(const std::function<double(double)>& spectrum,
                     const PulseSequence& seq, double omega_hi) {
  const double favg = 6.0 * std::max(seq.n_pulses, 1) + 4.0;
  return favg / (2.0 * M_PI) * spectrum(omega_hi) / omega_hi;
}

}  // namespace

double chi_quadrature(const std::function<double(double)>& spectrum,
                      const PulseSequence& seq, double t,
                      const QuadratureConfig& cfg,
                      const std::vector<double>& spectrum_breakpoints) {
  if (t < 0.0) throw InvalidArgumentError("chi_quadrature: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (!(cfg.omega_max > 0.0))
    throw InvalidArgumentError("chi_quadrature: omega_max must be > 0");

  const double inv_2pi = 1.0 / (2.0 * M_PI);
  auto integrand = [&](double w) {
    return inv_2pi * spectrum(w) * filter_function(seq, w, t);
  };

  std::vector<double> breaks = spectrum_breakpoints;
  append_filter_breaks(seq, t, 0.0, cfg.omega_max, breaks);

  QuadratureResult res =
      integrate_adaptive(integrand, 0.0, cfg.omega_max, breaks, cfg.abs_tol,
                         cfg.rel_tol, cfg.max_subdivisions);
  double value = res.value;
  double quad_err = res.error;
  double hi = cfg.omega_max;

  // Extend the truncation point until the analytic tail bound is small
  // against the tolerance actually needed for this value.
  double tail = tail_estimate(spectrum, seq, hi);
  for (int round = 0; round < 10; ++round) {
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
    if (tail <= 0.5 * tol) break;
    const double hi2 = 2.0 * hi;
    std::vector<double> ext_breaks;
    append_filter_breaks(seq, t, hi, hi2, ext_breaks);
    QuadratureResult ext = integrate_adaptive(
        integrand, hi, hi2, ext_breaks, std::max(0.25 * tol, cfg.abs_tol),
        cfg.rel_tol, cfg.max_subdivisions);
    value += ext.value;
    quad_err += ext.error;
    hi = hi2;
    tail = tail_estimate(spectrum, seq, hi);
  }

  const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
  if (quad_err + tail > tol && tail > 0.5 * tol)
    throw ToleranceError("chi_quadrature: tail bound exceeds tolerance", value,
                         quad_err + tail);
  return value;
}

QuadratureConfig default_quadrature_config(const SpectrumModel& model) {
  QuadratureConfig cfg;
  double reach = 0.0;
  for (const auto& term : model.terms)
    reach = std::max(reach, term.width + term.center);
  cfg.omega_max = 200.0 * std::max(reach, 1e-3);
  return cfg;
}

double chi_quadrature(const SpectrumModel& model, const PulseSequence& seq,
                      double t, QuadratureConfig cfg) {
  if (!(cfg.omega_max > 0.0))
    cfg.omega_max = default_quadrature_config(model).omega_max;
  std::vector<double> breaks;
  for (const auto& term : model.terms) {
    breaks.push_back(std::max(0.0, term.center - term.width));
    breaks.push_back(term.center);
    breaks.push_back(term.center + term.width);
  }
  auto spectrum = [&model](double w) { return eval_spectrum(model, w); };
  return chi_quadrature(spectrum, seq, t, cfg, breaks);
}

CoherenceValues coherence(const SpectrumModel& model, const PulseSequence& seq,
                          const std::vector<double>& times) {
  CoherenceValues out;
  out.values.reserve(times.size());
  out.underflow.assign(times.size(), 0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double chi = chi_analytic(model, seq, times[i]);
    if (chi > kChiClamp) {
      out.underflow[i] = 1;
      out.values.push_back(0.0);
    } else {
      out.values.push_back(std::exp(-chi));
    }
  }
  return out;
}

}  // namespace vqns
