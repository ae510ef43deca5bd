#include "core/filter.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace vqns {

namespace {

constexpr double kSeriesThreshold = 1e-4;  // on |omega t|

// sin^2(Np*phi) / cos^2(phi) with the removable zeros of the denominator
// evaluated through the exact shift identity around the nearest odd
// multiple of pi/2. Valid for both parity branches (the even branch's
// sin^2(wt/2) and the odd branch's cos^2(wt/2) both reduce to
// sin^2(Np*psi) there).
double resonance_ratio(int n_pulses, double phi, double numerator) {
  const double c = std::cos(phi);
  if (std::abs(c) > 0.1) return numerator / (c * c);
  // Nearest odd multiple of pi/2.
  const double k = std::round(phi / M_PI - 0.5);
  const double phi0 = (2.0 * k + 1.0) * (M_PI / 2.0);
  const double psi = phi - phi0;
  const double sn = std::sin(n_pulses * psi);
  const double sd = std::sin(psi);
  if (sd == 0.0) return static_cast<double>(n_pulses) * n_pulses;
  return (sn * sn) / (sd * sd);
}

}  // namespace

double filter_function_zero_freq(const PulseSequence& seq, double t) {
  return seq.is_fid() ? t * t : 0.0;
}

double filter_function(const PulseSequence& seq, double omega, double t) {
  if (t < 0.0) throw InvalidArgumentError("filter_function: t must be >= 0");
  const double x = omega * t;
  const int np = seq.n_pulses;

  if (seq.is_fid()) {
    if (std::abs(x) < kSeriesThreshold)
      return t * t * (1.0 - x * x / 12.0 + x * x * x * x / 360.0);
    const double s = std::sin(0.5 * x);
    return 4.0 * s * s / (omega * omega);
  }

  const double phi = x / (2.0 * np);
  if (std::abs(x) < kSeriesThreshold) {
    const double phi2 = phi * phi;
    const double t4np = t / (2.0 * np);
    if (np % 2 == 0) {
      // leading term Np^2 phi^6 / w^2 = w^4 t^6 / (64 Np^4)
      const double lead =
          static_cast<double>(np) * np * phi2 * phi2 * t4np * t4np;
      return lead * (1.0 + (5.0 / 6.0) * phi2 - x * x / 12.0);
    }
    // leading term phi^4 / w^2 = w^2 t^4 / (16 Np^4)
    const double lead = phi2 * t4np * t4np;
    return lead * (1.0 + (5.0 / 6.0) * phi2 - x * x / 4.0);
  }

  const double half = std::sin(0.5 * phi);
  const double sin4 = half * half * half * half;
  double num;
  if (np % 2 == 0) {
    const double s = std::sin(0.5 * x);
    num = s * s;
  } else {
    const double c = std::cos(0.5 * x);
    num = c * c;
  }
  const double ratio = resonance_ratio(np, phi, num);
  return 16.0 * sin4 * ratio / (omega * omega);
}

}  // namespace vqns
