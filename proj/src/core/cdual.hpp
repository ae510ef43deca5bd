#pragma once

#include <cmath>
#include <complex>

namespace vqns {

// First-order dual over complex doubles: value and derivative with respect
// to one complex parameter. Used to differentiate the attenuation closed
// form with respect to q = omega_c + i d.
struct CDual {
  std::complex<double> v{0.0, 0.0};
  std::complex<double> d{0.0, 0.0};

  CDual() = default;
  CDual(std::complex<double> value, std::complex<double> deriv)
      : v(value), d(deriv) {}
  explicit CDual(double value) : v(value), d(0.0) {}
};

inline CDual operator+(const CDual& a, const CDual& b) {
  return {a.v + b.v, a.d + b.d};
}
inline CDual operator-(const CDual& a, const CDual& b) {
  return {a.v - b.v, a.d - b.d};
}
inline CDual operator*(const CDual& a, const CDual& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
inline CDual operator*(const CDual& a, double s) { return {a.v * s, a.d * s}; }
inline CDual operator*(double s, const CDual& a) { return a * s; }
inline CDual operator+(const CDual& a, double s) { return {a.v + s, a.d}; }
inline CDual operator-(const CDual& a, double s) { return {a.v - s, a.d}; }
inline CDual operator-(double s, const CDual& a) { return {s - a.v, -a.d}; }
inline CDual operator-(const CDual& a) { return {-a.v, -a.d}; }
inline CDual operator/(const CDual& a, const CDual& b) {
  const std::complex<double> inv = 1.0 / b.v;
  return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
}
inline CDual operator/(const CDual& a, double s) { return {a.v / s, a.d / s}; }

inline CDual exp(const CDual& a) {
  const std::complex<double> e = std::exp(a.v);
  return {e, a.d * e};
}

inline double abs_value(const CDual& a) { return std::abs(a.v); }
inline double abs_value(const std::complex<double>& a) { return std::abs(a); }

}  // namespace vqns
