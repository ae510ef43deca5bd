#include "core/types.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace vqns {

void validate(const LorentzianTerm& term) {
  if (!(term.amplitude >= 0.0) || !std::isfinite(term.amplitude))
    throw InvalidArgumentError("LorentzianTerm: amplitude must be >= 0 and finite");
  if (!(term.center >= 0.0) || !std::isfinite(term.center))
    throw InvalidArgumentError("LorentzianTerm: center must be >= 0 and finite");
  if (!(term.width >= kOmegaCFloor) || !std::isfinite(term.width))
    throw InvalidArgumentError("LorentzianTerm: width must be >= omega_c floor");
}

void validate(const SpectrumModel& model) {
  if (model.terms.empty())
    throw InvalidArgumentError("SpectrumModel: needs at least one term");
  for (const auto& t : model.terms) validate(t);
  if (model.omega0_hz && !(*model.omega0_hz > 0.0))
    throw InvalidArgumentError("SpectrumModel: omega0_hz must be > 0");
}

double eval_spectrum(const SpectrumModel& model, double omega) {
  double s = 0.0;
  for (const auto& term : model.terms) {
    const double wc2 = term.width * term.width;
    const double dm = omega - term.center;
    const double dp = omega + term.center;
    s += term.amplitude * (wc2 / (wc2 + dm * dm) + wc2 / (wc2 + dp * dp));
  }
  return s;
}

void validate(const CoherenceCurve& curve) {
  if (curve.seq.n_pulses < 0)
    throw InvalidArgumentError("CoherenceCurve: n_pulses must be >= 0");
  if (curve.times.size() != curve.values.size())
    throw InvalidArgumentError("CoherenceCurve: times/values size mismatch");
  if (!curve.sigma.empty() && curve.sigma.size() != curve.times.size())
    throw InvalidArgumentError("CoherenceCurve: sigma size mismatch");
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (!std::isfinite(curve.times[i]) || curve.times[i] < 0.0)
      throw InvalidArgumentError("CoherenceCurve: times must be finite and >= 0");
    if (i > 0 && !(curve.times[i] > curve.times[i - 1]))
      throw InvalidArgumentError("CoherenceCurve: times must be strictly increasing");
    if (!(curve.values[i] >= 0.0) || !(curve.values[i] <= 1.0))
      throw InvalidArgumentError("CoherenceCurve: coherence values must lie in [0, 1]");
    if (!curve.sigma.empty() && !(curve.sigma[i] >= 0.0))
      throw InvalidArgumentError("CoherenceCurve: sigma must be >= 0");
  }
}

void validate(const MeasurementSet& set) {
  if (set.curves.empty())
    throw InvalidArgumentError("MeasurementSet: needs at least one curve");
  for (const auto& c : set.curves) validate(c);
  if (set.omega0_hz && !(*set.omega0_hz > 0.0))
    throw InvalidArgumentError("MeasurementSet: omega0_hz must be > 0");
}

}  // namespace vqns
