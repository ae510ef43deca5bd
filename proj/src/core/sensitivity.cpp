#include "core/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "core/attenuation.hpp"
#include "core/errors.hpp"
#include "core/filter.hpp"

namespace vqns {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Filter resonances in t at fixed omega: t = (2k+1) pi Np / omega for CPMG,
// half-period marks for FID. Seeds the panel layout only.
std::vector<double> time_breakpoints(const PulseSequence& seq, double omega,
                                     double t_f) {
  std::vector<double> breaks;
  if (!(omega > 0.0)) return breaks;
  const double step =
      seq.is_fid() ? kPi / omega : 2.0 * kPi * seq.n_pulses / omega;
  const double first = seq.is_fid() ? step : 0.5 * step;
  for (double t = first; t < t_f && breaks.size() < 512; t += step)
    breaks.push_back(t);
  return breaks;
}

}  // namespace

SensitivityCurve sensitivity_curve(const SpectrumModel& spectrum,
                                   const PulseSequence& seq, double t_f,
                                   const std::vector<double>& omega_grid,
                                   const QuadratureConfig& cfg) {
  if (!(t_f > 0.0))
    throw InvalidArgumentError("sensitivity_curve: t_f must be > 0");
  if (!spectrum.terms.empty()) validate(spectrum);

  SensitivityCurve curve;
  curve.seq = seq;
  curve.t_f = t_f;
  curve.omega_grid = omega_grid;
  curve.values.reserve(omega_grid.size());
  for (double omega : omega_grid) {
    auto integrand = [&](double t) {
      const double chi =
          spectrum.terms.empty() ? 0.0 : chi_analytic(spectrum, seq, t);
      return filter_function(seq, omega, t) *
             std::exp(-std::min(chi, kChiClamp));
    };
    const QuadratureResult r =
        integrate_adaptive(integrand, 0.0, t_f, time_breakpoints(seq, omega, t_f),
                           cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);
    curve.values.push_back(r.value);
  }
  return curve;
}

double default_horizon(const SpectrumModel& spectrum,
                       const PulseSequence& seq) {
  double t_f = 5.0;
  switch (seq.n_pulses) {
    case 0: t_f = 3.0; break;
    case 1: t_f = 4.0; break;
    case 5: t_f = 5.0; break;
    case 8: t_f = 5.0; break;
    case 32: t_f = 6.0; break;
    default: break;
  }
  if (spectrum.terms.empty()) return t_f;
  // Extend the window until the signal has decayed to the noise floor.
  while (t_f < 1e4 &&
         std::exp(-std::min(chi_analytic(spectrum, seq, t_f), kChiClamp)) >
             0.01)
    t_f *= 1.25;
  return t_f;
}

CoverageReport coverage_report(const SpectrumModel& spectrum,
                               const std::vector<PulseSequence>& sequences,
                               const std::vector<double>& t_f,
                               const std::vector<double>& omega_grid,
                               const std::vector<PulseSequence>& candidates,
                               const std::vector<double>& candidate_t_f,
                               double low_fraction,
                               const QuadratureConfig& cfg) {
  if (sequences.empty())
    throw InvalidArgumentError("coverage_report: no sequences");
  if (t_f.size() != sequences.size())
    throw InvalidArgumentError("coverage_report: t_f list length mismatch");
  if (candidate_t_f.size() != candidates.size())
    throw InvalidArgumentError(
        "coverage_report: candidate t_f list length mismatch");
  if (omega_grid.size() < 2)
    throw InvalidArgumentError("coverage_report: grid too small");
  if (!(low_fraction >= 0.0 && low_fraction <= 1.0))
    throw InvalidArgumentError("coverage_report: low_fraction outside [0, 1]");

  CoverageReport report;
  report.omega_grid = omega_grid;
  report.summed.assign(omega_grid.size(), 0.0);
  for (std::size_t j = 0; j < sequences.size(); ++j) {
    report.curves.push_back(
        sensitivity_curve(spectrum, sequences[j], t_f[j], omega_grid, cfg));
    for (std::size_t i = 0; i < omega_grid.size(); ++i)
      report.summed[i] += report.curves.back().values[i];
  }

  const double peak =
      *std::max_element(report.summed.begin(), report.summed.end());
  report.threshold = low_fraction * peak;
  std::vector<bool> flagged(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i)
    flagged[i] = report.summed[i] < report.threshold;
  for (std::size_t i = 0; i < flagged.size();) {
    if (!flagged[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < flagged.size() && flagged[j + 1]) ++j;
    report.regions.push_back({i, j});
    i = j + 1;
  }

  // Trapezoid weight of each flagged grid point within its region.
  std::vector<double> weight(omega_grid.size(), 0.0);
  for (const auto& region : report.regions) {
    for (std::size_t i = region.first; i <= region.last; ++i) {
      const double left = i > region.first ? omega_grid[i] - omega_grid[i - 1]
                                           : 0.0;
      const double right =
          i < region.last ? omega_grid[i + 1] - omega_grid[i] : 0.0;
      weight[i] = 0.5 * (left + right);
    }
  }

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    CandidateScore entry;
    entry.seq = candidates[c];
    entry.t_f = candidate_t_f[c];
    if (!report.regions.empty()) {
      const SensitivityCurve g = sensitivity_curve(
          spectrum, candidates[c], candidate_t_f[c], omega_grid, cfg);
      for (std::size_t i = 0; i < omega_grid.size(); ++i)
        entry.score += weight[i] * g.values[i];
    }
    report.ranking.push_back(entry);
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const CandidateScore& a, const CandidateScore& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.seq.n_pulses < b.seq.n_pulses;
                   });
  return report;
}

}  // namespace vqns
