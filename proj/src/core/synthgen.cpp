#include "core/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/attenuation.hpp"
#include "core/errors.hpp"
#include "core/seeding.hpp"

namespace vqns {

void validate(const AnalyticSpectrum& spec) {
  switch (spec.kind) {
    case SpectrumKind::kLorentzianSum:
      validate(spec.model);
      break;
    case SpectrumKind::kOhmic:
      if (!(spec.eta > 0.0) || !(spec.gamma > 0.0))
        throw InvalidArgumentError("ohmic spectrum: eta and gamma must be > 0");
      break;
    case SpectrumKind::kOneOverF:
      if (!(spec.zeta > 0.0))
        throw InvalidArgumentError("1/f spectrum: zeta must be > 0");
      break;
  }
}

double eval_analytic(const AnalyticSpectrum& spec, double omega) {
  switch (spec.kind) {
    case SpectrumKind::kLorentzianSum:
      return eval_spectrum(spec.model, omega);
    case SpectrumKind::kOhmic:
      return spec.eta * std::abs(omega) /
             (omega * omega + spec.gamma * spec.gamma);
    case SpectrumKind::kOneOverF:
      if (omega == 0.0)
        throw DivergenceError("1/f spectrum diverges at omega = 0");
      return spec.zeta / std::abs(omega);
  }
  throw InvalidArgumentError("eval_analytic: unknown spectrum kind");
}

namespace {

// Ground-truth chi via the spectral integral only.
double chi_sim(const AnalyticSpectrum& spec, const PulseSequence& seq,
               double t, QuadratureConfig cfg) {
  std::vector<double> breaks;
  switch (spec.kind) {
    case SpectrumKind::kLorentzianSum:
      if (!(cfg.omega_max > 0.0))
        cfg.omega_max = default_quadrature_config(spec.model).omega_max;
      for (const auto& term : spec.model.terms) {
        breaks.push_back(std::max(0.0, term.center - term.width));
        breaks.push_back(term.center);
        breaks.push_back(term.center + term.width);
      }
      break;
    case SpectrumKind::kOhmic:
      // The ohmic FID coherence decays only logarithmically, so the time
      // grid reaches far enough that the filter packs tens of thousands of
      // lobes under any omega_max that certifies the default 1e-10
      // tolerance against the ~eta/omega^2 tail bound. Floor the tolerances
      // at a level far tighter than any consumer of simulated data needs,
      // start the truncation low (tail doubling extends it on demand), and
      // give the panel budget room to resolve the lobes that remain.
      cfg.abs_tol = std::max(cfg.abs_tol, 1e-6);
      cfg.rel_tol = std::max(cfg.rel_tol, 1e-5);
      cfg.max_subdivisions = std::max(cfg.max_subdivisions, 100000);
      if (!(cfg.omega_max > 0.0))
        cfg.omega_max = 200.0 * std::max(spec.gamma, 1.0);
      breaks = {spec.gamma};
      break;
    case SpectrumKind::kOneOverF:
      if (seq.is_fid())
        throw DivergenceError(
            "FID coherence diverges for a 1/f spectrum; drop the 0-pulse "
            "sequence");
      // The 1/f tail decays too slowly to certify the default 1e-10
      // tolerance at any practical omega_max; floor the tolerances at a
      // level far tighter than any consumer of simulated data needs.
      cfg.abs_tol = std::max(cfg.abs_tol, 1e-7);
      cfg.rel_tol = std::max(cfg.rel_tol, 1e-6);
      if (!(cfg.omega_max > 0.0)) cfg.omega_max = 2000.0;
      breaks = {1e-3, 1e-2, 0.1, 1.0};
      break;
  }
  auto s = [&spec](double w) { return eval_analytic(spec, w); };
  return chi_quadrature(s, seq, t, cfg, breaks);
}

std::string sequence_label(const PulseSequence& seq) {
  return seq.is_fid() ? "fid" : "cpmg-" + std::to_string(seq.n_pulses);
}

}  // namespace

std::vector<double> default_time_grid(const AnalyticSpectrum& spec,
                                      const PulseSequence& seq, int n_points) {
  if (n_points < 2)
    throw InvalidArgumentError("default_time_grid: need >= 2 points");
  validate(spec);
  QuadratureConfig coarse;
  coarse.abs_tol = 1e-8;
  coarse.rel_tol = 1e-6;
  double t_end = 1.0;
  while (t_end < 200.0 &&
         std::exp(-std::min(chi_sim(spec, seq, t_end, coarse), kChiClamp)) >
             0.01)
    t_end *= 1.25;
  std::vector<double> times(n_points);
  for (int i = 0; i < n_points; ++i)
    times[i] = t_end * static_cast<double>(i) / (n_points - 1);
  return times;
}

MeasurementSet simulate_measurements(const AnalyticSpectrum& spec,
                                     const std::vector<SimGrid>& grids,
                                     const NoiseSpec& noise,
                                     std::optional<int> downsample_to,
                                     const QuadratureConfig& cfg) {
  validate(spec);
  if (grids.empty())
    throw InvalidArgumentError("simulate_measurements: no sequences");
  if (noise.epsilon < 0.0)
    throw InvalidArgumentError("simulate_measurements: epsilon must be >= 0");

  MeasurementSet set;
  if (spec.kind == SpectrumKind::kLorentzianSum)
    set.omega0_hz = spec.model.omega0_hz;
  Rng rng(noise.seed);
  for (const auto& grid : grids) {
    if (spec.kind == SpectrumKind::kOneOverF && grid.seq.is_fid())
      throw DivergenceError(
          "FID coherence diverges for a 1/f spectrum; drop the 0-pulse "
          "sequence");
    std::vector<double> times = grid.times;
    if (times.size() < 2)
      throw InvalidArgumentError("simulate_measurements: grid too small");
    if (downsample_to && *downsample_to < static_cast<int>(times.size())) {
      const int m = *downsample_to;
      if (m < 2)
        throw InvalidArgumentError("simulate_measurements: downsample_to < 2");
      std::vector<double> picked(m);
      const double scale =
          static_cast<double>(times.size() - 1) / (m - 1);
      for (int i = 0; i < m; ++i)
        picked[i] = times[static_cast<std::size_t>(std::lround(i * scale))];
      times = std::move(picked);
    }

    CoherenceCurve curve;
    curve.seq = grid.seq;
    curve.label = sequence_label(grid.seq);
    curve.times = times;
    curve.values.reserve(times.size());
    for (double t : times) {
      double c = t == 0.0 ? 1.0
                          : std::exp(-std::min(chi_sim(spec, grid.seq, t, cfg),
                                               kChiClamp));
      if (noise.epsilon > 0.0)
        c += noise.epsilon * (2.0 * rng.uniform() - 1.0);
      curve.values.push_back(std::clamp(c, 0.0, 1.0));
    }
    set.curves.push_back(std::move(curve));
  }
  validate(set);
  return set;
}

OuResult ou_oracle(const LorentzianTerm& term, const PulseSequence& seq,
                   const std::vector<double>& times, int n_traj, double dt_sim,
                   std::uint64_t seed) {
  validate(term);
  if (term.center != 0.0)
    throw InvalidArgumentError("ou_oracle: requires d = 0");
  if (n_traj < 100)
    throw InvalidArgumentError("ou_oracle: n_traj must be >= 100");

  const double wc = term.width;
  const double sigma = std::sqrt(term.amplitude * wc);

  OuResult out;
  out.times = times;
  out.values.reserve(times.size());
  out.std_errors.reserve(times.size());

  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double T = times[ti];
    if (T < 0.0) throw InvalidArgumentError("ou_oracle: negative time");
    if (T == 0.0) {
      out.values.push_back(1.0);
      out.std_errors.push_back(0.0);
      continue;
    }

    // Constant-sign segments of the switching function for this total time.
    std::vector<double> bounds{0.0};
    if (seq.n_pulses >= 1) {
      const double gap = T / seq.n_pulses;
      for (int k = 0; k < seq.n_pulses; ++k)
        bounds.push_back(0.5 * gap + k * gap);
    }
    bounds.push_back(T);

    double min_gap = T;
    for (std::size_t k = 1; k < bounds.size(); ++k)
      min_gap = std::min(min_gap, bounds[k] - bounds[k - 1]);
    const double dt =
        dt_sim > 0.0 ? dt_sim : std::min(0.01 / wc, min_gap / 20.0);

    const std::uint64_t time_seed = derive_seed(seed, ti);
    std::vector<double> re(n_traj), im(n_traj);
    for (int j = 0; j < n_traj; ++j) {
      Rng rng(derive_seed(time_seed, static_cast<std::uint64_t>(j)));
      double beta = sigma * rng.normal();  // stationary start
      double phi = 0.0;
      double sign = 1.0;
      for (std::size_t k = 1; k < bounds.size(); ++k) {
        const double len = bounds[k] - bounds[k - 1];
        const int steps = std::max(1, static_cast<int>(std::ceil(len / dt)));
        const double h = len / steps;
        const double decay = std::exp(-wc * h);
        const double kick = sigma * std::sqrt(1.0 - decay * decay);
        for (int s = 0; s < steps; ++s) {
          const double next = decay * beta + kick * rng.normal();
          phi += sign * 0.5 * (beta + next) * h;  // trapezoid on this step
          beta = next;
        }
        sign = -sign;
      }
      re[j] = std::cos(phi);
      im[j] = std::sin(phi);
    }

    double mre = 0.0, mim = 0.0;
    for (int j = 0; j < n_traj; ++j) {
      mre += re[j];
      mim += im[j];
    }
    mre /= n_traj;
    mim /= n_traj;
    const double mag = std::hypot(mre, mim);
    // Standard error of the projection onto the mean direction.
    const double cth = mag > 0.0 ? mre / mag : 1.0;
    const double sth = mag > 0.0 ? mim / mag : 0.0;
    double var = 0.0;
    for (int j = 0; j < n_traj; ++j) {
      const double proj = re[j] * cth + im[j] * sth - mag;
      var += proj * proj;
    }
    var /= (n_traj - 1);
    out.values.push_back(mag);
    out.std_errors.push_back(std::sqrt(var / n_traj));
  }
  return out;
}

}  // namespace vqns
