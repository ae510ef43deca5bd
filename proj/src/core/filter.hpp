#pragma once

#include "core/types.hpp"

namespace vqns {

// Dynamical-decoupling filter function F(omega, t), units time^2.
//
//   FID:        (4/w^2)  sin^2(wt/2)
//   CPMG even:  (16/w^2) sin^4(wt/4Np) / cos^2(wt/2Np) * sin^2(wt/2)
//   CPMG odd:   (16/w^2) sin^4(wt/4Np) / cos^2(wt/2Np) * cos^2(wt/2)
//
// The cos^2(wt/2Np) zeros are removable (they are the filter passband
// maxima, value 4 Np^2 sin^4(..)/w^2); the implementation evaluates them
// through an exact near-resonance rewrite, so the result is finite and
// >= 0 for every (omega, t) with t >= 0. |omega t| below the series
// threshold switches to the 4th-order small-argument expansion.
double filter_function(const PulseSequence& seq, double omega, double t);

// Analytic omega -> 0 limit: t^2 for FID, 0 for CPMG.
double filter_function_zero_freq(const PulseSequence& seq, double t);

}  // namespace vqns
