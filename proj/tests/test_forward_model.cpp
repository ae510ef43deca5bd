#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core/errors.hpp"
#include "core/filter.hpp"
#include "core/seeding.hpp"
#include "core/types.hpp"

using namespace vqns;

TEST_CASE("spectrum evaluation matches hand values") {
  SpectrumModel m{{{1.0, 0.0, 1.0}}, {}};
  CHECK(eval_spectrum(m, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eval_spectrum(m, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

  SpectrumModel shifted{{{1.0, 2.0, 1.0}}, {}};
  CHECK(eval_spectrum(shifted, 2.0) ==
        doctest::Approx(1.0 + 1.0 / 17.0).epsilon(1e-14));
}

TEST_CASE("spectrum is even, nonnegative, and additive") {
  Rng rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    SpectrumModel a, b;
    const int na = 1 + static_cast<int>(rng.uniform(0, 3));
    const int nb = 1 + static_cast<int>(rng.uniform(0, 3));
    for (int i = 0; i < na; ++i)
      a.terms.push_back(
          {rng.uniform(0.1, 10), rng.uniform(0, 20), rng.uniform(0.1, 10)});
    for (int i = 0; i < nb; ++i)
      b.terms.push_back(
          {rng.uniform(0.1, 10), rng.uniform(0, 20), rng.uniform(0.1, 10)});
    SpectrumModel both = a;
    both.terms.insert(both.terms.end(), b.terms.begin(), b.terms.end());

    const double w = rng.uniform(-30, 30);
    CHECK(eval_spectrum(a, w) == eval_spectrum(a, -w));
    CHECK(eval_spectrum(a, w) >= 0.0);
    CHECK(eval_spectrum(both, w) ==
          doctest::Approx(eval_spectrum(a, w) + eval_spectrum(b, w))
              .epsilon(1e-14));
  }
}

TEST_CASE("model validation rejects bad terms") {
  CHECK_THROWS_AS(validate(LorentzianTerm{-1.0, 0.0, 1.0}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(validate(LorentzianTerm{1.0, -0.5, 1.0}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(validate(LorentzianTerm{1.0, 0.0, 0.0}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(validate(SpectrumModel{}), InvalidArgumentError);
}

TEST_CASE("filter function trivial points") {
  const double pi = 3.14159265358979323846;
  CHECK(filter_function({0}, 1.0, pi) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(filter_function({1}, 1.0, 2 * pi) ==
        doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("filter function small-frequency limits") {
  CHECK(filter_function({0}, 1e-8, 3.0) ==
        doctest::Approx(9.0).epsilon(1e-6));
  CHECK(filter_function_zero_freq({0}, 3.0) == doctest::Approx(9.0));
  CHECK(filter_function_zero_freq({4}, 3.0) == 0.0);
  // CPMG branches vanish as omega -> 0.
  CHECK(filter_function({2}, 1e-8, 3.0) ==
        doctest::Approx(0.0).epsilon(1e-10));
  // Continuity across the series threshold: F varies smoothly, so values
  // straddling the branch switch by +/- 1e-6 relative must agree closely.
  for (int np : {0, 1, 2, 5}) {
    const double t = 2.7;
    const double below = filter_function({np}, 1e-4 * (1 - 1e-6) / t, t);
    const double above = filter_function({np}, 1e-4 * (1 + 1e-6) / t, t);
    CHECK(std::abs(below - above) <=
          1e-4 * std::max(std::abs(below) + std::abs(above), 1e-300));
  }
}

TEST_CASE("filter function stays finite and matches the raw form") {
  Rng rng(7);
  const double pi = 3.14159265358979323846;
  for (int trial = 0; trial < 500; ++trial) {
    const int np = static_cast<int>(rng.uniform(0, 34));
    const double w = rng.uniform(1e-3, 40);
    const double t = rng.uniform(1e-3, 10);
    const double f = filter_function({np}, w, t);
    CHECK(std::isfinite(f));
    CHECK(f >= 0.0);
    if (np >= 1) {
      const double phase = w * t / (2 * np);
      if (std::abs(std::cos(phase)) > 0.2) {
        const double s4 = std::pow(std::sin(w * t / (4 * np)), 4);
        const double outer = np % 2 == 0 ? std::pow(std::sin(w * t / 2), 2)
                                         : std::pow(std::cos(w * t / 2), 2);
        const double raw =
            16.0 / (w * w) * s4 / std::pow(std::cos(phase), 2) * outer;
        CHECK(f == doctest::Approx(raw).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("filter resonances evaluate to the passband maximum") {
  const double pi = 3.14159265358979323846;
  for (int np : {1, 2, 4, 8, 32}) {
    const double t = 1.7;
    const double w = pi * np / t;  // cos(wt/2Np) = 0
    const double f = filter_function({np}, w, t);
    CHECK(std::isfinite(f));
    // Exact limit: the outer sin^2/cos^2 zero cancels against the
    // denominator, leaving 16 sin^4(wt/4Np) Np^2 / w^2.
    const double s4 = std::pow(std::sin(w * t / (4 * np)), 4);
    const double expected = 16.0 / (w * w) * s4 * np * np;
    CHECK(f == doctest::Approx(expected).epsilon(1e-9));
    // Continuity: approaching the resonance gives the same value.
    const double near = filter_function({np}, w * (1.0 + 1e-9), t);
    CHECK(near == doctest::Approx(f).epsilon(1e-6));
  }
}
