#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vqns/vqns.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vqns_capi_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct SpectrumHandle {
  vqns_spectrum* ptr = nullptr;
  explicit SpectrumHandle(const std::vector<double>& terms) {
    REQUIRE(vqns_spectrum_create(terms.data(), terms.size() / 3, &ptr) ==
            VQNS_OK);
  }
  ~SpectrumHandle() { vqns_spectrum_free(ptr); }
};

}  // namespace

TEST_CASE("spectrum create, eval, and validation errors") {
  SpectrumHandle spectrum({1.0, 0.0, 1.0});
  const double omega[] = {0.0, 1.0, -1.0};
  double values[3];
  REQUIRE(vqns_spectrum_eval(spectrum.ptr, omega, 3, values) == VQNS_OK);
  CHECK(values[0] == doctest::Approx(2.0));
  CHECK(values[1] == doctest::Approx(1.0));
  CHECK(values[2] == values[1]);

  vqns_spectrum* bad = nullptr;
  const double negative[] = {-1.0, 0.0, 1.0};
  CHECK(vqns_spectrum_create(negative, 1, &bad) ==
        VQNS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(vqns_last_error()) > 0);
  CHECK(bad == nullptr);

  CHECK(vqns_spectrum_eval(nullptr, omega, 3, values) ==
        VQNS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("filter, chi, and coherence agree through the API") {
  SpectrumHandle spectrum({1.0, 0.0, 1.0, 0.4, 3.0, 0.7});

  double f = 0.0;
  REQUIRE(vqns_filter_function(0, 1.0, 3.14159265358979323846, &f) == VQNS_OK);
  CHECK(f == doctest::Approx(4.0));

  for (int np : {0, 1, 4}) {
    double analytic = 0.0, quad = 0.0;
    REQUIRE(vqns_chi_analytic(spectrum.ptr, np, 2.5, &analytic) == VQNS_OK);
    REQUIRE(vqns_chi_quadrature(spectrum.ptr, np, 2.5, 0.0, 0.0, &quad) ==
            VQNS_OK);
    CHECK(std::abs(analytic - quad) <=
          std::max(1e-8, 1e-6 * std::abs(analytic)));

    const double times[] = {0.0, 2.5};
    double c[2];
    REQUIRE(vqns_coherence(spectrum.ptr, np, times, 2, c) == VQNS_OK);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == doctest::Approx(std::exp(-analytic)).epsilon(1e-12));
  }

  CHECK(vqns_filter_function(-1, 1.0, 1.0, &f) == VQNS_ERR_INVALID_ARGUMENT);
  CHECK(vqns_chi_analytic(spectrum.ptr, 0, 1.0, nullptr) ==
        VQNS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("measurements and a small ensemble") {
  SpectrumHandle spectrum({1.5, 1.0, 0.9});

  vqns_measurements* set = nullptr;
  REQUIRE(vqns_measurements_create(&set) == VQNS_OK);
  for (int np : {0, 1, 4}) {
    std::vector<double> times, values(21);
    for (int k = 0; k < 21; ++k) times.push_back(4.0 * k / 20);
    REQUIRE(vqns_coherence(spectrum.ptr, np, times.data(), times.size(),
                           values.data()) == VQNS_OK);
    REQUIRE(vqns_measurements_add_curve(set, np, times.data(), values.data(),
                                        times.size()) == VQNS_OK);
  }
  size_t count = 0;
  REQUIRE(vqns_measurements_curve_count(set, &count) == VQNS_OK);
  CHECK(count == 3);

  std::vector<double> grid;
  for (int i = 0; i < 41; ++i) grid.push_back(10.0 * i / 40);
  vqns_ensemble* ensemble = nullptr;
  REQUIRE(vqns_run_ensemble(set, 1, R"({"xi": 1e-5})", 3, 11, grid.data(),
                            grid.size(), 1, &ensemble) == VQNS_OK);

  int converged = 0, failures = 0;
  REQUIRE(vqns_ensemble_counts(ensemble, &converged, &failures) == VQNS_OK);
  CHECK(converged + failures == 3);
  CHECK(converged >= 1);

  std::vector<double> mean(grid.size()), std_dev(grid.size());
  REQUIRE(vqns_ensemble_stats(ensemble, mean.data(), std_dev.data()) ==
          VQNS_OK);
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::isfinite(mean[i]));
    CHECK(std_dev[i] >= 0.0);
  }

  double params[3] = {0, 0, 0};
  REQUIRE(vqns_ensemble_best_params(ensemble, params, 3) == VQNS_OK);
  CHECK(params[0] > 0.0);
  CHECK(params[2] > 0.0);
  double small[1];
  CHECK(vqns_ensemble_best_params(ensemble, small, 1) ==
        VQNS_ERR_INVALID_ARGUMENT);

  vqns_ensemble_free(ensemble);
  vqns_measurements_free(set);
}

TEST_CASE("bad optimizer JSON reports a parse error") {
  vqns_measurements* set = nullptr;
  REQUIRE(vqns_measurements_create(&set) == VQNS_OK);
  const double times[] = {0.0, 1.0};
  const double values[] = {1.0, 0.5};
  REQUIRE(vqns_measurements_add_curve(set, 0, times, values, 2) == VQNS_OK);
  const double grid[] = {0.0, 1.0};
  vqns_ensemble* ensemble = nullptr;
  CHECK(vqns_run_ensemble(set, 1, "{oops", 1, 0, grid, 2, 1, &ensemble) ==
        VQNS_ERR_PARSE);
  CHECK(std::strlen(vqns_last_error()) > 0);
  vqns_measurements_free(set);
}

TEST_CASE("command layer: simulate, fit, load, replay") {
  TempDir dir;
  const fs::path sim_dir = dir.path / "sim";
  const std::string simulate = std::string(R"({
    "command": "simulate",
    "spectrum": {"kind": "lorentzian-sum",
                 "terms": [{"B": 1.0, "d": 0.0, "omega_c": 1.0}]},
    "pulses": [0, 1],
    "points": 21,
    "out": ")") + sim_dir.string() + "\"}";
  REQUIRE(vqns_run_command_json(simulate.c_str()) == VQNS_OK);
  REQUIRE(fs::exists(sim_dir / "manifest.json"));
  REQUIRE(fs::exists(sim_dir / "config_echo.json"));

  vqns_measurements* loaded = nullptr;
  REQUIRE(vqns_measurements_load((sim_dir / "manifest.json").c_str(),
                                 &loaded) == VQNS_OK);
  size_t count = 0;
  REQUIRE(vqns_measurements_curve_count(loaded, &count) == VQNS_OK);
  CHECK(count == 2);
  vqns_measurements_free(loaded);

  const fs::path fit_dir = dir.path / "fit";
  const std::string fit = std::string(R"({
    "command": "fit",
    "manifest": ")") + (sim_dir / "manifest.json").string() +
                          std::string(R"(",
    "nbasis": 1, "nruns": 2, "seed": 7, "threads": 1,
    "xi": 1e-4, "grid": "0:10:41",
    "out": ")") + fit_dir.string() + "\"}";
  REQUIRE(vqns_run_command_json(fit.c_str()) == VQNS_OK);
  REQUIRE(fs::exists(fit_dir / "spectrum.csv"));
  REQUIRE(fs::exists(fit_dir / "runs.json"));

  const fs::path replay_dir = dir.path / "fit_replay";
  REQUIRE(vqns_replay((fit_dir / "config_echo.json").c_str(),
                      replay_dir.c_str()) == VQNS_OK);
  std::ifstream a(fit_dir / "spectrum.csv"), b(replay_dir / "spectrum.csv");
  const std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
  CHECK(sa == sb);

  CHECK(vqns_run_command_json("{nope") == VQNS_ERR_PARSE);
  CHECK(vqns_run_command_json(R"({"command": "dance"})") ==
        VQNS_ERR_INVALID_ARGUMENT);
  CHECK(vqns_replay((dir.path / "missing.json").c_str(), nullptr) ==
        VQNS_ERR_IO);
}
