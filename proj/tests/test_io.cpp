#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>

#include "core/errors.hpp"
#include "core/io.hpp"

using namespace vqns;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vqns_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

MeasurementSet sample_set() {
  MeasurementSet set;
  CoherenceCurve a;
  a.seq.n_pulses = 0;
  a.times = {0.0, 0.1, 0.25, 1.0};
  a.values = {1.0, 0.9, 0.7123456789012345, 0.3};
  a.label = "fid";
  CoherenceCurve b;
  b.seq.n_pulses = 4;
  b.times = {0.0, 0.5, 1.5};
  b.values = {1.0, 0.8, 0.2};
  b.sigma = {0.0, 0.01, 0.02};
  set.curves = {a, b};
  return set;
}

}  // namespace

TEST_CASE("format_double round-trips doubles") {
  for (double x : {1.0 / 3.0, 1e-300, 9.0000454e2, -0.0, 12345.6789}) {
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("write then parse is the identity") {
  TempDir dir;
  const MeasurementSet set = sample_set();
  const fs::path manifest = write_measurements(set, dir.path);
  const MeasurementSet loaded = parse_manifest(manifest);
  REQUIRE(loaded.curves.size() == set.curves.size());
  for (std::size_t j = 0; j < set.curves.size(); ++j) {
    CHECK(loaded.curves[j].seq.n_pulses == set.curves[j].seq.n_pulses);
    CHECK(loaded.curves[j].times == set.curves[j].times);
    CHECK(loaded.curves[j].values == set.curves[j].values);
    CHECK(loaded.curves[j].sigma == set.curves[j].sigma);
  }
}

TEST_CASE("hz-scaled write/parse round-trips to relative 1e-12") {
  TempDir dir;
  MeasurementSet set = sample_set();
  set.omega0_hz = 1e5 / (2 * 3.14159265358979323846);
  const fs::path manifest = write_measurements(set, dir.path);
  const MeasurementSet loaded = parse_manifest(manifest);
  for (std::size_t j = 0; j < set.curves.size(); ++j)
    for (std::size_t k = 0; k < set.curves[j].times.size(); ++k)
      CHECK(loaded.curves[j].times[k] ==
            doctest::Approx(set.curves[j].times[k]).epsilon(1e-12));
}

TEST_CASE("curve parse errors carry line and column") {
  TempDir dir;
  const fs::path p = dir.path / "bad.csv";

  write_file_atomic(p, "t,C\n0.0,1.0\n0.5,1.2\n");
  try {
    parse_curve_file(p);
    FAIL("expected range error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("[0, 1]") != std::string::npos);
  }

  write_file_atomic(p, "t,C\n0.0,1.0\n0.5,abc\n");
  try {
    parse_curve_file(p);
    FAIL("expected number error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 5);
  }

  write_file_atomic(p, "t,C\n1.0,0.9\n0.5,0.8\n");
  CHECK_THROWS_AS(parse_curve_file(p), ParseError);  // unsorted times

  write_file_atomic(p, "time,value\n0,1\n");
  CHECK_THROWS_AS(parse_curve_file(p), ParseError);  // bad header
}

TEST_CASE("comments and blank lines are skipped") {
  TempDir dir;
  const fs::path p = dir.path / "ok.csv";
  write_file_atomic(p, "# generated\n\nt,C\n0,1\n# midway note\n1,0.5\n");
  const CoherenceCurve curve = parse_curve_file(p);
  CHECK(curve.times == std::vector<double>{0.0, 1.0});
}

TEST_CASE("manifest errors") {
  TempDir dir;
  const fs::path m = dir.path / "manifest.json";

  write_file_atomic(m, "{not json");
  CHECK_THROWS_AS(parse_manifest(m), ParseError);

  write_file_atomic(m, R"({"version": 99, "curves": []})");
  CHECK_THROWS_AS(parse_manifest(m), ParseError);

  write_file_atomic(
      m,
      R"({"version": 1, "curves": [{"path": "missing.csv", "sequence": {"n_pulses": 0}}]})");
  CHECK_THROWS_AS(parse_manifest(m), IoError);
}

TEST_CASE("output writers produce stable schemas") {
  TempDir dir;
  EnsembleResult result;
  result.omega_grid = {0.0, 1.0, 2.0};
  result.mean = {2.0, 1.0, 0.5};
  result.std = {0.0, 0.0, 0.0};
  RunResult run;
  run.theta.n_basis = 1;
  run.theta.values = {1.0, 0.0, 1.0};
  run.converged = true;
  run.final_loss = 1e-6;
  run.seed = 42;
  run.loss_history = {1.0, 1e-6};
  result.runs = {run};

  write_spectrum_csv(result, dir.path / "spectrum.csv");
  const std::string csv = read_file(dir.path / "spectrum.csv");
  CHECK(csv.rfind("omega,mean,std\n", 0) == 0);
  CHECK(csv.find("\n1,1,0\n") != std::string::npos);

  write_runs_json(result, dir.path / "runs.json");
  const std::string runs = read_file(dir.path / "runs.json");
  CHECK(runs.find("\"converged\": true") != std::string::npos);
  CHECK(runs.find("\"seed\": 42") != std::string::npos);

  write_report_json(result, R"({"command":"fit"})", dir.path / "report.json");
  const std::string report = read_file(dir.path / "report.json");
  CHECK(report.find("\"converged_runs\": 1") != std::string::npos);

  StudyReport study;
  study.n_runs = 20;
  study.cells = {{1e-5, 3, 20, 2, 1.5, true}};
  write_study_csv(study, dir.path / "study.csv");
  const std::string sc = read_file(dir.path / "study.csv");
  CHECK(sc == "xi,n_basis,successes,failures,success\n1.0000000000000001e-05,3,20,2,1\n");
}

TEST_CASE("atomic writes leave no temp files") {
  TempDir dir;
  write_file_atomic(dir.path / "x.txt", "hello");
  CHECK(read_file(dir.path / "x.txt") == "hello");
  CHECK_FALSE(fs::exists(dir.path / "x.txt.tmp"));
}
