#include "core/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

#include "json.hpp"

namespace vqns {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec)
    throw IoError("rename failed: " + tmp.string() + " -> " + path.string() +
                  " (" + ec.message() + ")");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Splits a CSV line, recording the 1-based column where each field starts.
std::vector<std::pair<std::string, int>> split_fields(const std::string& line) {
  std::vector<std::pair<std::string, int>> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.emplace_back(trim(line.substr(start, i - start)),
                          static_cast<int>(start) + 1);
      start = i + 1;
    }
  }
  return fields;
}

double parse_number(const std::string& text, int line_no, int col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v))
      throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + text + "'", line_no, col);
  }
}

}  // namespace

CoherenceCurve parse_curve_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());

  CoherenceCurve curve;
  bool header_seen = false;
  std::size_t n_cols = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields.size() > 3)
        throw ParseError("expected header 't,C[,sigma]'", line_no,
                         fields.empty() ? 1 : fields[0].second);
      if (fields[0].first != "t" || fields[1].first != "C" ||
          (fields.size() == 3 && fields[2].first != "sigma"))
        throw ParseError("expected header 't,C[,sigma]'", line_no, 1);
      n_cols = fields.size();
      header_seen = true;
      continue;
    }
    if (fields.size() != n_cols)
      throw ParseError("expected " + std::to_string(n_cols) + " columns, got " +
                           std::to_string(fields.size()),
                       line_no, 1);
    const double t = parse_number(fields[0].first, line_no, fields[0].second);
    const double c = parse_number(fields[1].first, line_no, fields[1].second);
    if (!curve.times.empty() && t <= curve.times.back())
      throw ParseError("times must be strictly increasing", line_no,
                       fields[0].second);
    if (c < 0.0 || c > 1.0)
      throw ParseError("coherence outside [0, 1]", line_no, fields[1].second);
    curve.times.push_back(t);
    curve.values.push_back(c);
    if (n_cols == 3) {
      const double s = parse_number(fields[2].first, line_no, fields[2].second);
      if (s < 0.0)
        throw ParseError("sigma must be >= 0", line_no, fields[2].second);
      curve.sigma.push_back(s);
    }
  }
  if (!header_seen) throw ParseError("no header row", line_no + 1, 1);
  if (curve.times.empty()) throw ParseError("no data rows", line_no + 1, 1);
  return curve;
}

MeasurementSet parse_manifest(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what(), 0, 0);
  }
  if (!doc.is_object() || !doc.contains("version") ||
      !doc["version"].is_number_integer())
    throw ParseError("manifest: missing integer 'version'", 0, 0);
  if (doc["version"].get<int>() != kManifestVersion)
    throw ParseError("manifest: unknown version " +
                         doc["version"].dump(),
                     0, 0);
  MeasurementSet set;
  if (doc.contains("omega0_hz")) {
    const double f0 = doc["omega0_hz"].get<double>();
    if (!(f0 > 0.0)) throw ParseError("manifest: omega0_hz must be > 0", 0, 0);
    set.omega0_hz = f0;
  }
  if (!doc.contains("curves") || !doc["curves"].is_array() ||
      doc["curves"].empty())
    throw ParseError("manifest: 'curves' must be a nonempty array", 0, 0);

  const fs::path base = path.parent_path();
  for (const auto& entry : doc["curves"]) {
    if (!entry.contains("path") || !entry.contains("sequence") ||
        !entry["sequence"].contains("n_pulses"))
      throw ParseError("manifest: curve needs 'path' and 'sequence.n_pulses'",
                       0, 0);
    const int np = entry["sequence"]["n_pulses"].get<int>();
    if (np < 0) throw ParseError("manifest: n_pulses must be >= 0", 0, 0);
    const fs::path curve_path =
        base / fs::path(entry["path"].get<std::string>());
    if (!fs::exists(curve_path))
      throw IoError("manifest references missing file: " + curve_path.string());
    CoherenceCurve curve = parse_curve_file(curve_path);
    curve.seq.n_pulses = np;
    if (entry.contains("label")) curve.label = entry["label"].get<std::string>();
    if (set.omega0_hz) {
      const double scale = kTwoPi * *set.omega0_hz;  // seconds -> 1/omega_0
      for (double& t : curve.times) t *= scale;
    }
    set.curves.push_back(std::move(curve));
  }
  validate(set);
  return set;
}

fs::path write_measurements(const MeasurementSet& set,
                            const fs::path& out_dir) {
  validate(set);
  fs::create_directories(out_dir);
  json manifest;
  manifest["version"] = kManifestVersion;
  if (set.omega0_hz) manifest["omega0_hz"] = *set.omega0_hz;
  manifest["curves"] = json::array();

  const double scale = set.omega0_hz ? 1.0 / (kTwoPi * *set.omega0_hz) : 1.0;
  for (std::size_t j = 0; j < set.curves.size(); ++j) {
    const auto& curve = set.curves[j];
    char name[64];
    std::snprintf(name, sizeof(name), "curve_%02zu_np%d.csv", j,
                  curve.seq.n_pulses);
    std::ostringstream out;
    out << (curve.sigma.empty() ? "t,C\n" : "t,C,sigma\n");
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
      out << format_double(curve.times[k] * scale) << ','
          << format_double(curve.values[k]);
      if (!curve.sigma.empty()) out << ',' << format_double(curve.sigma[k]);
      out << '\n';
    }
    write_file_atomic(out_dir / name, out.str());
    json entry;
    entry["path"] = name;
    entry["sequence"] = {{"n_pulses", curve.seq.n_pulses}};
    if (!curve.label.empty()) entry["label"] = curve.label;
    manifest["curves"].push_back(entry);
  }
  const fs::path manifest_path = out_dir / "manifest.json";
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  return manifest_path;
}

void write_spectrum_csv(const EnsembleResult& result, const fs::path& path,
                        std::optional<double> omega0_hz) {
  const double scale = omega0_hz ? *omega0_hz : 1.0;
  std::ostringstream out;
  out << "omega,mean,std\n";
  for (std::size_t i = 0; i < result.omega_grid.size(); ++i)
    out << format_double(result.omega_grid[i] * scale) << ','
        << format_double(result.mean[i]) << ',' << format_double(result.std[i])
        << '\n';
  write_file_atomic(path, out.str());
}

void write_runs_json(const EnsembleResult& result, const fs::path& path) {
  json doc;
  doc["runs"] = json::array();
  for (const auto& run : result.runs) {
    json entry;
    entry["seed"] = run.seed;
    entry["converged"] = run.converged;
    entry["final_loss"] = run.final_loss;
    entry["iterations"] = run.iterations;
    entry["restarts_used"] = run.restarts_used;
    entry["theta"] = run.theta.values;
    entry["n_basis"] = run.theta.n_basis;
    entry["loss_history"] = run.loss_history;
    doc["runs"].push_back(std::move(entry));
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

void write_report_json(const EnsembleResult& result,
                       const std::string& config_echo_json,
                       const fs::path& path) {
  json doc;
  try {
    doc["config"] = json::parse(config_echo_json);
  } catch (const json::exception& e) {
    throw IoError(std::string("report: bad config echo: ") + e.what());
  }
  int converged = 0;
  double total_wall = 0.0;
  json walls = json::array();
  for (const auto& run : result.runs) {
    if (run.converged) ++converged;
    total_wall += run.wall_time_s;
    walls.push_back(run.wall_time_s);
  }
  doc["converged_runs"] = converged;
  doc["failed_runs"] = result.failures;
  doc["total_wall_time_s"] = total_wall;
  doc["run_wall_times_s"] = walls;
  write_file_atomic(path, doc.dump(2) + "\n");
}

void write_sensitivity_csv(const CoverageReport& report, const fs::path& path) {
  std::ostringstream out;
  out << "omega";
  for (const auto& curve : report.curves) {
    out << ",G_"
        << (curve.seq.is_fid() ? std::string("fid")
                               : "np" + std::to_string(curve.seq.n_pulses));
  }
  out << ",sum\n";
  for (std::size_t i = 0; i < report.omega_grid.size(); ++i) {
    out << format_double(report.omega_grid[i]);
    for (const auto& curve : report.curves)
      out << ',' << format_double(curve.values[i]);
    out << ',' << format_double(report.summed[i]) << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_study_csv(const StudyReport& report, const fs::path& path) {
  // Wall times go to the companion timing file: this CSV must be
  // byte-identical across reruns of the same seeded study.
  std::ostringstream out;
  out << "xi,n_basis,successes,failures,success\n";
  for (const auto& cell : report.cells)
    out << format_double(cell.xi) << ',' << cell.n_basis << ','
        << cell.successes << ',' << cell.failures << ','
        << (cell.success ? 1 : 0) << '\n';
  write_file_atomic(path, out.str());
}

void write_study_timing_json(const StudyReport& report, const fs::path& path) {
  json doc;
  doc["cells"] = json::array();
  double total = 0.0;
  for (const auto& cell : report.cells) {
    doc["cells"].push_back({{"xi", cell.xi},
                            {"n_basis", cell.n_basis},
                            {"wall_time_s", cell.wall_time_s}});
    total += cell.wall_time_s;
  }
  doc["total_wall_time_s"] = total;
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace vqns
