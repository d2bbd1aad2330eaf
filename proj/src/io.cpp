#include "gwh/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gwh/error.hpp"
#include "gwh/rng.hpp"

namespace gwh {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

static_assert(std::endian::native == std::endian::little, "window files assume a little-endian host");

namespace {

constexpr char kWindowMagic[8] = {'G', 'W', 'H', 'W', 'I', 'N', '0', '1'};
constexpr const char* kModelFormat = "gwh-model";
constexpr int kModelVersion = 1;

// Same substream layout as run_trial, so a simulated set matches the windows a
// bench trial sees.
constexpr std::uint64_t kCalibrationStream = 100;
constexpr std::uint64_t kRewireStream = 200;
constexpr std::uint64_t kTestStream = 300;
constexpr std::uint64_t kLatencyStream = 400;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    fail(ErrorCode::Format, "truncated window file " + path);
  return v;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Row-major nested arrays.
Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::VectorXd json_vector(const Json& a, Eigen::Index n, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n)
    fail(ErrorCode::Format, std::string("model field ") + what + " must be an array of " + std::to_string(n));
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Eigen::MatrixXd json_matrix(const Json& a, Eigen::Index n, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n)
    fail(ErrorCode::Format, std::string("model field ") + what + " must have " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) = json_vector(a[static_cast<std::size_t>(i)], n, what).transpose();
  return m;
}

const char* aggregation_name(Aggregation a) {
  switch (a) {
    case Aggregation::Mean: return "mean";
    case Aggregation::Median: return "median";
    case Aggregation::FeatureMean: return "feature_mean";
  }
  return "mean";
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "mean") return Aggregation::Mean;
  if (s == "median") return Aggregation::Median;
  if (s == "feature_mean") return Aggregation::FeatureMean;
  fail(ErrorCode::Format, "unknown aggregation '" + s + "' in model file");
}

std::string pad3(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", v);
  return buf;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

void write_window_file(const std::string& path, const std::vector<WindowRecord>& records) {
  std::uint64_t m = 0, l = 0;
  if (!records.empty()) {
    m = static_cast<std::uint64_t>(records.front().window.sensors());
    l = static_cast<std::uint64_t>(records.front().window.length());
  }
  for (const auto& r : records)
    if (static_cast<std::uint64_t>(r.window.sensors()) != m || static_cast<std::uint64_t>(r.window.length()) != l)
      fail(ErrorCode::DimensionMismatch, "windows in one file must share their shape");

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out.write(kWindowMagic, sizeof kWindowMagic);
  put<std::uint64_t>(out, m);
  put<std::uint64_t>(out, l);
  put<std::uint64_t>(out, records.size());
  std::vector<double> row_major(static_cast<std::size_t>(m * l));
  for (const auto& r : records) {
    put<std::int32_t>(out, r.label);
    put<std::int32_t>(out, r.onset);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        row_major.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l)) = r.window.data;
    out.write(reinterpret_cast<const char*>(row_major.data()),
              static_cast<std::streamsize>(row_major.size() * sizeof(double)));
  }
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

std::vector<WindowRecord> read_window_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kWindowMagic, sizeof magic) != 0)
    fail(ErrorCode::Format, path + " is not a window file");
  const auto m = take<std::uint64_t>(in, path);
  const auto l = take<std::uint64_t>(in, path);
  const auto count = take<std::uint64_t>(in, path);
  if (count > 0 && (m == 0 || l == 0 || m > (1u << 20) || l > (1u << 26)))
    fail(ErrorCode::Format, "implausible window shape in " + path);

  std::vector<WindowRecord> out;
  std::vector<double> row_major(static_cast<std::size_t>(m * l));
  for (std::uint64_t k = 0; k < count; ++k) {
    WindowRecord r;
    r.label = take<std::int32_t>(in, path);
    r.onset = take<std::int32_t>(in, path);
    if (r.label != 0 && r.label != 1) fail(ErrorCode::Format, "bad label in window " + std::to_string(k));
    if (!in.read(reinterpret_cast<char*>(row_major.data()),
                 static_cast<std::streamsize>(row_major.size() * sizeof(double))))
      fail(ErrorCode::Format, "truncated window file " + path);
    r.window.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        row_major.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(l));
    out.push_back(std::move(r));
  }
  if (in.peek() != std::char_traits<char>::eof()) fail(ErrorCode::Format, "trailing bytes in " + path);
  return out;
}

std::string detector_to_json(const Detector& det) {
  const NominalModel& m = det.model;
  Json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["variant"] = variant_name(det.map.kind);
  j["nodes"] = det.nodes;
  j["window_length"] = det.window_length;
  j["wpt_depth"] = det.map.depth;
  j["sensor"] = det.map.sensor;
  j["aggregation"] = aggregation_name(det.map.aggregation);
  j["spectrum"] = {{"eigenvalues", vector_json(det.spectrum.eigenvalues)},
                   {"eigenvectors", matrix_json(det.spectrum.eigenvectors)}};
  j["model"] = {{"dimension", m.dimension()},
                {"calibration_count", m.calibration_count},
                {"shrinkage_rho", m.shrinkage_rho},
                {"cusum_drift_nu", m.cusum_drift_nu},
                {"cusum_threshold_h", m.cusum_threshold_h},
                {"mean", vector_json(m.mean)},
                {"scale", vector_json(m.standardizer.scale)},
                {"shrunk_covariance", matrix_json(m.shrunk_covariance)},
                {"factor", matrix_json(m.factor)}};
  return j.dump(1) + "\n";
}

Detector detector_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
    if (j.value("format", "") != kModelFormat) fail(ErrorCode::Format, "not a gwh model file");
    if (j.at("version").get<int>() != kModelVersion)
      fail(ErrorCode::Format, "unsupported model version " + j.at("version").dump());

    Detector det;
    det.map.kind = parse_variant(j.at("variant").get<std::string>());
    det.nodes = j.at("nodes").get<int>();
    det.window_length = j.at("window_length").get<int>();
    det.map.depth = j.at("wpt_depth").get<int>();
    det.map.sensor = j.at("sensor").get<int>();
    det.map.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    if (det.nodes < 1 || det.window_length < 1 || det.map.depth < 0 || det.map.sensor < 0 ||
        det.map.sensor >= det.nodes)
      fail(ErrorCode::Format, "model header fields out of range");

    const auto& sp = j.at("spectrum");
    det.spectrum.eigenvalues = json_vector(sp.at("eigenvalues"), det.nodes, "eigenvalues");
    det.spectrum.eigenvectors = json_matrix(sp.at("eigenvectors"), det.nodes, "eigenvectors");

    const auto& mj = j.at("model");
    const int d = mj.at("dimension").get<int>();
    if (d != variant_dimension(det.map.kind, det.nodes, det.map.depth))
      fail(ErrorCode::DimensionMismatch, "model dimension " + std::to_string(d) + " does not match its variant");
    NominalModel& m = det.model;
    m.calibration_count = mj.at("calibration_count").get<int>();
    m.shrinkage_rho = mj.at("shrinkage_rho").get<double>();
    m.cusum_drift_nu = mj.at("cusum_drift_nu").get<double>();
    m.cusum_threshold_h = mj.at("cusum_threshold_h").get<double>();
    m.mean = json_vector(mj.at("mean"), d, "mean");
    m.standardizer.offset = m.mean;
    m.standardizer.scale = json_vector(mj.at("scale"), d, "scale");
    m.shrunk_covariance = json_matrix(mj.at("shrunk_covariance"), d, "shrunk_covariance");
    m.factor = json_matrix(mj.at("factor"), d, "factor");
    return det;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, std::string("malformed model file: ") + e.what());
  }
}

void save_detector(const Detector& det, const std::string& path) { write_text_file(path, detector_to_json(det)); }

Detector load_detector(const std::string& path) { return detector_from_json(read_text_file(path)); }

std::string simulate_datasets(const RunConfig& cfg, const std::string& dir, const std::optional<SensorGraph>& fixed_graph) {
  validate_config(cfg);
  if (fixed_graph && fixed_graph->node_count() != cfg.nodes)
    fail(ErrorCode::Config, "graph file has " + std::to_string(fixed_graph->node_count()) +
                                " nodes but nodes = " + std::to_string(cfg.nodes));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());

  const RegimeSpec regime = regime_preset(cfg.regimes.front());
  Json manifest;
  manifest["format"] = "gwh-manifest";
  manifest["version"] = 1;
  manifest["master_seed"] = cfg.seed;
  manifest["regime"] = regime.name;
  manifest["sets"] = Json::array();

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t ts = trial_seed(cfg, trial);
    const SensorGraph graph = fixed_graph ? *fixed_graph
                                          : build_random_geometric_graph(cfg.nodes, cfg.mean_degree,
                                                                         derive_seed(ts, {stage::graph}));
    const LaplacianSpectrum spectrum = eigendecompose(laplacian(graph));
    LaplacianSpectrum test_spectrum = spectrum;
    if (regime.rewire_fraction > 0.0) {
      const auto tag = static_cast<std::uint64_t>(regime.name.empty() ? 0 : regime.name[0]);
      test_spectrum = eigendecompose(
          laplacian(rewire_edges(graph, regime.rewire_fraction, derive_seed(ts, {kRewireStream, tag}))));
    }
    int sensor = 0;
    {
      Rng rng = make_rng(derive_seed(ts, {stage::sensor_pick}));
      sensor = std::uniform_int_distribution<int>(0, cfg.nodes - 1)(rng);
    }

    const Conditions matched = matched_conditions(cfg);
    const Conditions cond = regime_conditions(cfg, regime);
    std::vector<WindowRecord> calib, test, stream;
    for (int i = 0; i < cfg.calibration_windows; ++i)
      calib.push_back(synthesize_window(cfg, spectrum, matched, false,
                                        derive_seed(ts, {kCalibrationStream, static_cast<std::uint64_t>(i)})));
    const int n_test = cfg.test_nominal_windows + cfg.test_anomalous_windows;
    for (int i = 0; i < n_test; ++i)
      test.push_back(synthesize_window(cfg, test_spectrum, cond, i >= cfg.test_nominal_windows,
                                       derive_seed(ts, {kTestStream, static_cast<std::uint64_t>(i)})));
    for (int t = 0; t < cfg.stream_frames; ++t)
      stream.push_back(synthesize_window(cfg, test_spectrum, cond, t >= cfg.stream_onset,
                                         derive_seed(ts, {kLatencyStream, 0, static_cast<std::uint64_t>(t)})));

    const std::string sub = "trial_" + pad3(trial);
    fs::create_directories(fs::path(dir) / sub, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + (fs::path(dir) / sub).string() + ": " + ec.message());
    const auto rel = [&](const char* name) { return sub + "/" + name; };
    save_graph(graph, (fs::path(dir) / rel("graph.txt")).string());
    write_window_file((fs::path(dir) / rel("calibration.gwhw")).string(), calib);
    write_window_file((fs::path(dir) / rel("test.gwhw")).string(), test);
    write_window_file((fs::path(dir) / rel("stream.gwhw")).string(), stream);

    manifest["sets"].push_back({{"trial", trial},
                                {"trial_seed", ts},
                                {"single_source_sensor", sensor},
                                {"graph", rel("graph.txt")},
                                {"calibration", rel("calibration.gwhw")},
                                {"calibration_windows", calib.size()},
                                {"test", rel("test.gwhw")},
                                {"test_nominal_windows", cfg.test_nominal_windows},
                                {"test_anomalous_windows", cfg.test_anomalous_windows},
                                {"stream", rel("stream.gwhw")},
                                {"stream_onset", cfg.stream_onset}});
  }
  const std::string text = manifest.dump(1) + "\n";
  write_text_file((fs::path(dir) / "manifest.json").string(), text);
  return text;
}

ScoreSeries detect_windows(const Detector& det, const std::vector<WindowRecord>& records) {
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(det.score(r.window));
  return run_cusum(scores, det.model.cusum_drift_nu, det.model.cusum_threshold_h);
}

std::string detection_csv(const ScoreSeries& series) {
  std::string out = "frame,score,cusum,alarm\n";
  std::size_t next_alarm = 0;
  for (std::size_t t = 0; t < series.scores.size(); ++t) {
    bool alarm = false;
    if (next_alarm < series.alarms.size() && static_cast<std::size_t>(series.alarms[next_alarm]) == t) {
      alarm = true;
      ++next_alarm;
    }
    out += std::to_string(t) + "," + format_real(series.scores[t]) + "," + format_real(series.cusum[t]) + "," +
           (alarm ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace gwh
