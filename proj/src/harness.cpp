#include "gwh/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "gwh/channel_sim.hpp"
#include "gwh/error.hpp"
#include "gwh/rng.hpp"

namespace gwh {

namespace {

// Substream path components below a trial seed.
constexpr std::uint64_t kCalibrationStream = 100;
constexpr std::uint64_t kRewireStream = 200;
constexpr std::uint64_t kTestStream = 300;
constexpr std::uint64_t kLatencyStream = 400;

std::size_t variant_slot(VariantKind kind) { return static_cast<std::size_t>(kind); }

Eigen::RowVectorXd aggregate_rows(const Eigen::MatrixXd& data, Aggregation aggregation) {
  if (aggregation == Aggregation::Mean) return data.colwise().mean();
  Eigen::RowVectorXd out(data.cols());
  std::vector<double> column(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index t = 0; t < data.cols(); ++t) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) column[i] = data(i, t);
    const auto mid = column.begin() + static_cast<std::ptrdiff_t>(column.size() / 2);
    std::nth_element(column.begin(), mid, column.end());
    double med = *mid;
    if (column.size() % 2 == 0) med = 0.5 * (med + *std::max_element(column.begin(), mid));
    out(t) = med;
  }
  return out;
}

// Per-stream descriptor [RMS | band energies | |skew| | kurt] of every sensor
// averaged across sensors.
Eigen::VectorXd feature_mean(const FeatureVector& raw) {
  const auto& l = raw.layout;
  const int bands = l.bands();
  Eigen::VectorXd out(3 + bands);
  out(0) = raw.energies().mean();
  for (int k = 0; k < bands; ++k) {
    double sum = 0.0;
    for (int m = 0; m < l.rows; ++m) sum += raw.values(l.wpt_offset() + m * bands + k);
    out(1 + k) = sum / l.rows;
  }
  out(1 + bands) = raw.abs_skewness().mean();
  out(2 + bands) = raw.abs_kurtosis().mean();
  return out;
}

Eigen::VectorXd hos_block(const FeatureVector& f) {
  return f.values.segment(f.layout.skew_offset(), 2 * f.layout.rows);
}

double variant_op_count(VariantKind kind, int nodes, int length, int depth) {
  const double m = nodes, l = length, j = depth;
  const double d = variant_dimension(kind, nodes, depth);
  const double scoring = d * d;
  const double wpt_per_row = 2.0 * 4.0 * l * j;
  switch (kind) {
    case VariantKind::GraphWptHos: return m * m * l + m * wpt_per_row + scoring + 1.0;
    case VariantKind::WptHosNoGraph:
    case VariantKind::WptOnly: return m * wpt_per_row + scoring + 1.0;
    case VariantKind::HosOnly: return scoring + 1.0;
    case VariantKind::FusedSource: return m * l + wpt_per_row + scoring + 1.0;
    case VariantKind::SingleSource: return wpt_per_row + scoring + 1.0;
  }
  return 0.0;
}

}  // namespace

int variant_dimension(VariantKind kind, int nodes, int depth) {
  const int bands = 1 << depth;
  switch (kind) {
    case VariantKind::GraphWptHos:
    case VariantKind::WptHosNoGraph: return nodes * (3 + bands);
    case VariantKind::WptOnly: return nodes * bands;
    case VariantKind::HosOnly: return 2 * nodes;
    case VariantKind::FusedSource:
    case VariantKind::SingleSource: return 3 + bands;
  }
  return 0;
}

FeatureVector variant_features(const FeatureMap& map, const WindowMatrix& window, const LaplacianSpectrum& spectrum) {
  switch (map.kind) {
    case VariantKind::GraphWptHos: return extract_features(gft(spectrum, window), map.depth, map.filters);
    case VariantKind::WptHosNoGraph: return extract_features_raw(window, map.depth, map.filters);
    case VariantKind::WptOnly: {
      const auto full = extract_features_raw(window, map.depth, map.filters);
      return FeatureVector{full.wpt_energies(), full.layout};
    }
    case VariantKind::HosOnly: {
      const auto full = extract_features_raw(window, map.depth, map.filters);
      return FeatureVector{hos_block(full), full.layout};
    }
    case VariantKind::FusedSource:
      if (map.aggregation == Aggregation::FeatureMean) {
        const auto raw = extract_features_raw(window, map.depth, map.filters);
        return FeatureVector{feature_mean(raw), FeatureLayout{1, map.depth}};
      }
      return extract_row_features(aggregate_rows(window.data, map.aggregation), map.depth, map.filters);
    case VariantKind::SingleSource:
      if (map.sensor < 0 || map.sensor >= window.sensors())
        fail(ErrorCode::ContractViolation, "single-source sensor index out of range");
      return extract_row_features(window.data.row(map.sensor), map.depth, map.filters);
  }
  fail(ErrorCode::ContractViolation, "unknown variant");
}

std::array<Eigen::VectorXd, 6> all_variant_features(const WindowMatrix& window, const LaplacianSpectrum& spectrum,
                                                    int depth, int sensor, Aggregation aggregation) {
  static const WaveletFilterPair filters = daubechies4_filters();
  std::array<Eigen::VectorXd, 6> out;
  out[variant_slot(VariantKind::GraphWptHos)] = extract_features(gft(spectrum, window), depth, filters).values;
  const auto raw = extract_features_raw(window, depth, filters);
  out[variant_slot(VariantKind::WptHosNoGraph)] = raw.values;
  out[variant_slot(VariantKind::WptOnly)] = raw.wpt_energies();
  out[variant_slot(VariantKind::HosOnly)] = hos_block(raw);
  out[variant_slot(VariantKind::FusedSource)] =
      aggregation == Aggregation::FeatureMean
          ? feature_mean(raw)
          : extract_row_features(aggregate_rows(window.data, aggregation), depth, filters).values;
  out[variant_slot(VariantKind::SingleSource)] = extract_row_features(window.data.row(sensor), depth, filters).values;
  return out;
}

double Detector::score(const WindowMatrix& window) const {
  if (window.sensors() != nodes || window.length() != window_length)
    fail(ErrorCode::DimensionMismatch, "window is " + std::to_string(window.sensors()) + "x" +
                                           std::to_string(window.length()) + ", detector expects " +
                                           std::to_string(nodes) + "x" + std::to_string(window_length));
  return mahalanobis_score(model, variant_features(map, window, spectrum).values);
}

CalibrationOptions calibration_options(const RunConfig& cfg, int calibration_count) {
  CalibrationOptions opt;
  opt.fpr_target = cfg.fpr_target;
  opt.fpr_mode = cfg.fpr_mode;
  opt.score_folds = cfg.calibration_score_folds;
  // Calibration windows are replayed as consecutive streams of the test length.
  const int chunk = std::max(1, std::min(cfg.stream_frames, calibration_count));
  for (int left = calibration_count; left > 0; left -= chunk) opt.stream_layout.push_back(std::min(chunk, left));
  return opt;
}

Detector calibrate_detector(const RunConfig& cfg, VariantKind kind, const LaplacianSpectrum& spectrum,
                            const std::vector<WindowMatrix>& windows, int sensor) {
  if (windows.size() < 2)
    fail(ErrorCode::ContractViolation, "calibration needs at least 2 windows, got " + std::to_string(windows.size()));
  Detector det;
  det.map.kind = kind;
  det.map.depth = cfg.wpt_depth;
  det.map.sensor = sensor;
  det.map.aggregation = cfg.fused_aggregation;
  det.spectrum = spectrum;
  det.nodes = windows.front().sensors();
  det.window_length = windows.front().length();
  if (det.nodes != spectrum.size())
    fail(ErrorCode::DimensionMismatch, "calibration windows have " + std::to_string(det.nodes) +
                                           " sensors, graph has " + std::to_string(spectrum.size()));

  Eigen::MatrixXd feats(static_cast<Eigen::Index>(windows.size()), variant_dimension(kind, det.nodes, cfg.wpt_depth));
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].sensors() != det.nodes || windows[i].length() != det.window_length)
      fail(ErrorCode::DimensionMismatch, "calibration windows differ in shape");
    feats.row(static_cast<Eigen::Index>(i)) = variant_features(det.map, windows[i], spectrum).values.transpose();
  }
  det.model = fit_nominal(feats, calibration_options(cfg, static_cast<int>(windows.size())));
  return det;
}

Conditions matched_conditions(const RunConfig& cfg) { return {cfg.snr_db, cfg.fading_variance, 0.0}; }

Conditions regime_conditions(const RunConfig& cfg, const RegimeSpec& regime) {
  return {cfg.snr_db + regime.snr_delta_db, regime.fading_variance, regime.alpha_perturbation};
}

WindowRecord synthesize_window(const RunConfig& cfg, const LaplacianSpectrum& spectrum, const Conditions& cond,
                               bool anomalous, std::uint64_t seed) {
  const SignalModelParams signal{cfg.smoothness_kernel, cfg.signal_power};
  WindowRecord rec{generate_nominal(spectrum, cfg.window_length, signal, seed), 0, -1};
  if (anomalous) {
    AnomalyParams anomaly;
    anomaly.shape_alpha = cfg.gamma_shape;
    anomaly.scale_beta = cfg.gamma_scale;
    anomaly.duration_fraction = cfg.anomaly_duration;
    anomaly.center = cfg.anomaly_centered;
    if (cond.alpha_perturbation > 0.0) {
      Rng rng = make_rng(derive_seed(seed, {stage::alpha}));
      std::uniform_real_distribution<double> factor(1.0 - cond.alpha_perturbation, 1.0 + cond.alpha_perturbation);
      anomaly.shape_alpha *= factor(rng);
    }
    auto injected = inject_anomaly(rec.window, spectrum, anomaly, seed);
    rec.window = std::move(injected.window);
    rec.label = 1;
    rec.onset = injected.onset;
  }
  ChannelParams channel;
  channel.fading_variance = cond.fading_variance;
  channel.snr_db = cond.snr_db;
  // Receiver noise is set against the nominal signal power so it carries no
  // information about whether the window holds an anomaly.
  channel.reference_power = cfg.signal_power;
  rec.window = apply_channel(rec.window, channel, seed);
  return rec;
}

std::uint64_t trial_seed(const RunConfig& cfg, int trial) {
  return derive_seed(cfg.seed, {static_cast<std::uint64_t>(trial)});
}

TrialResult run_trial(const RunConfig& cfg, const std::vector<RegimeSpec>& regimes, int trial) {
  validate_config(cfg);
  const auto started = std::chrono::steady_clock::now();
  TrialResult out;
  out.trial = trial;
  out.trial_seed = trial_seed(cfg, trial);
  const std::uint64_t ts = out.trial_seed;
  const int m = cfg.nodes;
  const int depth = cfg.wpt_depth;

  auto stage_error = [&](const char* stage, const Error& e) {
    fail(e.code(), "trial " + std::to_string(trial) + " [" + stage + "]: " + e.what());
  };

  SensorGraph graph;
  LaplacianSpectrum spectrum;
  try {
    graph = build_random_geometric_graph(m, cfg.mean_degree, derive_seed(ts, {stage::graph}));
    spectrum = eigendecompose(laplacian(graph));
  } catch (const Error& e) {
    stage_error("graph", e);
  }
  out.edges = graph.edge_count();
  {
    Rng rng = make_rng(derive_seed(ts, {stage::sensor_pick}));
    out.single_source_sensor = std::uniform_int_distribution<int>(0, m - 1)(rng);
  }
  const int sensor = out.single_source_sensor;

  // Calibration at matched conditions only.
  std::array<NominalModel, 6> models;
  try {
    const Conditions matched = matched_conditions(cfg);
    std::array<Eigen::MatrixXd, 6> feats;
    for (VariantKind k : cfg.variants)
      feats[variant_slot(k)].resize(cfg.calibration_windows, variant_dimension(k, m, depth));
    for (int i = 0; i < cfg.calibration_windows; ++i) {
      const auto rec = synthesize_window(cfg, spectrum, matched, false,
                                         derive_seed(ts, {kCalibrationStream, static_cast<std::uint64_t>(i)}));
      const auto f = all_variant_features(rec.window, spectrum, depth, sensor, cfg.fused_aggregation);
      for (VariantKind k : cfg.variants) feats[variant_slot(k)].row(i) = f[variant_slot(k)].transpose();
    }
    const auto opt = calibration_options(cfg, cfg.calibration_windows);
    for (VariantKind k : cfg.variants) models[variant_slot(k)] = fit_nominal(feats[variant_slot(k)], opt);
  } catch (const Error& e) {
    stage_error("calibration", e);
  }

  const int n_test = cfg.test_nominal_windows + cfg.test_anomalous_windows;
  for (const RegimeSpec& regime : regimes) {
    RegimeResult rr;
    rr.regime = regime;
    try {
      LaplacianSpectrum test_spectrum = spectrum;
      if (regime.rewire_fraction > 0.0) {
        const auto tag = static_cast<std::uint64_t>(regime.name.empty() ? 0 : regime.name[0]);
        test_spectrum = eigendecompose(laplacian(rewire_edges(graph, regime.rewire_fraction,
                                                              derive_seed(ts, {kRewireStream, tag}))));
      }
      const Conditions cond = regime_conditions(cfg, regime);

      std::array<std::vector<double>, 6> test_scores;
      std::vector<int> labels(static_cast<std::size_t>(n_test));
      for (int i = 0; i < n_test; ++i) {
        const bool anomalous = i >= cfg.test_nominal_windows;
        const auto rec = synthesize_window(cfg, test_spectrum, cond, anomalous,
                                           derive_seed(ts, {kTestStream, static_cast<std::uint64_t>(i)}));
        labels[i] = rec.label;
        const auto f = all_variant_features(rec.window, spectrum, depth, sensor, cfg.fused_aggregation);
        for (VariantKind k : cfg.variants)
          test_scores[variant_slot(k)].push_back(mahalanobis_score(models[variant_slot(k)], f[variant_slot(k)]));
      }

      // Latency streams: frames before the onset are nominal, all later frames anomalous.
      std::array<std::vector<std::vector<double>>, 6> stream_scores;
      for (VariantKind k : cfg.variants) stream_scores[variant_slot(k)].assign(cfg.stream_count, {});
      for (int s = 0; s < cfg.stream_count; ++s) {
        for (int t = 0; t < cfg.stream_frames; ++t) {
          const auto rec = synthesize_window(
              cfg, test_spectrum, cond, t >= cfg.stream_onset,
              derive_seed(ts, {kLatencyStream, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(t)}));
          const auto f = all_variant_features(rec.window, spectrum, depth, sensor, cfg.fused_aggregation);
          for (VariantKind k : cfg.variants)
            stream_scores[variant_slot(k)][s].push_back(mahalanobis_score(models[variant_slot(k)], f[variant_slot(k)]));
        }
      }

      for (VariantKind k : cfg.variants) {
        const NominalModel& model = models[variant_slot(k)];
        VariantResult vr;
        vr.kind = k;
        vr.dimension = model.dimension();
        vr.shrinkage_rho = model.shrinkage_rho;
        vr.nu = model.cusum_drift_nu;
        vr.h = model.cusum_threshold_h;
        const LabeledScores ls{test_scores[variant_slot(k)], labels};
        vr.roc_auc = roc_auc(ls);
        vr.pr_auc = average_precision(ls);
        vr.f1_point = f1_optimal_point(ls);
        vr.roc = roc_curve(ls);
        vr.pr = pr_curve(ls);

        std::vector<int> onsets(static_cast<std::size_t>(cfg.stream_count), cfg.stream_onset);
        int pre_onset_alarms = 0;
        for (int s = 0; s < cfg.stream_count; ++s) {
          const auto series = run_cusum(stream_scores[variant_slot(k)][s], model.cusum_drift_nu,
                                        model.cusum_threshold_h);
          std::optional<int> first;
          int false_alarms = 0;
          for (int a : series.alarms) {
            if (a < cfg.stream_onset) {
              ++false_alarms;
            } else if (!first) {
              first = a;
            }
          }
          pre_onset_alarms += false_alarms;
          vr.stream_alarms.push_back(first);
          vr.stream_false_alarms.push_back(false_alarms);
        }
        vr.latency = latency_stats(vr.stream_alarms, onsets, cfg.stream_horizon);
        const double pre_frames = static_cast<double>(cfg.stream_count) * cfg.stream_onset;
        vr.nominal_alarm_fraction = pre_frames > 0 ? pre_onset_alarms / pre_frames : 0.0;
        vr.op_count = variant_op_count(k, m, cfg.window_length, depth);
        rr.variants.push_back(std::move(vr));
      }
    } catch (const Error& e) {
      stage_error(("regime " + regime.name).c_str(), e);
    }
    out.regimes.push_back(std::move(rr));
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

CellSummary summarize(const std::vector<double>& values) {
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  CellSummary s;
  if (finite.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan, nan, nan};
  }
  double sum = 0.0;
  for (double v : finite) sum += v;
  s.mean = sum / static_cast<double>(finite.size());
  s.median = percentile(finite, 50.0);
  s.p5 = percentile(finite, 5.0);
  s.p25 = percentile(finite, 25.0);
  s.p75 = percentile(finite, 75.0);
  s.p95 = percentile(finite, 95.0);
  return s;
}

BenchReport run_benchmark(const RunConfig& cfg, BenchReport* partial) {
  validate_config(cfg);
  std::vector<RegimeSpec> regimes;
  for (const auto& name : cfg.regimes) regimes.push_back(regime_preset(name));

  BenchReport report;
  report.config = cfg;
  report.trials.resize(static_cast<std::size_t>(cfg.trials));

  std::vector<char> done(static_cast<std::size_t>(cfg.trials), 0);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::optional<Error> first_error;
  auto worker = [&] {
    for (int t = next++; t < cfg.trials; t = next++) {
      try {
        report.trials[t] = run_trial(cfg, regimes, t);
        done[t] = 1;
      } catch (const Error& e) {
        std::lock_guard lock(err_mutex);
        if (!first_error) first_error = e;
        next = cfg.trials;
      }
    }
  };
  const int jobs = std::max(1, std::min(cfg.jobs, std::max(1, cfg.trials)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) {
    if (partial) {
      partial->config = cfg;
      partial->trials.clear();
      for (int t = 0; t < cfg.trials; ++t)
        if (done[t]) partial->trials.push_back(std::move(report.trials[t]));
    }
    throw *first_error;
  }
  return report;
}

ComplexityRow complexity_counts(int nodes, int window_length, int depth) {
  ComplexityRow r;
  r.nodes = nodes;
  r.window_length = window_length;
  r.depth = depth;
  r.dimension = variant_dimension(VariantKind::GraphWptHos, nodes, depth);
  const double m = nodes, l = window_length, j = depth, d = r.dimension;
  r.gft_macs = m * m * l;
  r.wpt_macs = 2.0 * 4.0 * m * l * j;
  r.scoring_macs = d * d;
  r.cusum_ops = 1.0;
  return r;
}

std::vector<ComplexityRow> complexity_report(const RunConfig& cfg) {
  std::vector<ComplexityRow> rows{complexity_counts(cfg.nodes, cfg.window_length, cfg.wpt_depth)};
  for (int m : {20, 50})
    for (int l : {128, 512}) rows.push_back(complexity_counts(m, l, cfg.wpt_depth));
  return rows;
}

double measure_window_seconds(const RunConfig& cfg, int repetitions) {
  RunConfig c = cfg;
  c.calibration_windows = std::max(c.calibration_windows, 2);
  const auto graph = build_random_geometric_graph(c.nodes, c.mean_degree, c.seed);
  const auto spectrum = eigendecompose(laplacian(graph));
  std::vector<WindowMatrix> calib;
  for (int i = 0; i < std::min(c.calibration_windows, 50); ++i)
    calib.push_back(synthesize_window(c, spectrum, matched_conditions(c), false, derive_seed(c.seed, {1, static_cast<std::uint64_t>(i)})).window);
  const Detector det = calibrate_detector(c, VariantKind::GraphWptHos, spectrum, calib);
  const auto window = synthesize_window(c, spectrum, matched_conditions(c), false, derive_seed(c.seed, {2})).window;
  volatile double sink = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repetitions; ++r) sink = sink + det.score(window);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return secs / std::max(1, repetitions);
}

}  // namespace gwh
