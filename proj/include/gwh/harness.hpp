#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gwh/config.hpp"
#include "gwh/features.hpp"
#include "gwh/graph_spectral.hpp"
#include "gwh/metrics.hpp"
#include "gwh/scoring.hpp"

namespace gwh {

int variant_dimension(VariantKind kind, int nodes, int depth);

/// Everything a variant needs to map a window to its descriptor.
struct FeatureMap {
  VariantKind kind = VariantKind::GraphWptHos;
  int depth = 3;
  int sensor = 0;  // SingleSource only
  Aggregation aggregation = Aggregation::Mean;
  WaveletFilterPair filters = daubechies4_filters();
};

FeatureVector variant_features(const FeatureMap& map, const WindowMatrix& window, const LaplacianSpectrum& spectrum);

/// Descriptors of all six variants for one window, sharing the common work.
std::array<Eigen::VectorXd, 6> all_variant_features(const WindowMatrix& window, const LaplacianSpectrum& spectrum,
                                                    int depth, int sensor, Aggregation aggregation);

/// Calibrated single detector: feature map, calibration spectrum, model.
struct Detector {
  FeatureMap map;
  LaplacianSpectrum spectrum;
  NominalModel model;
  int nodes = 0;
  int window_length = 0;

  double score(const WindowMatrix& window) const;
};

/// Fits a detector from nominal calibration windows.
Detector calibrate_detector(const RunConfig& cfg, VariantKind kind, const LaplacianSpectrum& spectrum,
                            const std::vector<WindowMatrix>& windows, int sensor = 0);

CalibrationOptions calibration_options(const RunConfig& cfg, int calibration_count);

// ---------------------------------------------------------------------------
// Window synthesis shared by the harness and `simulate`.

struct WindowRecord {
  WindowMatrix window;
  int label = 0;    // 1 = anomalous
  int onset = -1;   // first anomalous sample, -1 for nominal windows
};

/// Test/calibration conditions applied to one synthesized window.
struct Conditions {
  double snr_db = 20.0;
  double fading_variance = 1.0;
  double alpha_perturbation = 0.0;
};

Conditions matched_conditions(const RunConfig& cfg);
Conditions regime_conditions(const RunConfig& cfg, const RegimeSpec& regime);

WindowRecord synthesize_window(const RunConfig& cfg, const LaplacianSpectrum& spectrum, const Conditions& cond,
                               bool anomalous, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trials.

struct VariantResult {
  VariantKind kind{};
  int dimension = 0;
  double shrinkage_rho = 0.0;
  double nu = 0.0;
  double h = 0.0;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  OperatingPoint f1_point;
  LatencySummary latency;
  std::vector<std::optional<int>> stream_alarms;  // first alarm at or after onset
  std::vector<int> stream_false_alarms;           // pre-onset alarm frames per stream
  double nominal_alarm_fraction = 0.0;            // alarmed pre-onset frames / pre-onset frames
  std::vector<CurvePoint> roc;
  std::vector<CurvePoint> pr;
  double op_count = 0.0;  // analytic MACs per window
};

struct RegimeResult {
  RegimeSpec regime;
  std::vector<VariantResult> variants;
};

struct TrialResult {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  int single_source_sensor = 0;
  int edges = 0;
  std::vector<RegimeResult> regimes;
  double wall_seconds = 0.0;  // not part of any deterministic output
};

std::uint64_t trial_seed(const RunConfig& cfg, int trial);

/// One trial over the given regimes; calibration is shared across regimes.
TrialResult run_trial(const RunConfig& cfg, const std::vector<RegimeSpec>& regimes, int trial);

struct CellSummary {
  double mean = 0.0;
  double median = 0.0;
  double p5 = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
};

CellSummary summarize(const std::vector<double>& values);

struct BenchReport {
  RunConfig config;
  std::vector<TrialResult> trials;
};

/// 30-trial (by default) benchmark; trials run on cfg.jobs threads and are
/// stored in trial order. When a trial fails and `partial` is set, it receives
/// the completed trials before the error propagates.
BenchReport run_benchmark(const RunConfig& cfg, BenchReport* partial = nullptr);

// ---------------------------------------------------------------------------
// Complexity.

struct ComplexityRow {
  int nodes = 0;
  int window_length = 0;
  int depth = 0;
  int dimension = 0;
  double gft_macs = 0.0;
  double wpt_macs = 0.0;
  double scoring_macs = 0.0;
  double cusum_ops = 0.0;
  double total() const { return gft_macs + wpt_macs + scoring_macs + cusum_ops; }
};

ComplexityRow complexity_counts(int nodes, int window_length, int depth);
/// Configured point plus the M in {20, 50} x L in {128, 512} sweep.
std::vector<ComplexityRow> complexity_report(const RunConfig& cfg);
/// Measured seconds per window of the full graph pipeline (feature + score).
double measure_window_seconds(const RunConfig& cfg, int repetitions);

// ---------------------------------------------------------------------------
// Report files.

/// Writes bench_summary.csv, roc_points.csv, pr_points.csv, latency.csv,
/// complexity.csv and report.json into `dir` (created if missing).
void write_bench_outputs(const BenchReport& report, const std::string& dir);

/// report.json text; deterministic for a fixed configuration.
std::string report_json(const BenchReport& report);

/// Formats a double with 17 significant digits ("nan"/"inf" spelled out).
std::string format_real(double v);

}  // namespace gwh
