#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gwh/channel_sim.hpp"
#include "gwh/scoring.hpp"

namespace gwh {

enum class VariantKind {
  GraphWptHos,
  WptHosNoGraph,
  WptOnly,
  HosOnly,
  FusedSource,
  SingleSource,
};

inline constexpr VariantKind kAllVariants[] = {
    VariantKind::GraphWptHos, VariantKind::WptHosNoGraph, VariantKind::WptOnly,
    VariantKind::HosOnly,     VariantKind::FusedSource,   VariantKind::SingleSource,
};

const char* variant_name(VariantKind kind) noexcept;
VariantKind parse_variant(const std::string& name);

enum class Aggregation {
  Mean,         // sensor-mean sequence, then the per-stream map
  Median,       // sensor-median sequence, then the per-stream map
  FeatureMean,  // per-stream map on every sensor, descriptors averaged
};

/// Test-time perturbation relative to the (always matched) calibration.
struct RegimeSpec {
  std::string name;
  double snr_delta_db = 0.0;
  double fading_variance = 1.0;
  double rewire_fraction = 0.0;
  double alpha_perturbation = 0.0;  // per-window shape factor drawn from [1-p, 1+p]
};

/// Presets "A".."D".
RegimeSpec regime_preset(const std::string& name);

struct RunConfig {
  // Network and window.
  int nodes = 24;
  int window_length = 256;
  double mean_degree = 4.0;
  // Channel at calibration (matched) conditions.
  double snr_db = 20.0;
  double fading_variance = 1.0;
  // Nominal signal.
  SmoothnessKernel smoothness_kernel = SmoothnessKernel::InverseLaplacian;
  double signal_power = 22.0;
  // Anomaly.
  double gamma_shape = 2.0;
  double gamma_scale = 1.5;
  double anomaly_duration = 0.25;
  bool anomaly_centered = false;
  // Features and scoring.
  int wpt_depth = 3;
  double fpr_target = 0.05;
  FprMode fpr_mode = FprMode::PerFrame;
  int calibration_score_folds = 10;
  Aggregation fused_aggregation = Aggregation::Mean;
  // Monte Carlo protocol.
  int trials = 30;
  int calibration_windows = 200;
  int test_nominal_windows = 200;
  int test_anomalous_windows = 100;
  int stream_count = 20;
  int stream_frames = 100;
  int stream_onset = 20;
  int stream_horizon = 80;
  std::vector<std::string> regimes{"A", "B", "C", "D"};
  std::vector<VariantKind> variants{std::begin(kAllVariants), std::end(kAllVariants)};
  // Single-detector commands (calibrate / detect).
  VariantKind variant = VariantKind::GraphWptHos;
  // Execution.
  std::uint64_t seed = 20240917;
  int jobs = 1;
  std::string output_dir = "gwh_out";
};

struct ConfigKey {
  const char* name;
  const char* help;
};

/// Every key accepted by set_config_value, in dump order.
const std::vector<ConfigKey>& config_keys();

/// Parses and range-checks one value; throws ErrorCode::Config.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// Value in set_config_value syntax (strings unquoted).
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Cross-field validation; throws ErrorCode::Config.
void validate_config(const RunConfig& cfg);

/// `key = value` lines (TOML-compatible), one per key.
std::string dump_config(const RunConfig& cfg);

}  // namespace gwh
