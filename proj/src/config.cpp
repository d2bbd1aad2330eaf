#include "gwh/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "gwh/error.hpp"

namespace gwh {

const char* variant_name(VariantKind kind) noexcept {
  switch (kind) {
    case VariantKind::GraphWptHos: return "graph_wpt_hos";
    case VariantKind::WptHosNoGraph: return "wpt_hos_no_graph";
    case VariantKind::WptOnly: return "wpt_only";
    case VariantKind::HosOnly: return "hos_only";
    case VariantKind::FusedSource: return "fused_source";
    case VariantKind::SingleSource: return "single_source";
  }
  return "unknown";
}

VariantKind parse_variant(const std::string& name) {
  for (VariantKind k : kAllVariants)
    if (name == variant_name(k)) return k;
  fail(ErrorCode::Config, "unknown variant '" + name + "'");
}

RegimeSpec regime_preset(const std::string& name) {
  if (name == "A") return {"A", 0.0, 1.0, 0.0, 0.0};
  if (name == "B") return {"B", -5.0, 1.0, 0.0, 0.0};
  if (name == "C") return {"C", -10.0, 1.5, 0.10, 0.0};
  if (name == "D") return {"D", -15.0, 2.0, 0.25, 0.25};
  fail(ErrorCode::Config, "unknown regime '" + name + "' (expected A, B, C or D)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n\"'");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"'");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(trim(s));
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
  fail(ErrorCode::Config, "config key '" + key + "': invalid value '" + value + "' (" + why + ")");
}

long long parse_int(const std::string& key, const std::string& raw, long long lo, long long hi) {
  const std::string v = trim(raw);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, raw, "expected an integer");
  if (out < lo || out > hi)
    bad_value(key, raw, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return out;
}

double parse_real(const std::string& key, const std::string& raw, double lo, double hi, bool open_lo = false) {
  const std::string v = trim(raw);
  double out = 0.0;
  std::istringstream in(v);
  in >> out;
  if (v.empty() || in.fail() || !in.eof() || !std::isfinite(out)) bad_value(key, raw, "expected a finite number");
  if (out > hi || out < lo || (open_lo && out == lo)) {
    std::ostringstream os;
    os << "must lie in " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
    bad_value(key, raw, os.str());
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, raw, "expected true or false");
}

// Shortest text that parses back to the same double.
std::string real_str(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string toml_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string toml_unquote(const std::string& s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return s;
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};


const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto int_key = [&t](const char* name, const char* help, int RunConfig::*field, long long lo, long long hi) {
      t.push_back({{name, help},
                   [=](RunConfig& c, const std::string& v) { c.*field = static_cast<int>(parse_int(name, v, lo, hi)); },
                   [=](const RunConfig& c) { return std::to_string(c.*field); }});
    };
    auto real_key = [&t](const char* name, const char* help, double RunConfig::*field, double lo, double hi,
                         bool open_lo) {
      t.push_back({{name, help},
                   [=](RunConfig& c, const std::string& v) { c.*field = parse_real(name, v, lo, hi, open_lo); },
                   [=](const RunConfig& c) { return real_str(c.*field); }});
    };

    int_key("nodes", "number of sensors M", &RunConfig::nodes, 2, 1000);
    int_key("window_length", "samples per window L", &RunConfig::window_length, 4, 1 << 20);
    real_key("mean_degree", "target mean nodal degree of the random geometric graph", &RunConfig::mean_degree, 1.0,
             1000.0, false);
    real_key("snr_db", "calibration (matched) SNR in dB against faded-signal power", &RunConfig::snr_db, -50.0, 100.0,
             false);
    real_key("fading_variance", "Rayleigh fading variance at calibration", &RunConfig::fading_variance, 0.0, 1e6,
             true);
    t.push_back({{"smoothness_kernel", "nominal spectral kernel: inverse (1/(1+lambda)) or flat"},
                 [](RunConfig& c, const std::string& v) {
                   const auto s = trim(v);
                   if (s == "inverse") c.smoothness_kernel = SmoothnessKernel::InverseLaplacian;
                   else if (s == "flat") c.smoothness_kernel = SmoothnessKernel::Flat;
                   else bad_value("smoothness_kernel", v, "expected inverse or flat");
                 },
                 [](const RunConfig& c) -> std::string {
                   return toml_string(c.smoothness_kernel == SmoothnessKernel::Flat ? "flat" : "inverse");
                 }});
    real_key("signal_power", "average per-node variance of the nominal signal", &RunConfig::signal_power, 0.0, 1e12,
             true);
    real_key("gamma_shape", "anomaly Gamma shape alpha", &RunConfig::gamma_shape, 0.0, 1e6, true);
    real_key("gamma_scale", "anomaly Gamma scale beta", &RunConfig::gamma_scale, 0.0, 1e6, true);
    real_key("anomaly_duration", "anomaly duration as a fraction of L", &RunConfig::anomaly_duration, 0.0, 1.0, true);
    t.push_back({{"anomaly_centered", "subtract the Gamma mean from the injected samples"},
                 [](RunConfig& c, const std::string& v) { c.anomaly_centered = parse_bool("anomaly_centered", v); },
                 [](const RunConfig& c) { return std::string(c.anomaly_centered ? "true" : "false"); }});
    int_key("wpt_depth", "wavelet packet depth J", &RunConfig::wpt_depth, 0, 16);
    real_key("fpr_target", "CUSUM false-alarm target on calibration streams", &RunConfig::fpr_target, 0.0, 1.0, true);
    t.push_back({{"fpr_mode", "threshold criterion: per_frame or per_sequence"},
                 [](RunConfig& c, const std::string& v) {
                   const auto s = trim(v);
                   if (s == "per_frame") c.fpr_mode = FprMode::PerFrame;
                   else if (s == "per_sequence") c.fpr_mode = FprMode::PerSequence;
                   else bad_value("fpr_mode", v, "expected per_frame or per_sequence");
                 },
                 [](const RunConfig& c) -> std::string {
                   return toml_string(c.fpr_mode == FprMode::PerFrame ? "per_frame" : "per_sequence");
                 }});
    int_key("calibration_score_folds", "cross-fitting folds for drift/threshold scores (<2: in-sample)",
            &RunConfig::calibration_score_folds, 0, 1000);
    t.push_back({{"fused_aggregation", "fused-source aggregation: mean, median or feature_mean"},
                 [](RunConfig& c, const std::string& v) {
                   const auto s = trim(v);
                   if (s == "mean") c.fused_aggregation = Aggregation::Mean;
                   else if (s == "median") c.fused_aggregation = Aggregation::Median;
                   else if (s == "feature_mean") c.fused_aggregation = Aggregation::FeatureMean;
                   else bad_value("fused_aggregation", v, "expected mean, median or feature_mean");
                 },
                 [](const RunConfig& c) -> std::string {
                   switch (c.fused_aggregation) {
                     case Aggregation::Median: return toml_string("median");
                     case Aggregation::FeatureMean: return toml_string("feature_mean");
                     default: return toml_string("mean");
                   }
                 }});
    int_key("trials", "Monte Carlo trials", &RunConfig::trials, 0, 100000);
    int_key("calibration_windows", "nominal calibration windows per trial", &RunConfig::calibration_windows, 2,
            1000000);
    int_key("test_nominal_windows", "nominal test windows per trial", &RunConfig::test_nominal_windows, 1, 1000000);
    int_key("test_anomalous_windows", "anomalous test windows per trial", &RunConfig::test_anomalous_windows, 1,
            1000000);
    int_key("stream_count", "CUSUM latency streams per trial", &RunConfig::stream_count, 0, 100000);
    int_key("stream_frames", "frames per latency stream", &RunConfig::stream_frames, 1, 1000000);
    int_key("stream_onset", "first anomalous frame of each latency stream", &RunConfig::stream_onset, 0, 1000000);
    int_key("stream_horizon", "frames after onset within which an alarm counts as detection",
            &RunConfig::stream_horizon, 1, 1000000);
    t.push_back({{"regimes", "comma-separated regime presets (A,B,C,D)"},
                 [](RunConfig& c, const std::string& v) {
                   auto items = split_list(v);
                   if (items.empty()) bad_value("regimes", v, "at least one regime required");
                   for (const auto& r : items) regime_preset(r);
                   c.regimes = std::move(items);
                 },
                 [](const RunConfig& c) -> std::string {
                   std::string s;
                   for (const auto& r : c.regimes) s += (s.empty() ? "" : ",") + r;
                   return toml_string(s);
                 }});
    t.push_back({{"variants", "comma-separated detector variants for bench"},
                 [](RunConfig& c, const std::string& v) {
                   std::vector<VariantKind> out;
                   for (const auto& name : split_list(v)) out.push_back(parse_variant(name));
                   if (out.empty()) bad_value("variants", v, "at least one variant required");
                   c.variants = std::move(out);
                 },
                 [](const RunConfig& c) -> std::string {
                   std::string s;
                   for (auto k : c.variants) s += (s.empty() ? "" : ",") + std::string(variant_name(k));
                   return toml_string(s);
                 }});
    t.push_back({{"variant", "detector variant for calibrate/detect"},
                 [](RunConfig& c, const std::string& v) { c.variant = parse_variant(trim(v)); },
                 [](const RunConfig& c) { return toml_string(variant_name(c.variant)); }});
    t.push_back({{"seed", "64-bit master seed"},
                 [](RunConfig& c, const std::string& v) {
                   const std::string s = trim(v);
                   std::uint64_t out = 0;
                   const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
                   if (ec != std::errc() || ptr != s.data() + s.size())
                     bad_value("seed", v, "expected an unsigned 64-bit integer");
                   c.seed = out;
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    int_key("jobs", "worker threads for trials", &RunConfig::jobs, 1, 1024);
    t.push_back({{"output_dir", "directory for generated files"},
                 [](RunConfig& c, const std::string& v) {
                   const auto s = trim(v);
                   if (s.empty()) bad_value("output_dir", v, "must not be empty");
                   c.output_dir = s;
                 },
                 [](const RunConfig& c) { return toml_string(c.output_dir); }});
    return t;
  }();
  return table;
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (key == e.key.name) return e;
  fail(ErrorCode::Config, "unknown config key '" + key + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& e : entries()) k.push_back(e.key);
    return k;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_entry(key).set(cfg, value);
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  return toml_unquote(find_entry(key).get(cfg));
}

void validate_config(const RunConfig& cfg) {
  auto bad = [](const std::string& msg) { fail(ErrorCode::Config, msg); };
  if (cfg.mean_degree > cfg.nodes - 1) bad("mean_degree must not exceed nodes - 1");
  if (cfg.window_length % (1 << cfg.wpt_depth) != 0)
    bad("window_length must be divisible by 2^wpt_depth");
  if (static_cast<int>(cfg.anomaly_duration * cfg.window_length) < 1)
    bad("anomaly_duration * window_length must cover at least one sample");
  if (cfg.stream_onset >= cfg.stream_frames) bad("stream_onset must be smaller than stream_frames");
  for (const auto& r : cfg.regimes) regime_preset(r);
  if (cfg.variants.empty()) bad("variants must not be empty");
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += std::string(e.key.name) + " = " + e.get(cfg) + "\n";
  return out;
}

}  // namespace gwh
