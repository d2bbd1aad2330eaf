#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gwh/error.hpp"
#include "gwh/harness.hpp"

namespace gwh {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kBandGrid = 101;

// nlohmann prints shortest round-trip floats; reports use 17 digits.
void dump_json(const Json& j, std::string& out, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_json(it.value(), out, indent, level + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric arrays stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& v) { return v.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_json(v, out, indent, level + 1);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    default: out += j.dump();
  }
}

Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Metric {
  const char* name;
  double (*get)(const VariantResult&);
};

const Metric kMetrics[] = {
    {"roc_auc", [](const VariantResult& v) { return v.roc_auc; }},
    {"pr_auc", [](const VariantResult& v) { return v.pr_auc; }},
    {"precision", [](const VariantResult& v) { return v.f1_point.precision; }},
    {"recall", [](const VariantResult& v) { return v.f1_point.recall; }},
    {"f1", [](const VariantResult& v) { return v.f1_point.f1; }},
    {"latency_mean", [](const VariantResult& v) { return v.latency.mean; }},
    {"latency_median", [](const VariantResult& v) { return v.latency.median; }},
    {"detection_rate", [](const VariantResult& v) { return v.latency.detection_rate; }},
    {"nominal_alarm_fraction", [](const VariantResult& v) { return v.nominal_alarm_fraction; }},
    {"shrinkage_rho", [](const VariantResult& v) { return v.shrinkage_rho; }},
};

// Results of one (variant, regime) cell across trials.
std::vector<const VariantResult*> cell(const BenchReport& report, std::size_t regime, VariantKind kind) {
  std::vector<const VariantResult*> out;
  for (const auto& t : report.trials)
    for (const auto& v : t.regimes.at(regime).variants)
      if (v.kind == kind) out.push_back(&v);
  return out;
}

double grid_x(int i) { return static_cast<double>(i) / (kBandGrid - 1); }

// Step TPR at each FPR grid point (largest TPR with FPR <= x).
std::vector<double> roc_on_grid(const std::vector<CurvePoint>& pts) {
  std::vector<double> out(kBandGrid, 0.0);
  for (int i = 0; i < kBandGrid; ++i)
    for (const auto& p : pts)
      if (p.x <= grid_x(i) + 1e-12) out[i] = std::max(out[i], p.y);
  return out;
}

// Interpolated precision at each recall grid point (largest precision with recall >= r).
std::vector<double> pr_on_grid(const std::vector<CurvePoint>& pts) {
  std::vector<double> out(kBandGrid, 0.0);
  for (int i = 0; i < kBandGrid; ++i)
    for (const auto& p : pts)
      if (p.x >= grid_x(i) - 1e-12) out[i] = std::max(out[i], p.y);
  return out;
}

Json band(const std::vector<std::vector<double>>& curves) {
  Json grid = Json::array(), mean = Json::array(), lo = Json::array(), hi = Json::array();
  for (int i = 0; i < kBandGrid; ++i) {
    std::vector<double> col;
    for (const auto& c : curves) col.push_back(c[i]);
    const auto s = summarize(col);
    grid.push_back(grid_x(i));
    mean.push_back(real(s.mean));
    lo.push_back(real(s.p5));
    hi.push_back(real(s.p95));
  }
  return Json{{"grid", grid}, {"mean", mean}, {"p5", lo}, {"p95", hi}};
}

LatencySummary pooled_latency(const std::vector<const VariantResult*>& results, const RunConfig& cfg) {
  std::vector<std::optional<int>> alarms;
  for (const auto* v : results) alarms.insert(alarms.end(), v->stream_alarms.begin(), v->stream_alarms.end());
  return latency_stats(alarms, std::vector<int>(alarms.size(), cfg.stream_onset), cfg.stream_horizon);
}

Json latency_json(const LatencySummary& l) {
  return Json{{"mean", real(l.mean)},         {"median", real(l.median)},
              {"std", real(l.std)},           {"p5", real(l.p5_p95.first)},
              {"p95", real(l.p5_p95.second)}, {"detection_rate", real(l.detection_rate)},
              {"detected", l.detected},       {"streams", l.streams}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

std::string seed_header(const BenchReport& r) { return "# master_seed=" + std::to_string(r.config.seed) + "\n"; }

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string report_json(const BenchReport& report) {
  const RunConfig& cfg = report.config;
  Json root;
  root["format"] = "gwh-bench-report";
  root["version"] = 1;
  root["master_seed"] = cfg.seed;
  Json config = Json::object();
  for (const auto& key : config_keys()) {
    // Execution settings do not affect any result.
    if (std::string(key.name) == "jobs" || std::string(key.name) == "output_dir") continue;
    std::string v = get_config_value(cfg, key.name);
    if (v.size() >= 2 && v.front() == '"') v = v.substr(1, v.size() - 2);
    config[key.name] = v;
  }
  root["config"] = config;
  root["trials"] = static_cast<int>(report.trials.size());

  Json summary = Json::array(), latency = Json::array(), aucs = Json::array();
  Json roc_bands = Json::array(), pr_bands = Json::array();
  for (std::size_t r = 0; r < cfg.regimes.size(); ++r) {
    for (VariantKind k : cfg.variants) {
      const auto results = cell(report, r, k);
      if (results.empty()) continue;
      for (const auto& metric : kMetrics) {
        std::vector<double> vals;
        for (const auto* v : results) vals.push_back(metric.get(*v));
        const auto s = summarize(vals);
        summary.push_back(Json{{"variant", variant_name(k)}, {"regime", cfg.regimes[r]}, {"metric", metric.name},
                               {"mean", real(s.mean)}, {"median", real(s.median)}, {"p5", real(s.p5)},
                               {"p25", real(s.p25)}, {"p75", real(s.p75)}, {"p95", real(s.p95)}});
      }
      Json lat = latency_json(pooled_latency(results, cfg));
      lat["variant"] = variant_name(k);
      lat["regime"] = cfg.regimes[r];
      latency.push_back(lat);

      Json values = Json::array();
      std::vector<std::vector<double>> roc_grid, pr_grid;
      for (const auto* v : results) {
        values.push_back(v->roc_auc);
        roc_grid.push_back(roc_on_grid(v->roc));
        pr_grid.push_back(pr_on_grid(v->pr));
      }
      aucs.push_back(Json{{"variant", variant_name(k)}, {"regime", cfg.regimes[r]}, {"roc_auc", values}});
      Json rb = band(roc_grid);
      rb["variant"] = variant_name(k);
      rb["regime"] = cfg.regimes[r];
      roc_bands.push_back(rb);
      Json pb = band(pr_grid);
      pb["variant"] = variant_name(k);
      pb["regime"] = cfg.regimes[r];
      pr_bands.push_back(pb);
    }
  }
  root["summary"] = summary;
  root["latency_pooled"] = latency;
  root["auc_distribution"] = aucs;
  root["roc_bands"] = roc_bands;
  root["pr_bands"] = pr_bands;

  Json trials = Json::array();
  for (const auto& t : report.trials) {
    Json jt{{"trial", t.trial}, {"trial_seed", t.trial_seed}, {"edges", t.edges},
            {"single_source_sensor", t.single_source_sensor}};
    Json regimes = Json::array();
    for (const auto& rr : t.regimes) {
      Json vars = Json::array();
      for (const auto& v : rr.variants) {
        vars.push_back(Json{{"variant", variant_name(v.kind)},
                            {"dimension", v.dimension},
                            {"shrinkage_rho", real(v.shrinkage_rho)},
                            {"nu", real(v.nu)},
                            {"h", real(v.h)},
                            {"roc_auc", real(v.roc_auc)},
                            {"pr_auc", real(v.pr_auc)},
                            {"precision", real(v.f1_point.precision)},
                            {"recall", real(v.f1_point.recall)},
                            {"f1", real(v.f1_point.f1)},
                            {"f1_threshold", real(v.f1_point.threshold)},
                            {"latency", latency_json(v.latency)},
                            {"nominal_alarm_fraction", real(v.nominal_alarm_fraction)},
                            {"op_count", real(v.op_count)}});
      }
      regimes.push_back(Json{{"regime", rr.regime.name}, {"variants", vars}});
    }
    jt["regimes"] = regimes;
    trials.push_back(jt);
  }
  root["trial_results"] = trials;

  Json complexity = Json::array();
  for (const auto& c : complexity_report(cfg)) {
    complexity.push_back(Json{{"nodes", c.nodes},
                              {"window_length", c.window_length},
                              {"depth", c.depth},
                              {"dimension", c.dimension},
                              {"gft_macs", c.gft_macs},
                              {"wpt_macs", c.wpt_macs},
                              {"scoring_macs", c.scoring_macs},
                              {"cusum_ops", c.cusum_ops},
                              {"total_macs", c.total()},
                              {"within_1e5_1e7", c.total() >= 1e5 && c.total() <= 1e7}});
  }
  root["complexity"] = complexity;

  std::string out;
  dump_json(root, out, 2, 0);
  out += "\n";
  return out;
}

void write_bench_outputs(const BenchReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir + ": " + ec.message());
  const RunConfig& cfg = report.config;
  const fs::path base(dir);

  std::ostringstream summary, roc, pr, latency, complexity;
  summary << seed_header(report) << "variant,regime,metric,mean,median,p5,p95\n";
  roc << seed_header(report) << "variant,regime,trial,x,y\n";
  pr << seed_header(report) << "variant,regime,trial,x,y\n";
  latency << seed_header(report) << "variant,regime,stream,latency_frames,detected\n";
  for (std::size_t r = 0; r < cfg.regimes.size(); ++r) {
    const std::string& regime = cfg.regimes[r];
    for (VariantKind k : cfg.variants) {
      const auto results = cell(report, r, k);
      const std::string name = variant_name(k);
      for (const auto& metric : kMetrics) {
        std::vector<double> vals;
        for (const auto* v : results) vals.push_back(metric.get(*v));
        const auto s = summarize(vals);
        summary << name << ',' << regime << ',' << metric.name << ',' << format_real(s.mean) << ','
                << format_real(s.median) << ',' << format_real(s.p5) << ',' << format_real(s.p95) << '\n';
      }
      for (std::size_t t = 0; t < results.size(); ++t) {
        for (const auto& p : results[t]->roc)
          roc << name << ',' << regime << ',' << t << ',' << format_real(p.x) << ',' << format_real(p.y) << '\n';
        for (const auto& p : results[t]->pr)
          pr << name << ',' << regime << ',' << t << ',' << format_real(p.x) << ',' << format_real(p.y) << '\n';
        for (std::size_t s = 0; s < results[t]->stream_alarms.size(); ++s) {
          const auto& a = results[t]->stream_alarms[s];
          const int lat = a ? std::max(0, *a - cfg.stream_onset) : -1;
          const bool detected = a && lat < cfg.stream_horizon;
          latency << name << ',' << regime << ',' << t * results[t]->stream_alarms.size() + s << ','
                  << (detected ? std::to_string(lat) : std::string("nan")) << ',' << (detected ? 1 : 0) << '\n';
        }
      }
    }
  }
  complexity << seed_header(report)
             << "nodes,window_length,depth,dimension,gft_macs,wpt_macs,scoring_macs,cusum_ops,total_macs,"
                "within_1e5_1e7\n";
  for (const auto& c : complexity_report(cfg)) {
    complexity << c.nodes << ',' << c.window_length << ',' << c.depth << ',' << c.dimension << ','
               << format_real(c.gft_macs) << ',' << format_real(c.wpt_macs) << ',' << format_real(c.scoring_macs)
               << ',' << format_real(c.cusum_ops) << ',' << format_real(c.total()) << ','
               << ((c.total() >= 1e5 && c.total() <= 1e7) ? 1 : 0) << '\n';
  }

  write_file(base / "bench_summary.csv", summary.str());
  write_file(base / "roc_points.csv", roc.str());
  write_file(base / "pr_points.csv", pr.str());
  write_file(base / "latency.csv", latency.str());
  write_file(base / "complexity.csv", complexity.str());
  write_file(base / "report.json", report_json(report));
}

}  // namespace gwh
