#include "gwh/gwh.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include <json.hpp>

#include "gwh/config.hpp"
#include "gwh/error.hpp"
#include "gwh/graph_spectral.hpp"
#include "gwh/harness.hpp"
#include "gwh/io.hpp"

struct gwh_config {
  gwh::RunConfig cfg;
};
struct gwh_graph {
  gwh::SensorGraph graph;
};
struct gwh_spectrum {
  gwh::LaplacianSpectrum spectrum;
};
struct gwh_model {
  gwh::Detector detector;
};

namespace {

thread_local std::string last_error;

gwh_status remember(gwh_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into a status and the thread's last
// error message.
template <class F>
gwh_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return GWH_OK;
  } catch (const gwh::Error& e) {
    return remember(static_cast<gwh_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return remember(GWH_E_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return remember(GWH_E_RUNTIME, e.what());
  } catch (...) {
    return remember(GWH_E_RUNTIME, "unknown exception");
  }
}

gwh_status copy_out(const std::string& text, char* buf, std::size_t size, std::size_t* needed) {
  if (needed) *needed = text.size();
  if (!buf || size == 0) return GWH_OK;
  const std::size_t n = std::min(size - 1, text.size());
  std::memcpy(buf, text.data(), n);
  buf[n] = '\0';
  if (n < text.size()) return remember(GWH_E_CONTRACT, "buffer too small; need " + std::to_string(text.size() + 1));
  return GWH_OK;
}

gwh::WindowMatrix row_major_window(const double* data, int nodes, int length) {
  gwh::WindowMatrix w;
  w.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(data, nodes, length);
  return w;
}

void store_row_major(const Eigen::MatrixXd& m, double* out) {
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, m.rows(), m.cols()) = m;
}

std::string trial_timing_json(const gwh::BenchReport& report, double window_seconds) {
  nlohmann::ordered_json j;
  j["master_seed"] = report.config.seed;
  j["seconds_per_window"] = window_seconds;
  double total = 0.0;
  auto trials = nlohmann::ordered_json::array();
  for (const auto& t : report.trials) {
    trials.push_back(t.wall_seconds);
    total += t.wall_seconds;
  }
  j["trial_seconds"] = trials;
  j["total_trial_seconds"] = total;
  return j.dump(1) + "\n";
}

}  // namespace

extern "C" {

const char* gwh_last_error(void) { return last_error.c_str(); }

const char* gwh_status_name(gwh_status status) {
  switch (status) {
    case GWH_OK: return "ok";
    case GWH_E_NULL: return "null_argument";
    default: break;
  }
  if (status >= GWH_E_CONTRACT && status <= GWH_E_RUNTIME)
    return gwh::error_code_name(static_cast<gwh::ErrorCode>(static_cast<int>(status)));
  return "unknown_error";
}

const char* gwh_version(void) { return "1.0.0"; }

gwh_status gwh_config_create(gwh_config** out) {
  if (!out) return remember(GWH_E_NULL, "out must not be null");
  return guarded([&] { *out = new gwh_config{}; });
}

void gwh_config_destroy(gwh_config* cfg) { delete cfg; }

gwh_status gwh_config_set(gwh_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return remember(GWH_E_NULL, "config, key and value must not be null");
  return guarded([&] { gwh::set_config_value(cfg->cfg, key, value); });
}

gwh_status gwh_config_get(const gwh_config* cfg, const char* key, char* buf, size_t size, size_t* needed) {
  if (!cfg || !key) return remember(GWH_E_NULL, "config and key must not be null");
  std::string value;
  const gwh_status st = guarded([&] { value = gwh::get_config_value(cfg->cfg, key); });
  return st != GWH_OK ? st : copy_out(value, buf, size, needed);
}

size_t gwh_config_key_count(void) { return gwh::config_keys().size(); }

const char* gwh_config_key_name(size_t index) {
  const auto& keys = gwh::config_keys();
  return index < keys.size() ? keys[index].name : nullptr;
}

const char* gwh_config_key_help(size_t index) {
  const auto& keys = gwh::config_keys();
  return index < keys.size() ? keys[index].help : nullptr;
}

gwh_status gwh_config_validate(const gwh_config* cfg) {
  if (!cfg) return remember(GWH_E_NULL, "config must not be null");
  return guarded([&] { gwh::validate_config(cfg->cfg); });
}

gwh_status gwh_config_dump(const gwh_config* cfg, char* buf, size_t size, size_t* needed) {
  if (!cfg) return remember(GWH_E_NULL, "config must not be null");
  return copy_out(gwh::dump_config(cfg->cfg), buf, size, needed);
}

gwh_status gwh_graph_random(int nodes, double mean_degree, uint64_t seed, gwh_graph** out) {
  if (!out) return remember(GWH_E_NULL, "out must not be null");
  return guarded([&] { *out = new gwh_graph{gwh::build_random_geometric_graph(nodes, mean_degree, seed)}; });
}

gwh_status gwh_graph_load(const char* path, gwh_graph** out) {
  if (!path || !out) return remember(GWH_E_NULL, "path and out must not be null");
  return guarded([&] { *out = new gwh_graph{gwh::load_graph(path)}; });
}

gwh_status gwh_graph_save(const gwh_graph* graph, const char* path) {
  if (!graph || !path) return remember(GWH_E_NULL, "graph and path must not be null");
  return guarded([&] { gwh::save_graph(graph->graph, path); });
}

gwh_status gwh_graph_rewire(const gwh_graph* graph, double fraction, uint64_t seed, gwh_graph** out) {
  if (!graph || !out) return remember(GWH_E_NULL, "graph and out must not be null");
  return guarded([&] { *out = new gwh_graph{gwh::rewire_edges(graph->graph, fraction, seed)}; });
}

void gwh_graph_destroy(gwh_graph* graph) { delete graph; }

int gwh_graph_node_count(const gwh_graph* graph) { return graph ? graph->graph.node_count() : -1; }

int gwh_graph_edge_count(const gwh_graph* graph) { return graph ? graph->graph.edge_count() : -1; }

gwh_status gwh_spectrum_compute(const gwh_graph* graph, gwh_spectrum** out) {
  if (!graph || !out) return remember(GWH_E_NULL, "graph and out must not be null");
  return guarded([&] { *out = new gwh_spectrum{gwh::eigendecompose(gwh::laplacian(graph->graph))}; });
}

void gwh_spectrum_destroy(gwh_spectrum* spectrum) { delete spectrum; }

int gwh_spectrum_size(const gwh_spectrum* spectrum) { return spectrum ? spectrum->spectrum.size() : -1; }

gwh_status gwh_spectrum_eigenvalues(const gwh_spectrum* spectrum, double* out) {
  if (!spectrum || !out) return remember(GWH_E_NULL, "spectrum and out must not be null");
  const auto& ev = spectrum->spectrum.eigenvalues;
  std::copy(ev.data(), ev.data() + ev.size(), out);
  return GWH_OK;
}

gwh_status gwh_spectrum_gft(const gwh_spectrum* spectrum, const double* window, int length, double* out) {
  if (!spectrum || !window || !out) return remember(GWH_E_NULL, "spectrum, window and out must not be null");
  return guarded([&] {
    if (length < 1) gwh::fail(gwh::ErrorCode::ContractViolation, "length must be positive");
    const auto s = gwh::gft(spectrum->spectrum, row_major_window(window, spectrum->spectrum.size(), length));
    store_row_major(s.coefficients, out);
  });
}

gwh_status gwh_spectrum_igft(const gwh_spectrum* spectrum, const double* coefficients, int length, double* out) {
  if (!spectrum || !coefficients || !out) return remember(GWH_E_NULL, "spectrum, coefficients and out must not be null");
  return guarded([&] {
    if (length < 1) gwh::fail(gwh::ErrorCode::ContractViolation, "length must be positive");
    gwh::SpectralMatrix s{row_major_window(coefficients, spectrum->spectrum.size(), length).data};
    store_row_major(gwh::igft(spectrum->spectrum, s).data, out);
  });
}

gwh_status gwh_model_load(const char* path, gwh_model** out) {
  if (!path || !out) return remember(GWH_E_NULL, "path and out must not be null");
  return guarded([&] { *out = new gwh_model{gwh::load_detector(path)}; });
}

gwh_status gwh_model_save(const gwh_model* model, const char* path) {
  if (!model || !path) return remember(GWH_E_NULL, "model and path must not be null");
  return guarded([&] { gwh::save_detector(model->detector, path); });
}

void gwh_model_destroy(gwh_model* model) { delete model; }

int gwh_model_dimension(const gwh_model* model) { return model ? model->detector.model.dimension() : -1; }

int gwh_model_nodes(const gwh_model* model) { return model ? model->detector.nodes : -1; }

int gwh_model_window_length(const gwh_model* model) { return model ? model->detector.window_length : -1; }

double gwh_model_drift(const gwh_model* model) { return model ? model->detector.model.cusum_drift_nu : 0.0; }

double gwh_model_threshold(const gwh_model* model) { return model ? model->detector.model.cusum_threshold_h : 0.0; }

double gwh_model_shrinkage(const gwh_model* model) { return model ? model->detector.model.shrinkage_rho : 0.0; }

gwh_status gwh_model_score(const gwh_model* model, const double* window, int nodes, int length, double* score) {
  if (!model || !window || !score) return remember(GWH_E_NULL, "model, window and score must not be null");
  return guarded([&] {
    if (nodes < 1 || length < 1) gwh::fail(gwh::ErrorCode::ContractViolation, "window shape must be positive");
    *score = model->detector.score(row_major_window(window, nodes, length));
  });
}

gwh_status gwh_simulate(const gwh_config* cfg, const char* out_dir, const char* graph_path) {
  if (!cfg || !out_dir) return remember(GWH_E_NULL, "config and out_dir must not be null");
  return guarded([&] {
    std::optional<gwh::SensorGraph> fixed;
    if (graph_path && *graph_path) fixed = gwh::load_graph(graph_path);
    gwh::simulate_datasets(cfg->cfg, out_dir, fixed);
  });
}

gwh_status gwh_calibrate(const gwh_config* cfg, const char* windows_path, const char* graph_path, int sensor,
                         const char* model_path) {
  if (!cfg || !windows_path || !graph_path || !model_path)
    return remember(GWH_E_NULL, "config, windows, graph and model paths must not be null");
  return guarded([&] {
    gwh::validate_config(cfg->cfg);
    const auto spectrum = gwh::eigendecompose(gwh::laplacian(gwh::load_graph(graph_path)));
    if (sensor < 0 || sensor >= spectrum.size())
      gwh::fail(gwh::ErrorCode::Config, "sensor " + std::to_string(sensor) + " outside the graph");
    std::vector<gwh::WindowMatrix> nominal;
    for (auto& r : gwh::read_window_file(windows_path))
      if (r.label == 0) nominal.push_back(std::move(r.window));
    if (!nominal.empty() && nominal.front().length() != cfg->cfg.window_length)
      gwh::fail(gwh::ErrorCode::DimensionMismatch,
                "windows have length " + std::to_string(nominal.front().length()) + " but window_length = " +
                    std::to_string(cfg->cfg.window_length));
    const auto det = gwh::calibrate_detector(cfg->cfg, cfg->cfg.variant, spectrum, nominal, sensor);
    gwh::save_detector(det, model_path);
  });
}

gwh_status gwh_detect(const char* model_path, const char* windows_path, const char* csv_path) {
  if (!model_path || !windows_path || !csv_path) return remember(GWH_E_NULL, "paths must not be null");
  return guarded([&] {
    const auto det = gwh::load_detector(model_path);
    const auto series = gwh::detect_windows(det, gwh::read_window_file(windows_path));
    gwh::write_text_file(csv_path, gwh::detection_csv(series));
  });
}

gwh_status gwh_bench(const gwh_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return remember(GWH_E_NULL, "config and out_dir must not be null");
  return guarded([&] {
    gwh::BenchReport partial;
    gwh::BenchReport report;
    try {
      report = gwh::run_benchmark(cfg->cfg, &partial);
    } catch (const gwh::Error&) {
      // Flush what finished so a long run is not lost entirely.
      if (!partial.trials.empty()) gwh::write_bench_outputs(partial, out_dir);
      throw;
    }
    gwh::write_bench_outputs(report, out_dir);
    const double per_window = gwh::measure_window_seconds(cfg->cfg, 20);
    gwh::write_text_file((std::filesystem::path(out_dir) / "timing.json").string(),
                         trial_timing_json(report, per_window));
  });
}

}  // extern "C"
