// gwh command-line front end. Talks to the library only through gwh/gwh.h.
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwh/gwh.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

// One line, key=value pairs, message quoted.
int report_error(const std::string& status, int code, const std::string& message) {
  std::string msg;
  for (char c : message) {
    if (c == '\n' || c == '\r') msg += ' ';
    else if (c == '"' || c == '\\') msg += std::string("\\") + c;
    else msg += c;
  }
  std::fprintf(stderr, "gwh: error status=%s code=%d message=\"%s\"\n", status.c_str(), code, msg.c_str());
  return code;
}

int exit_for(gwh_status st) { return st == GWH_E_CONFIG ? kExitConfig : kExitRuntime; }

int fail_with(gwh_status st) { return report_error(gwh_status_name(st), exit_for(st), gwh_last_error()); }

struct ConfigHandle {
  gwh_config* ptr = nullptr;
  ConfigHandle() {
    if (gwh_config_create(&ptr) != GWH_OK) ptr = nullptr;
  }
  ~ConfigHandle() { gwh_config_destroy(ptr); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

std::string dump(const gwh_config* cfg) {
  std::size_t needed = 0;
  gwh_config_dump(cfg, nullptr, 0, &needed);
  std::string text(needed + 1, '\0');
  gwh_config_dump(cfg, text.data(), text.size(), nullptr);
  text.resize(needed);
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph wavelet-packet anomaly detector"};
  app.require_subcommand(0, 1);
  app.set_config("--config", "", "key = value configuration file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

  // Every configuration key doubles as a long option; explicit flags win over
  // the config file.
  std::map<std::string, std::string> values;
  std::vector<std::string> key_order;
  for (std::size_t i = 0; i < gwh_config_key_count(); ++i) {
    const std::string name = gwh_config_key_name(i);
    key_order.push_back(name);
    app.add_option("--" + name, values[name], gwh_config_key_help(i))->group("Configuration");
  }
  std::string regime;
  app.add_option("--regime", regime, "run a single regime (A-D); shorthand for --regimes");

  auto* simulate = app.add_subcommand("simulate", "write seeded window datasets");
  std::string sim_out = "gwh_data", graph_file;
  simulate->add_option("--out", sim_out, "output directory");
  simulate->add_option("--graph-file", graph_file, "use this topology for every trial");

  auto* calibrate = app.add_subcommand("calibrate", "fit a detector model from nominal windows");
  std::string cal_windows, cal_graph, cal_model = "model.json";
  int cal_sensor = 0;
  calibrate->add_option("--windows", cal_windows, "window file")->required();
  calibrate->add_option("--graph-file", cal_graph, "calibration topology")->required();
  calibrate->add_option("--model", cal_model, "model output path");
  calibrate->add_option("--sensor", cal_sensor, "sensor used by single_source");

  auto* detect = app.add_subcommand("detect", "score a window stream and run the CUSUM");
  std::string det_model, det_windows, det_out = "detections.csv";
  detect->add_option("--model", det_model, "model file")->required();
  detect->add_option("--windows", det_windows, "window file, in stream order")->required();
  detect->add_option("--out", det_out, "CSV output path");

  auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark over variants and regimes");
  std::string bench_out;
  bench->add_option("--out", bench_out, "output directory (default: output_dir)");

  for (auto* sub : {simulate, calibrate, detect, bench}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("config_error", kExitConfig, e.what());
  }

  ConfigHandle cfg;
  if (!cfg.ptr) return fail_with(GWH_E_RUNTIME);
  for (const auto& name : key_order) {
    if (app.get_option("--" + name)->count() == 0) continue;
    if (const gwh_status st = gwh_config_set(cfg.ptr, name.c_str(), values[name].c_str()); st != GWH_OK)
      return fail_with(st);
  }
  if (!regime.empty())
    if (const gwh_status st = gwh_config_set(cfg.ptr, "regimes", regime.c_str()); st != GWH_OK) return fail_with(st);
  // For the bench a single --variant narrows the variant list.
  if (bench->parsed() && app.get_option("--variant")->count() > 0 && app.get_option("--variants")->count() == 0)
    if (const gwh_status st = gwh_config_set(cfg.ptr, "variants", values["variant"].c_str()); st != GWH_OK)
      return fail_with(st);

  if (const gwh_status st = gwh_config_validate(cfg.ptr); st != GWH_OK) return fail_with(st);
  if (print_config) {
    std::fputs(dump(cfg.ptr).c_str(), stdout);
    return 0;
  }

  if (app.get_subcommands().empty())
    return report_error("config_error", kExitConfig, "a subcommand is required: simulate, calibrate, detect or bench");

  gwh_status st = GWH_OK;
  if (simulate->parsed()) {
    st = gwh_simulate(cfg.ptr, sim_out.c_str(), graph_file.empty() ? nullptr : graph_file.c_str());
  } else if (calibrate->parsed()) {
    st = gwh_calibrate(cfg.ptr, cal_windows.c_str(), cal_graph.c_str(), cal_sensor, cal_model.c_str());
  } else if (detect->parsed()) {
    st = gwh_detect(det_model.c_str(), det_windows.c_str(), det_out.c_str());
  } else if (bench->parsed()) {
    std::string out = bench_out;
    if (out.empty()) {
      std::size_t needed = 0;
      gwh_config_get(cfg.ptr, "output_dir", nullptr, 0, &needed);
      out.assign(needed + 1, '\0');
      gwh_config_get(cfg.ptr, "output_dir", out.data(), out.size(), nullptr);
      out.resize(needed);
    }
    st = gwh_bench(cfg.ptr, out.c_str());
  }
  return st == GWH_OK ? 0 : fail_with(st);
}
