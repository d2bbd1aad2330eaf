#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "gwh/gwh.h"

namespace fs = std::filesystem;

TEST_CASE("null handles and status names") {
  CHECK(gwh_config_create(nullptr) == GWH_E_NULL);
  CHECK(std::string(gwh_last_error()).size() > 0);
  CHECK(gwh_graph_node_count(nullptr) == -1);
  CHECK(gwh_spectrum_compute(nullptr, nullptr) == GWH_E_NULL);
  gwh_config_destroy(nullptr);
  gwh_graph_destroy(nullptr);
  gwh_model_destroy(nullptr);
  CHECK(std::string(gwh_status_name(GWH_OK)) == "ok");
  CHECK(std::string(gwh_version()).size() > 0);
}

TEST_CASE("config through the C interface") {
  gwh_config* cfg = nullptr;
  REQUIRE(gwh_config_create(&cfg) == GWH_OK);
  CHECK(gwh_config_set(cfg, "nodes", "16") == GWH_OK);
  CHECK(gwh_config_set(cfg, "nodes", "x") == GWH_E_CONFIG);
  CHECK(std::string(gwh_last_error()).find("nodes") != std::string::npos);
  CHECK(gwh_config_set(cfg, "bogus", "1") == GWH_E_CONFIG);

  size_t needed = 0;
  char buf[64];
  REQUIRE(gwh_config_get(cfg, "nodes", buf, sizeof buf, &needed) == GWH_OK);
  CHECK(std::string(buf) == "16");
  CHECK(needed == 2);
  char tiny[2];
  CHECK(gwh_config_get(cfg, "output_dir", tiny, sizeof tiny, &needed) == GWH_E_CONTRACT);
  CHECK(tiny[1] == '\0');
  CHECK(needed == std::string("gwh_out").size());

  CHECK(gwh_config_key_count() > 20);
  CHECK(std::string(gwh_config_key_name(0)) == "nodes");
  CHECK(gwh_config_key_name(100000) == nullptr);
  CHECK(gwh_config_validate(cfg) == GWH_OK);

  REQUIRE(gwh_config_dump(cfg, nullptr, 0, &needed) == GWH_OK);
  std::string dump(needed + 1, '\0');
  CHECK(gwh_config_dump(cfg, dump.data(), dump.size(), &needed) == GWH_OK);
  CHECK(dump.find("nodes = 16") == 0);
  gwh_config_destroy(cfg);
}

TEST_CASE("graph and spectrum through the C interface") {
  gwh_graph* g = nullptr;
  CHECK(gwh_graph_random(1, 4.0, 1, &g) == GWH_E_CONTRACT);
  REQUIRE(gwh_graph_random(10, 3.0, 7, &g) == GWH_OK);
  CHECK(gwh_graph_node_count(g) == 10);
  CHECK(gwh_graph_edge_count(g) > 0);

  gwh_spectrum* s = nullptr;
  REQUIRE(gwh_spectrum_compute(g, &s) == GWH_OK);
  CHECK(gwh_spectrum_size(s) == 10);
  std::vector<double> ev(10);
  CHECK(gwh_spectrum_eigenvalues(s, ev.data()) == GWH_OK);
  CHECK(std::abs(ev[0]) < 1e-10);
  for (int i = 1; i < 10; ++i) CHECK(ev[i] >= ev[i - 1]);

  // Row-major round trip.
  std::vector<double> w(10 * 8), c(10 * 8), back(10 * 8);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(0.37 * static_cast<double>(i));
  CHECK(gwh_spectrum_gft(s, w.data(), 8, c.data()) == GWH_OK);
  CHECK(gwh_spectrum_igft(s, c.data(), 8, back.data()) == GWH_OK);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(back[i] - w[i]) < 1e-12);

  const auto dir = fs::temp_directory_path() / "gwh_capi";
  fs::create_directories(dir);
  const auto path = (dir / "g.txt").string();
  CHECK(gwh_graph_save(g, path.c_str()) == GWH_OK);
  gwh_graph* loaded = nullptr;
  REQUIRE(gwh_graph_load(path.c_str(), &loaded) == GWH_OK);
  CHECK(gwh_graph_edge_count(loaded) == gwh_graph_edge_count(g));
  CHECK(gwh_graph_load((dir / "none.txt").string().c_str(), &loaded) == GWH_E_IO);

  gwh_graph* rewired = nullptr;
  CHECK(gwh_graph_rewire(g, 0.25, 3, &rewired) == GWH_OK);
  CHECK(gwh_graph_node_count(rewired) == 10);

  gwh_graph_destroy(rewired);
  gwh_graph_destroy(loaded);
  gwh_spectrum_destroy(s);
  gwh_graph_destroy(g);
}

TEST_CASE("simulate, calibrate, score and detect") {
  const auto dir = fs::temp_directory_path() / "gwh_capi_pipeline";
  fs::remove_all(dir);
  gwh_config* cfg = nullptr;
  REQUIRE(gwh_config_create(&cfg) == GWH_OK);
  for (auto [k, v] : std::vector<std::pair<const char*, const char*>>{
           {"nodes", "8"}, {"window_length", "64"}, {"mean_degree", "3"}, {"wpt_depth", "2"}, {"trials", "1"},
           {"calibration_windows", "40"}, {"test_nominal_windows", "10"}, {"test_anomalous_windows", "5"},
           {"stream_frames", "30"}, {"stream_onset", "10"}, {"stream_horizon", "20"}, {"calibration_score_folds", "5"}})
    REQUIRE(gwh_config_set(cfg, k, v) == GWH_OK);
  REQUIRE(gwh_simulate(cfg, dir.string().c_str(), nullptr) == GWH_OK);
  const auto set = dir / "trial_000";
  const auto model = (dir / "model.json").string();
  REQUIRE(gwh_calibrate(cfg, (set / "calibration.gwhw").string().c_str(), (set / "graph.txt").string().c_str(), 0,
                        model.c_str()) == GWH_OK);

  gwh_model* m = nullptr;
  REQUIRE(gwh_model_load(model.c_str(), &m) == GWH_OK);
  CHECK(gwh_model_dimension(m) == 8 * 7);
  CHECK(gwh_model_nodes(m) == 8);
  CHECK(gwh_model_window_length(m) == 64);
  CHECK(gwh_model_drift(m) > 0.0);
  CHECK(gwh_model_threshold(m) > 0.0);
  CHECK(gwh_model_shrinkage(m) >= 0.0);
  std::vector<double> w(8 * 64, 0.5);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += std::cos(0.1 * static_cast<double>(i * i % 97));
  double score = -1;
  CHECK(gwh_model_score(m, w.data(), 8, 64, &score) == GWH_OK);
  CHECK(score >= 0.0);
  CHECK(gwh_model_score(m, w.data(), 8, 32, &score) == GWH_E_DIMENSION);
  gwh_model_destroy(m);

  const auto csv = (dir / "det.csv").string();
  CHECK(gwh_detect(model.c_str(), (set / "stream.gwhw").string().c_str(), csv.c_str()) == GWH_OK);
  CHECK(fs::file_size(csv) > 30);
  CHECK(gwh_detect((dir / "nope.json").string().c_str(), (set / "stream.gwhw").string().c_str(), csv.c_str()) ==
        GWH_E_IO);
  gwh_config_destroy(cfg);
}
