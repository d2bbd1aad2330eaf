#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gwh/harness.hpp"

namespace gwh {

// Binary window file:
//   "GWHWIN01", uint64 M, uint64 L, uint64 count (little endian), then per
//   window int32 label, int32 onset and M*L doubles in row-major order.
void write_window_file(const std::string& path, const std::vector<WindowRecord>& records);
std::vector<WindowRecord> read_window_file(const std::string& path);

// Detector model as JSON. Doubles are written in shortest round-trip form, so
// save -> load -> save reproduces the file byte for byte.
std::string detector_to_json(const Detector& det);
Detector detector_from_json(const std::string& text);
void save_detector(const Detector& det, const std::string& path);
Detector load_detector(const std::string& path);

/// Seeded datasets for offline use: per trial a graph, calibration windows,
/// test windows and one latency stream, plus manifest.json. Uses the first
/// configured regime for test data. Returns the manifest text.
std::string simulate_datasets(const RunConfig& cfg, const std::string& dir,
                              const std::optional<SensorGraph>& fixed_graph = std::nullopt);

/// Scores the windows in order and runs the CUSUM with the model's drift and
/// threshold.
ScoreSeries detect_windows(const Detector& det, const std::vector<WindowRecord>& records);
/// "frame,score,cusum,alarm" CSV of a detection run.
std::string detection_csv(const ScoreSeries& series);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gwh
