#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace gwh {

struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;  // 1 = anomalous
};

/// Mann-Whitney estimate P(s+ > s-) + 0.5 P(s+ = s-).
double roc_auc(const LabeledScores& data);

/// Step-interpolated average precision over descending distinct thresholds.
double average_precision(const LabeledScores& data);

struct OperatingPoint {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;  // alarm iff score >= threshold
};

/// Best-F1 threshold over all distinct scores; ties go to the higher threshold.
OperatingPoint f1_optimal_point(const LabeledScores& data);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

/// (FPR, TPR) points from (0,0) to (1,1), one per distinct threshold.
std::vector<CurvePoint> roc_curve(const LabeledScores& data);
/// (recall, precision) points, one per distinct threshold.
std::vector<CurvePoint> pr_curve(const LabeledScores& data);

struct LatencySummary {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  std::pair<double, double> p5_p95{0.0, 0.0};
  double detection_rate = 0.0;
  int detected = 0;
  int streams = 0;
};

/// Latency = alarm - onset, clamped at zero. Streams without an alarm within
/// `horizon` frames of onset count against the detection rate only.
LatencySummary latency_stats(const std::vector<std::optional<int>>& alarm_frames, const std::vector<int>& onsets,
                             int horizon);

/// Linear-interpolation percentile (q in [0, 100]) of unsorted values.
double percentile(std::vector<double> values, double q);

}  // namespace gwh
