#include "gwh/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gwh/error.hpp"

namespace gwh {

namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts check_two_class(const LabeledScores& data, const char* what) {
  if (data.scores.size() != data.labels.size())
    fail(ErrorCode::DimensionMismatch, std::string(what) + ": scores and labels differ in length");
  ClassCounts c;
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (!std::isfinite(data.scores[i])) fail(ErrorCode::ContractViolation, std::string(what) + ": non-finite score");
    (data.labels[i] != 0 ? c.pos : c.neg) += 1;
  }
  if (c.pos == 0 || c.neg == 0)
    fail(ErrorCode::ContractViolation, std::string(what) + " needs both positive and negative labels");
  return c;
}

// Indices sorted by descending score.
std::vector<std::size_t> descending(const LabeledScores& data) {
  std::vector<std::size_t> idx(data.scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return data.scores[a] > data.scores[b]; });
  return idx;
}

// Cumulative (tp, fp, threshold) at each distinct descending threshold.
struct Step {
  std::size_t tp;
  std::size_t fp;
  double threshold;
};

std::vector<Step> threshold_steps(const LabeledScores& data) {
  const auto idx = descending(data);
  std::vector<Step> steps;
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    (data.labels[idx[k]] != 0 ? tp : fp) += 1;
    const bool last_of_group = k + 1 == idx.size() || data.scores[idx[k + 1]] != data.scores[idx[k]];
    if (last_of_group) steps.push_back({tp, fp, data.scores[idx[k]]});
  }
  return steps;
}

}  // namespace

double roc_auc(const LabeledScores& data) {
  const auto counts = check_two_class(data, "roc_auc");
  std::vector<std::size_t> idx(data.scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return data.scores[a] < data.scores[b]; });

  // Midranks of tied groups.
  double pos_rank_sum = 0.0;
  std::size_t k = 0;
  while (k < idx.size()) {
    std::size_t end = k;
    while (end + 1 < idx.size() && data.scores[idx[end + 1]] == data.scores[idx[k]]) ++end;
    const double rank = 0.5 * (static_cast<double>(k + 1) + static_cast<double>(end + 1));
    for (std::size_t j = k; j <= end; ++j)
      if (data.labels[idx[j]] != 0) pos_rank_sum += rank;
    k = end + 1;
  }
  const double p = static_cast<double>(counts.pos);
  const double n = static_cast<double>(counts.neg);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double average_precision(const LabeledScores& data) {
  const auto counts = check_two_class(data, "average_precision");
  const double p = static_cast<double>(counts.pos);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& s : threshold_steps(data)) {
    const double recall = static_cast<double>(s.tp) / p;
    const double precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

OperatingPoint f1_optimal_point(const LabeledScores& data) {
  const auto counts = check_two_class(data, "f1_optimal_point");
  const double p = static_cast<double>(counts.pos);
  OperatingPoint best{0.0, 0.0, -1.0, std::numeric_limits<double>::infinity()};
  // Steps run from the highest threshold down, so strict improvement keeps
  // the higher threshold on ties.
  for (const auto& s : threshold_steps(data)) {
    const double precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    const double recall = static_cast<double>(s.tp) / p;
    const double f1 = s.tp == 0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    if (f1 > best.f1) best = {precision, recall, f1, s.threshold};
  }
  return best;
}

std::vector<CurvePoint> roc_curve(const LabeledScores& data) {
  const auto counts = check_two_class(data, "roc_curve");
  std::vector<CurvePoint> out{{0.0, 0.0}};
  for (const auto& s : threshold_steps(data))
    out.push_back({static_cast<double>(s.fp) / static_cast<double>(counts.neg),
                   static_cast<double>(s.tp) / static_cast<double>(counts.pos)});
  return out;
}

std::vector<CurvePoint> pr_curve(const LabeledScores& data) {
  const auto counts = check_two_class(data, "pr_curve");
  std::vector<CurvePoint> out;
  for (const auto& s : threshold_steps(data))
    out.push_back({static_cast<double>(s.tp) / static_cast<double>(counts.pos),
                   static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp)});
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

LatencySummary latency_stats(const std::vector<std::optional<int>>& alarm_frames, const std::vector<int>& onsets,
                             int horizon) {
  if (alarm_frames.size() != onsets.size())
    fail(ErrorCode::DimensionMismatch, "latency_stats: alarm and onset counts differ");
  std::vector<double> lat;
  for (std::size_t i = 0; i < onsets.size(); ++i) {
    if (!alarm_frames[i]) continue;
    const int l = std::max(0, *alarm_frames[i] - onsets[i]);
    if (l < horizon) lat.push_back(static_cast<double>(l));
  }

  LatencySummary out;
  out.streams = static_cast<int>(onsets.size());
  out.detected = static_cast<int>(lat.size());
  out.detection_rate = onsets.empty() ? 0.0 : static_cast<double>(lat.size()) / static_cast<double>(onsets.size());
  if (lat.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.mean = out.median = out.std = nan;
    out.p5_p95 = {nan, nan};
    return out;
  }
  const double n = static_cast<double>(lat.size());
  out.mean = std::accumulate(lat.begin(), lat.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : lat) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / n);
  out.median = percentile(lat, 50.0);
  out.p5_p95 = {percentile(lat, 5.0), percentile(lat, 95.0)};
  return out;
}

}  // namespace gwh
