#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "gwh/error.hpp"
#include "gwh/metrics.hpp"

using namespace gwh;

namespace {

// Pairwise count oracle.
double auc_oracle(const LabeledScores& d) {
  double win = 0, pairs = 0;
  for (std::size_t i = 0; i < d.scores.size(); ++i)
    for (std::size_t j = 0; j < d.scores.size(); ++j)
      if (d.labels[i] == 1 && d.labels[j] == 0) {
        pairs += 1;
        win += d.scores[i] > d.scores[j] ? 1.0 : d.scores[i] == d.scores[j] ? 0.5 : 0.0;
      }
  return win / pairs;
}

// Sweep every distinct score as a ">= threshold" rule, highest first.
double ap_oracle(const LabeledScores& d) {
  std::vector<double> thr = d.scores;
  std::sort(thr.begin(), thr.end(), std::greater<>());
  thr.erase(std::unique(thr.begin(), thr.end()), thr.end());
  double pos = 0;
  for (int l : d.labels) pos += l;
  double ap = 0, prev = 0;
  for (double t : thr) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < d.scores.size(); ++i)
      if (d.scores[i] >= t) (d.labels[i] ? tp : fp) += 1;
    ap += (tp / pos - prev) * tp / (tp + fp);
    prev = tp / pos;
  }
  return ap;
}

LabeledScores labeled_sample(std::uint64_t seed, int n, bool ties) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  LabeledScores d;
  for (int i = 0; i < n; ++i) {
    const int label = i % 3 == 0;
    double s = g(rng) + label;
    if (ties) s = std::round(s * 2.0) / 2.0;
    d.scores.push_back(s);
    d.labels.push_back(label);
  }
  return d;
}

}  // namespace

TEST_CASE("ROC AUC hand case and oracle") {
  // Positives {0.9, 0.4}, negatives {0.6, 0.1}: 3 of 4 pairs ordered.
  const LabeledScores d{{0.9, 0.6, 0.4, 0.1}, {1, 0, 1, 0}};
  CHECK(roc_auc(d) == 0.75);
  CHECK(roc_auc(LabeledScores{{1, 1, 1, 1}, {1, 0, 1, 0}}) == 0.5);
  CHECK(roc_auc(LabeledScores{{2, 1}, {1, 0}}) == 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = labeled_sample(seed, 60, seed % 2 == 0);
    CHECK(std::abs(roc_auc(r) - auc_oracle(r)) < 1e-12);
  }
  const auto curve = roc_curve(d);
  CHECK(curve.front().x == 0.0);
  CHECK(curve.back().x == 1.0);
  CHECK(curve.back().y == 1.0);
}

TEST_CASE("average precision against an exhaustive sweep") {
  const LabeledScores d{{0.9, 0.6, 0.4, 0.1}, {1, 0, 1, 0}};
  CHECK(std::abs(average_precision(d) - (0.5 * 1.0 + 0.5 * 2.0 / 3.0)) < 1e-15);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = labeled_sample(100 + seed, 75, seed % 2 == 1);
    CHECK(std::abs(average_precision(r) - ap_oracle(r)) < 1e-12);
  }
  const auto pr = pr_curve(d);
  CHECK(pr.back().x == 1.0);
}

TEST_CASE("best F1 operating point") {
  const LabeledScores d{{0.9, 0.6, 0.4, 0.1}, {1, 0, 1, 0}};
  const auto op = f1_optimal_point(d);
  // Threshold 0.9: P=1, R=0.5, F1=2/3. Threshold 0.4: P=2/3, R=1, F1=0.8.
  CHECK(std::abs(op.f1 - 0.8) < 1e-12);
  CHECK(op.threshold == 0.4);
  CHECK(std::abs(op.precision - 2.0 / 3.0) < 1e-12);
  CHECK(op.recall == 1.0);
}

TEST_CASE("metric contracts") {
  CHECK_THROWS_AS(roc_auc(LabeledScores{{1, 2}, {1, 1}}), Error);
  CHECK_THROWS_AS(average_precision(LabeledScores{{1, 2}, {1}}), Error);
  CHECK_THROWS_AS(roc_auc(LabeledScores{{1, std::nan("")}, {1, 0}}), Error);
}

TEST_CASE("latency hand case") {
  // Onset 20, horizon 80: latencies 0, 2, 4 and one miss.
  const std::vector<std::optional<int>> alarms{20, 22, 24, std::nullopt};
  const auto s = latency_stats(alarms, {20, 20, 20, 20}, 80);
  CHECK(s.mean == 2.0);
  CHECK(s.median == 2.0);
  CHECK(s.detection_rate == 0.75);
  CHECK(s.detected == 3);
  CHECK(s.streams == 4);
  CHECK(std::abs(s.std - std::sqrt(8.0 / 3.0)) < 1e-12);

  // Alarms past the horizon count as misses.
  const auto late = latency_stats({std::optional<int>(120)}, {20}, 80);
  CHECK(late.detection_rate == 0.0);
  CHECK(std::isnan(late.mean));
  CHECK_THROWS_AS(latency_stats({1}, {}, 10), Error);
}

TEST_CASE("linear interpolation percentiles") {
  const std::vector<double> v{4, 1, 3, 2, 5};
  CHECK(percentile(v, 0) == 1.0);
  CHECK(percentile(v, 50) == 3.0);
  CHECK(percentile(v, 100) == 5.0);
  CHECK(std::abs(percentile(v, 5) - 1.2) < 1e-12);
  CHECK(std::abs(percentile(v, 95) - 4.8) < 1e-12);
  CHECK(std::isnan(percentile({}, 50)));
}
