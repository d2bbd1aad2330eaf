#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gwh {

struct Standardizer {
  Eigen::VectorXd offset;
  Eigen::VectorXd scale;

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
};

struct ShrinkageResult {
  Eigen::MatrixXd covariance;
  double rho = 0.0;
};

/// Ledoit-Wolf shrinkage toward the scaled identity trace(S)/D * I.
/// `samples` holds one observation per row. Uses the population covariance.
ShrinkageResult ledoit_wolf_shrinkage(const Eigen::MatrixXd& samples);
/// Same estimator with rho fixed by the caller (0 gives the sample covariance).
ShrinkageResult fixed_shrinkage(const Eigen::MatrixXd& samples, double rho);

enum class FprMode {
  PerFrame,     // fraction of calibration frames with g_t > h
  PerSequence,  // fraction of calibration sequences with any alarm
};

struct CalibrationOptions {
  double fpr_target = 0.05;
  /// Lengths of the calibration sequences in order; CUSUM restarts at each.
  /// Empty means a single sequence covering all rows.
  std::vector<int> stream_layout;
  FprMode fpr_mode = FprMode::PerFrame;
  /// Folds for cross-fitted calibration scores; values below 2 score the
  /// calibration set with the model fitted on all of it.
  int score_folds = 0;
  /// Fixes rho instead of the closed form; used for invariance checks.
  std::optional<double> fixed_rho;
};

struct NominalModel {
  Eigen::VectorXd mean;  // feature-space mean (equals the standardizer offset)
  Standardizer standardizer;
  Eigen::MatrixXd shrunk_covariance;
  Eigen::MatrixXd factor;  // lower Cholesky factor of shrunk_covariance
  double shrinkage_rho = 0.0;
  double cusum_drift_nu = 0.0;
  double cusum_threshold_h = 0.0;
  int calibration_count = 0;

  int dimension() const noexcept { return static_cast<int>(mean.size()); }
};

/// Fits the standardizer, shrunk covariance, drift and threshold from N
/// nominal feature vectors (rows of `features`).
NominalModel fit_nominal(const Eigen::MatrixXd& features, const CalibrationOptions& options);

/// Squared Mahalanobis distance through two triangular solves.
double mahalanobis_score(const NominalModel& model, const Eigen::VectorXd& f);

/// Scores of every row of `features`.
std::vector<double> mahalanobis_scores(const NominalModel& model, const Eigen::MatrixXd& features);

/// Smallest threshold whose alarm fraction on the score stream satisfies the
/// target; exposed for testing.
double tune_threshold(std::span<const double> scores, double nu, const CalibrationOptions& options);

struct CusumState {
  double g = 0.0;
  int frames_since_reset = 0;
};

CusumState cusum_step(CusumState state, double score, double nu);

struct ScoreSeries {
  std::vector<double> scores;
  std::vector<double> cusum;
  std::vector<int> alarms;  // frame indices with g_t > h
};

ScoreSeries run_detector(const NominalModel& model, std::span<const Eigen::VectorXd> feature_stream);

/// CUSUM over precomputed scores.
ScoreSeries run_cusum(std::span<const double> scores, double nu, double h);

}  // namespace gwh
