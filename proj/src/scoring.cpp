#include "gwh/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gwh/error.hpp"

namespace gwh {

namespace {

constexpr double kScaleFloor = 1e-9;
// Threshold used when no positive CUSUM value is attained on calibration data.
constexpr double kMinThreshold = 1e-9;

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::Runtime, "shrunk covariance is not positive definite");
  return llt.matrixL();
}

struct Fitted {
  Standardizer standardizer;
  ShrinkageResult shrink;
  Eigen::MatrixXd factor;
};

Fitted fit_core(const Eigen::MatrixXd& features, std::optional<double> fixed_rho) {
  const auto n = features.rows();
  Fitted out;
  out.standardizer.offset = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - out.standardizer.offset.transpose();
  out.standardizer.scale =
      (centered.colwise().squaredNorm().transpose() / static_cast<double>(n)).cwiseSqrt().cwiseMax(kScaleFloor);
  const Eigen::MatrixXd z = centered * out.standardizer.scale.cwiseInverse().asDiagonal();
  out.shrink = fixed_rho ? fixed_shrinkage(z, *fixed_rho) : ledoit_wolf_shrinkage(z);
  out.factor = cholesky_lower(out.shrink.covariance);
  return out;
}

double quad_form(const Eigen::MatrixXd& factor, const Eigen::VectorXd& z) {
  return factor.triangularView<Eigen::Lower>().solve(z).squaredNorm();
}

double score_with(const Fitted& fit, const Eigen::VectorXd& f) {
  return quad_form(fit.factor, fit.standardizer.apply(f));
}

}  // namespace

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& f) const {
  return (f - offset).cwiseQuotient(scale);
}

namespace {

void check_samples(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2)
    fail(ErrorCode::ContractViolation, "shrinkage needs N >= 2, got " + std::to_string(samples.rows()));
  if (samples.cols() < 1) fail(ErrorCode::ContractViolation, "shrinkage needs D >= 1");
  if (!samples.allFinite()) fail(ErrorCode::ContractViolation, "shrinkage: non-finite features");
}

// Population covariance of the centred rows in x.
Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.cols(), x.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
  return s.selfadjointView<Eigen::Lower>();
}

}  // namespace

ShrinkageResult fixed_shrinkage(const Eigen::MatrixXd& samples, double rho) {
  check_samples(samples);
  if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorCode::ContractViolation, "rho must lie in [0, 1]");
  const Eigen::MatrixXd s = population_covariance(samples.rowwise() - samples.colwise().mean());
  ShrinkageResult out;
  out.rho = rho;
  out.covariance = (1.0 - rho) * s;
  out.covariance.diagonal().array() += rho * s.trace() / static_cast<double>(s.rows());
  return out;
}

ShrinkageResult ledoit_wolf_shrinkage(const Eigen::MatrixXd& samples) {
  check_samples(samples);
  const auto n = samples.rows();
  const auto d = samples.cols();
  const double nn = static_cast<double>(n);
  const Eigen::MatrixXd x = samples.rowwise() - samples.colwise().mean();
  const Eigen::MatrixXd s = population_covariance(x);

  const double target_scale = s.trace() / static_cast<double>(d);
  const double s_norm2 = s.squaredNorm();
  // ||S - vI||_F^2 = ||S||^2 - 2 v tr(S) + v^2 D
  const double dist2 = std::max(0.0, s_norm2 - 2.0 * target_scale * s.trace() +
                                         target_scale * target_scale * static_cast<double>(d));
  // sum_i ||x_i x_i^T - S||_F^2 = sum_i ||x_i||^4 - N ||S||_F^2
  const double fourth = x.rowwise().squaredNorm().array().square().sum();
  const double spread = std::max(0.0, (fourth - nn * s_norm2) / (nn * nn));

  ShrinkageResult out;
  out.rho = dist2 > 0.0 ? std::min(spread, dist2) / dist2 : 1.0;
  out.covariance = (1.0 - out.rho) * s;
  out.covariance.diagonal().array() += out.rho * target_scale;
  return out;
}

double tune_threshold(std::span<const double> scores, double nu, const CalibrationOptions& options) {
  if (options.fpr_target >= 1.0) return 0.0;

  std::vector<int> layout = options.stream_layout;
  if (layout.empty()) layout.push_back(static_cast<int>(scores.size()));
  std::size_t total = 0;
  for (int len : layout) {
    if (len < 0) fail(ErrorCode::ContractViolation, "negative sequence length in stream layout");
    total += static_cast<std::size_t>(len);
  }
  if (total != scores.size())
    fail(ErrorCode::DimensionMismatch, "stream layout covers " + std::to_string(total) + " frames, have " +
                                           std::to_string(scores.size()));

  std::vector<double> g(scores.size());
  std::vector<double> seq_max;
  std::size_t pos = 0;
  for (int len : layout) {
    CusumState st;
    double peak = 0.0;
    for (int t = 0; t < len; ++t, ++pos) {
      st = cusum_step(st, scores[pos], nu);
      g[pos] = st.g;
      peak = std::max(peak, st.g);
    }
    seq_max.push_back(peak);
  }

  // Alarm counts are nonincreasing in h, so the smallest admissible h is an
  // order statistic of the attained values.
  std::vector<double> attained = options.fpr_mode == FprMode::PerFrame ? g : seq_max;
  std::sort(attained.begin(), attained.end());
  const double count = static_cast<double>(attained.size());
  const auto allowed = static_cast<std::size_t>(std::floor(options.fpr_target * count + 1e-9));
  if (attained.empty() || allowed >= attained.size()) return kMinThreshold;
  // With h = attained[idx], alarms are values strictly above h.
  const std::size_t idx = attained.size() - 1 - allowed;
  return std::max(attained[idx], kMinThreshold);
}

NominalModel fit_nominal(const Eigen::MatrixXd& features, const CalibrationOptions& options) {
  const auto n = features.rows();
  if (n < 2) fail(ErrorCode::ContractViolation, "fit_nominal needs at least 2 calibration vectors, got " +
                                                    std::to_string(n));
  if (!(options.fpr_target > 0.0 && options.fpr_target <= 1.0))
    fail(ErrorCode::ContractViolation, "fpr_target must lie in (0, 1]");

  Fitted fit = fit_core(features, options.fixed_rho);

  std::vector<double> calib(static_cast<std::size_t>(n));
  const int folds = std::min<int>(options.score_folds, static_cast<int>(n));
  if (folds >= 2 && n >= 4) {
    // Cross-fitted scores: each vector is scored by a model that never saw it.
    for (int k = 0; k < folds; ++k) {
      std::vector<Eigen::Index> train;
      std::vector<Eigen::Index> held;
      for (Eigen::Index i = 0; i < n; ++i) (i % folds == k ? held : train).push_back(i);
      if (train.size() < 2) continue;
      const Fitted part = fit_core(features(train, Eigen::all), options.fixed_rho);
      for (Eigen::Index i : held) calib[i] = score_with(part, features.row(i).transpose());
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) calib[i] = score_with(fit, features.row(i).transpose());
  }

  NominalModel model;
  model.mean = fit.standardizer.offset;
  model.standardizer = std::move(fit.standardizer);
  model.shrunk_covariance = std::move(fit.shrink.covariance);
  model.shrinkage_rho = fit.shrink.rho;
  model.factor = std::move(fit.factor);
  model.calibration_count = static_cast<int>(n);
  double sum = 0.0;
  for (double a : calib) sum += a;
  model.cusum_drift_nu = sum / static_cast<double>(n);
  model.cusum_threshold_h = tune_threshold(calib, model.cusum_drift_nu, options);
  return model;
}

double mahalanobis_score(const NominalModel& model, const Eigen::VectorXd& f) {
  if (f.size() != model.dimension())
    fail(ErrorCode::DimensionMismatch, "feature dimension " + std::to_string(f.size()) +
                                           " does not match model dimension " +
                                           std::to_string(model.dimension()));
  if (!f.allFinite()) fail(ErrorCode::ContractViolation, "mahalanobis_score: non-finite feature");
  return quad_form(model.factor, model.standardizer.apply(f));
}

std::vector<double> mahalanobis_scores(const NominalModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.dimension())
    fail(ErrorCode::DimensionMismatch, "feature dimension " + std::to_string(features.cols()) +
                                           " does not match model dimension " +
                                           std::to_string(model.dimension()));
  if (!features.allFinite()) fail(ErrorCode::ContractViolation, "mahalanobis_scores: non-finite feature");
  Eigen::MatrixXd z = (features.rowwise() - model.standardizer.offset.transpose()) *
                      model.standardizer.scale.cwiseInverse().asDiagonal();
  Eigen::MatrixXd zt = z.transpose();
  model.factor.triangularView<Eigen::Lower>().solveInPlace(zt);
  std::vector<double> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < zt.cols(); ++i) out[i] = zt.col(i).squaredNorm();
  return out;
}

CusumState cusum_step(CusumState state, double score, double nu) {
  state.g = std::max(0.0, state.g + score - nu);
  ++state.frames_since_reset;
  return state;
}

ScoreSeries run_cusum(std::span<const double> scores, double nu, double h) {
  ScoreSeries out;
  out.scores.assign(scores.begin(), scores.end());
  out.cusum.reserve(scores.size());
  CusumState st;
  for (std::size_t t = 0; t < scores.size(); ++t) {
    st = cusum_step(st, scores[t], nu);
    out.cusum.push_back(st.g);
    if (st.g > h) out.alarms.push_back(static_cast<int>(t));
  }
  return out;
}

ScoreSeries run_detector(const NominalModel& model, std::span<const Eigen::VectorXd> feature_stream) {
  std::vector<double> scores;
  scores.reserve(feature_stream.size());
  for (const auto& f : feature_stream) scores.push_back(mahalanobis_score(model, f));
  return run_cusum(scores, model.cusum_drift_nu, model.cusum_threshold_h);
}

}  // namespace gwh
