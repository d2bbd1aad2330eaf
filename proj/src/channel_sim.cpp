#include "gwh/channel_sim.hpp"

#include <cmath>
#include <random>
#include <string>

#include "gwh/error.hpp"
#include "gwh/rng.hpp"

namespace gwh {

double kernel_gain(SmoothnessKernel kernel, double eigenvalue) {
  switch (kernel) {
    case SmoothnessKernel::InverseLaplacian: return 1.0 / (1.0 + eigenvalue);
    case SmoothnessKernel::Flat: return 1.0;
  }
  return 1.0;
}

WindowMatrix generate_nominal(const LaplacianSpectrum& spectrum, int length, const SignalModelParams& params,
                              std::uint64_t seed) {
  const int m = spectrum.size();
  if (m < 1 || length < 1) fail(ErrorCode::ContractViolation, "generate_nominal needs M >= 1 and L >= 1");
  if (!(params.signal_power_target > 0.0))
    fail(ErrorCode::ContractViolation, "signal power target must be positive");

  Rng rng = make_rng(derive_seed(seed, {stage::nominal}));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(m, length);
  for (Eigen::Index t = 0; t < length; ++t)
    for (Eigen::Index i = 0; i < m; ++i) w(i, t) = normal(rng);

  for (int i = 0; i < m; ++i) {
    const double gain = kernel_gain(params.kernel, spectrum.eigenvalues(i));
    if (!(gain > 0.0)) fail(ErrorCode::ContractViolation, "smoothness kernel must be positive");
    w.row(i) *= gain;
  }
  Eigen::MatrixXd x = spectrum.eigenvectors * w;

  const Eigen::VectorXd means = x.rowwise().mean();
  const double var = (x.colwise() - means).squaredNorm() / (static_cast<double>(m) * length);
  if (var > 0.0) x *= std::sqrt(params.signal_power_target / var);
  return WindowMatrix{std::move(x)};
}

InjectedWindow inject_anomaly(const WindowMatrix& x0, const LaplacianSpectrum& spectrum,
                              const AnomalyParams& params, std::uint64_t seed) {
  if (!(params.shape_alpha > 0.0) || !(params.scale_beta > 0.0))
    fail(ErrorCode::ContractViolation, "anomaly Gamma parameters must be positive");
  const int length = x0.length();
  const auto duration = static_cast<int>(std::floor(params.duration_fraction * length));
  if (!(params.duration_fraction > 0.0 && params.duration_fraction <= 1.0) || duration < 1)
    fail(ErrorCode::ContractViolation, "invalid anomaly duration fraction " +
                                           std::to_string(params.duration_fraction));
  const int m = spectrum.size();
  const int mode = params.target_mode < 0 ? m - 1 : params.target_mode;
  if (mode >= m) fail(ErrorCode::ContractViolation, "anomaly target mode out of range");

  Rng rng = make_rng(derive_seed(seed, {stage::anomaly}));
  int onset = 0;
  if (params.onset_policy == OnsetPolicy::Random) {
    std::uniform_int_distribution<int> pick(0, length - duration);
    onset = pick(rng);
  } else {
    onset = params.fixed_onset;
    if (onset < 0 || onset + duration > length)
      fail(ErrorCode::ContractViolation, "fixed anomaly onset does not fit in the window");
  }

  SpectralMatrix s = gft(spectrum, x0);
  std::gamma_distribution<double> gamma(params.shape_alpha, params.scale_beta);
  const double shift = params.center ? params.shape_alpha * params.scale_beta : 0.0;
  for (int t = onset; t < onset + duration; ++t) s.coefficients(mode, t) += gamma(rng) - shift;
  return InjectedWindow{igft(spectrum, s), onset, duration};
}

double noise_variance_for(const WindowMatrix& x, const ChannelParams& params) {
  if (params.noise_variance) return *params.noise_variance;
  const double power = params.reference_power ? *params.reference_power
                       : x.data.size()        ? x.data.squaredNorm() / static_cast<double>(x.data.size())
                                              : 0.0;
  return power * params.fading_variance / std::pow(10.0, params.snr_db / 10.0);
}

WindowMatrix apply_channel(const WindowMatrix& x, const ChannelParams& params, std::uint64_t seed) {
  if (!(params.fading_variance > 0.0)) fail(ErrorCode::ContractViolation, "fading variance must be positive");
  const double noise_var = noise_variance_for(x, params);
  if (!(noise_var >= 0.0) || !std::isfinite(noise_var))
    fail(ErrorCode::ContractViolation, "noise variance must be finite and nonnegative");

  Rng rng = make_rng(derive_seed(seed, {stage::channel}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double noise_sd = std::sqrt(noise_var);
  Eigen::MatrixXd y(x.data.rows(), x.data.cols());
  for (Eigen::Index t = 0; t < y.cols(); ++t) {
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      // |CN(0, s2)|^2 is exponential with mean s2, so the magnitude is sqrt(-s2 ln U).
      const double gain = std::sqrt(-params.fading_variance * std::log1p(-unit(rng)));
      const double v = noise_sd * normal(rng);
      y(i, t) = gain * x.data(i, t) + v;
    }
  }
  return WindowMatrix{std::move(y)};
}

}  // namespace gwh
