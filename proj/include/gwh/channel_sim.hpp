#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "gwh/graph_spectral.hpp"

namespace gwh {

enum class SmoothnessKernel {
  InverseLaplacian,  // g(lambda) = 1 / (1 + lambda)
  Flat,              // g(lambda) = 1
};

double kernel_gain(SmoothnessKernel kernel, double eigenvalue);

struct SignalModelParams {
  SmoothnessKernel kernel = SmoothnessKernel::InverseLaplacian;
  double signal_power_target = 1.0;  // average per-node variance
};

enum class OnsetPolicy { Fixed, Random };

struct AnomalyParams {
  double shape_alpha = 2.0;
  double scale_beta = 1.5;
  double duration_fraction = 0.25;
  int target_mode = -1;  // 0-based; negative selects the highest mode
  OnsetPolicy onset_policy = OnsetPolicy::Random;
  int fixed_onset = 0;
  bool center = false;  // subtract the Gamma mean alpha*beta from eta
};

struct ChannelParams {
  double fading_variance = 1.0;
  double snr_db = 20.0;
  /// Signal power the SNR refers to; defaults to the empirical mean
  /// per-sample power of the input window.
  std::optional<double> reference_power;
  /// Overrides the SNR-derived noise variance when set.
  std::optional<double> noise_variance;
};

/// Zero-mean correlated Gaussian graph signal U g(Lambda) W, rescaled to the
/// target average per-node variance.
WindowMatrix generate_nominal(const LaplacianSpectrum& spectrum, int length, const SignalModelParams& params,
                              std::uint64_t seed);

struct InjectedWindow {
  WindowMatrix window;
  int onset = 0;
  int duration = 0;
};

/// Adds i.i.d. Gamma(alpha, beta) samples to one graph-frequency row over a
/// contiguous interval of floor(duration_fraction * L) samples.
InjectedWindow inject_anomaly(const WindowMatrix& x0, const LaplacianSpectrum& spectrum,
                              const AnomalyParams& params, std::uint64_t seed);

/// Noise variance implied by the SNR against faded-signal power.
double noise_variance_for(const WindowMatrix& x, const ChannelParams& params);

/// y = |h| (.) x + v with Rayleigh magnitudes E|h|^2 = fading_variance.
WindowMatrix apply_channel(const WindowMatrix& x, const ChannelParams& params, std::uint64_t seed);

}  // namespace gwh
