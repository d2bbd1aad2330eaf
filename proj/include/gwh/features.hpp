#pragma once

#include <span>

#include <Eigen/Dense>

#include "gwh/graph_spectral.hpp"
#include "gwh/wavelet_packet.hpp"

namespace gwh {

struct HosPair {
  double abs_skewness = 0.0;
  double abs_kurtosis = 0.0;  // non-excess
};

/// Gaussian reference values substituted for degenerate (constant) rows.
inline constexpr HosPair kGaussianHos{0.0, 3.0};

/// Absolute skewness and kurtosis from population central moments.
/// Throws ErrorCode::DegenerateInput when the sample standard deviation is
/// not above 1e-12 * max|x|.
HosPair hos_features(std::span<const double> sequence);

/// Block layout of a fused descriptor:
///   [rows energies | rows * 2^depth WPT energies (row-major) | rows |skew| | rows kurt]
struct FeatureLayout {
  int rows = 0;
  int depth = 0;

  int bands() const noexcept { return 1 << depth; }
  int energy_offset() const noexcept { return 0; }
  int wpt_offset() const noexcept { return rows; }
  int skew_offset() const noexcept { return rows + rows * bands(); }
  int kurt_offset() const noexcept { return skew_offset() + rows; }
  int dimension() const noexcept { return rows * (3 + bands()); }
};

struct FeatureVector {
  Eigen::VectorXd values;
  FeatureLayout layout;

  int dimension() const noexcept { return static_cast<int>(values.size()); }
  auto energies() const { return values.segment(layout.energy_offset(), layout.rows); }
  auto wpt_energies() const { return values.segment(layout.wpt_offset(), layout.rows * layout.bands()); }
  auto abs_skewness() const { return values.segment(layout.skew_offset(), layout.rows); }
  auto abs_kurtosis() const { return values.segment(layout.kurt_offset(), layout.rows); }
};

/// Temporal RMS of every row.
Eigen::VectorXd mode_energies(const SpectralMatrix& spectral);

/// Fused descriptor of the graph-frequency rows.
FeatureVector extract_features(const SpectralMatrix& spectral, int depth, const WaveletFilterPair& filters);

/// Same feature map applied to vertex-domain sensor rows.
FeatureVector extract_features_raw(const WindowMatrix& window, int depth, const WaveletFilterPair& filters);

/// Shared implementation over an arbitrary row matrix.
FeatureVector extract_row_features(const Eigen::MatrixXd& rows, int depth, const WaveletFilterPair& filters);

}  // namespace gwh
