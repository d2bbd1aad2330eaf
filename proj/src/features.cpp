#include "gwh/features.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "gwh/error.hpp"

namespace gwh {

HosPair hos_features(std::span<const double> sequence) {
  const std::size_t n = sequence.size();
  if (n < 4) fail(ErrorCode::ContractViolation, "hos_features needs at least 4 samples, got " + std::to_string(n));

  double mean = 0.0;
  double max_abs = 0.0;
  for (double v : sequence) {
    mean += v;
    max_abs = std::max(max_abs, std::abs(v));
  }
  mean /= static_cast<double>(n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : sequence) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);

  const double sd = std::sqrt(m2);
  if (!(sd > 1e-12 * max_abs) || sd == 0.0)
    fail(ErrorCode::DegenerateInput, "hos_features: sequence is constant (std " + std::to_string(sd) + ")");
  return HosPair{std::abs(m3 / (m2 * sd)), std::abs(m4 / (m2 * m2))};
}

Eigen::VectorXd mode_energies(const SpectralMatrix& spectral) {
  const auto& c = spectral.coefficients;
  if (c.cols() == 0) return Eigen::VectorXd::Zero(c.rows());
  return (c.rowwise().squaredNorm() / static_cast<double>(c.cols())).cwiseSqrt();
}

FeatureVector extract_row_features(const Eigen::MatrixXd& rows, int depth, const WaveletFilterPair& filters) {
  const FeatureLayout layout{static_cast<int>(rows.rows()), depth};
  const auto length = rows.cols();
  if (depth < 0 || length % (Eigen::Index{1} << depth) != 0)
    fail(ErrorCode::ContractViolation, "feature extraction needs L divisible by 2^J (L=" +
                                           std::to_string(length) + ", J=" + std::to_string(depth) + ")");

  FeatureVector out{Eigen::VectorXd::Zero(layout.dimension()), layout};
  out.values.segment(layout.energy_offset(), layout.rows) = mode_energies(SpectralMatrix{rows});

  std::vector<double> row(static_cast<std::size_t>(length));
  const int bands = layout.bands();
  for (int m = 0; m < layout.rows; ++m) {
    for (Eigen::Index t = 0; t < length; ++t) row[t] = rows(m, t);

    const auto energies = subband_energies(wpt_decompose(row, depth, filters));
    for (int k = 0; k < bands; ++k) out.values(layout.wpt_offset() + m * bands + k) = energies[k];

    HosPair hos = kGaussianHos;
    try {
      hos = hos_features(row);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
      spdlog::warn("row {} is degenerate; substituting Gaussian HOS reference (0, 3)", m);
    }
    out.values(layout.skew_offset() + m) = hos.abs_skewness;
    out.values(layout.kurt_offset() + m) = hos.abs_kurtosis;
  }
  return out;
}

FeatureVector extract_features(const SpectralMatrix& spectral, int depth, const WaveletFilterPair& filters) {
  return extract_row_features(spectral.coefficients, depth, filters);
}

FeatureVector extract_features_raw(const WindowMatrix& window, int depth, const WaveletFilterPair& filters) {
  return extract_row_features(window.data, depth, filters);
}

}  // namespace gwh
