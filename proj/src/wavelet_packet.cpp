#include "gwh/wavelet_packet.hpp"

#include <cmath>
#include <string>

#include "gwh/error.hpp"

namespace gwh {

WaveletFilterPair daubechies4_filters() {
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  WaveletFilterPair f{};
  f.lowpass = {(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm};
  for (int k = 0; k < 4; ++k) f.highpass[k] = ((k % 2 == 0) ? 1.0 : -1.0) * f.lowpass[3 - k];
  return f;
}

namespace {

// One analysis step with circular extension: out[n] = sum_k f[k] x[(2n+k) mod N].
void analyze(const std::vector<double>& x, const std::array<double, 4>& f, std::vector<double>& out) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  out.resize(half);
  const double* p = x.data();
  // Interior outputs never wrap; only the last one or two touch the start again.
  const std::size_t interior = n >= 4 ? half - 1 : 0;
  for (std::size_t i = 0; i < interior; ++i) {
    const double* q = p + 2 * i;
    out[i] = f[0] * q[0] + f[1] * q[1] + f[2] * q[2] + f[3] * q[3];
  }
  for (std::size_t i = interior; i < half; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) acc += f[k] * p[(2 * i + k) % n];
    out[i] = acc;
  }
}

}  // namespace

SubbandSet wpt_decompose(std::span<const double> signal, int depth, const WaveletFilterPair& filters,
                         LeafOrder order) {
  const auto length = static_cast<int>(signal.size());
  if (depth < 0 || depth > 30)
    fail(ErrorCode::ContractViolation, "wpt depth must lie in [0, 30], got " + std::to_string(depth));
  const int leaves = 1 << depth;
  if (length < 4 || length % leaves != 0 || (depth > 0 && length / leaves < 1))
    fail(ErrorCode::ContractViolation, "wpt needs L >= 4 divisible by 2^J (L=" +
                                           std::to_string(length) + ", J=" + std::to_string(depth) + ")");

  std::vector<std::vector<double>> level{std::vector<double>(signal.begin(), signal.end())};
  for (int j = 0; j < depth; ++j) {
    std::vector<std::vector<double>> next(level.size() * 2);
    for (std::size_t i = 0; i < level.size(); ++i) {
      analyze(level[i], filters.lowpass, next[2 * i]);
      analyze(level[i], filters.highpass, next[2 * i + 1]);
    }
    level = std::move(next);
  }

  SubbandSet out;
  out.depth = depth;
  out.signal_length = length;
  out.ordering = order;
  if (order == LeafOrder::Natural) {
    out.bands = std::move(level);
  } else {
    out.bands.resize(level.size());
    for (int k = 0; k < leaves; ++k) out.bands[k] = std::move(level[natural_index_of_frequency_rank(k)]);
  }
  return out;
}

std::vector<double> subband_energies(const SubbandSet& subbands) {
  std::vector<double> out;
  out.reserve(subbands.bands.size());
  for (const auto& band : subbands.bands) {
    double sum = 0.0;
    for (double w : band) sum += w * w;
    out.push_back(band.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(band.size())));
  }
  return out;
}

}  // namespace gwh
