#pragma once

#include <array>
#include <span>
#include <vector>

namespace gwh {

struct WaveletFilterPair {
  std::array<double, 4> lowpass;
  std::array<double, 4> highpass;
};

/// 4-tap orthogonal Daubechies filter (two vanishing moments) with the
/// quadrature-mirror highpass highpass[k] = (-1)^k lowpass[3-k].
WaveletFilterPair daubechies4_filters();

enum class LeafOrder {
  Natural,    // tree order: child 2i is the lowpass branch of node i
  Frequency,  // Gray-code reordering so band index increases with frequency
};

struct SubbandSet {
  int depth = 0;
  int signal_length = 0;
  LeafOrder ordering = LeafOrder::Frequency;
  std::vector<std::vector<double>> bands;  // 2^depth bands of signal_length / 2^depth
};

/// Full binary wavelet packet tree with periodic extension. Requires the
/// signal length to be divisible by 2^depth.
SubbandSet wpt_decompose(std::span<const double> signal, int depth, const WaveletFilterPair& filters,
                         LeafOrder order = LeafOrder::Frequency);

/// RMS of each band: sqrt(mean(w^2)).
std::vector<double> subband_energies(const SubbandSet& subbands);

/// Natural tree index of the band at frequency rank `k`.
constexpr int natural_index_of_frequency_rank(int k) noexcept { return k ^ (k >> 1); }

}  // namespace gwh
