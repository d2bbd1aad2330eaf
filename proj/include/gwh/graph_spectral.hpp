#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gwh {

using Point2 = std::array<double, 2>;

/// Weighted undirected sensor topology. Construction through make_graph()
/// validates symmetry, nonnegativity, zero diagonal and connectivity.
class SensorGraph {
 public:
  SensorGraph() = default;

  int node_count() const noexcept { return static_cast<int>(adjacency_.rows()); }
  const Eigen::MatrixXd& adjacency() const noexcept { return adjacency_; }
  const std::vector<Point2>& positions() const noexcept { return positions_; }

  int edge_count() const;
  double mean_degree() const;
  /// Edges (i, j) with i < j in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

  friend SensorGraph make_graph(Eigen::MatrixXd adjacency, std::vector<Point2> positions);

 private:
  Eigen::MatrixXd adjacency_;
  std::vector<Point2> positions_;
};

/// Validates and wraps an adjacency matrix. `positions` may be empty.
SensorGraph make_graph(Eigen::MatrixXd adjacency, std::vector<Point2> positions = {});

bool is_connected(const Eigen::MatrixXd& adjacency);

/// Unit-square random geometric graph with binary weights. The radius is
/// bisected until the realized mean degree is within 0.5 of the target;
/// disconnected draws are resampled on the next substream (100 attempts).
SensorGraph build_random_geometric_graph(int node_count, double target_mean_degree,
                                         std::uint64_t seed);

/// Replaces ceil(fraction * |E|) uniformly chosen edges by edges absent from
/// the input graph. Edge count and connectivity are preserved.
SensorGraph rewire_edges(const SensorGraph& graph, double fraction, std::uint64_t seed);

/// Combinatorial Laplacian D - A.
Eigen::MatrixXd laplacian(const SensorGraph& graph);

struct LaplacianSpectrum {
  Eigen::MatrixXd eigenvectors;  // columns u_1..u_M
  Eigen::VectorXd eigenvalues;   // ascending

  int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

/// Symmetric eigendecomposition with ascending eigenvalues. Each eigenvector
/// is signed so that its first entry with magnitude above 1e-12 is positive.
LaplacianSpectrum eigendecompose(const Eigen::MatrixXd& laplacian);

/// Vertex-by-time observation window.
struct WindowMatrix {
  Eigen::MatrixXd data;

  int sensors() const noexcept { return static_cast<int>(data.rows()); }
  int length() const noexcept { return static_cast<int>(data.cols()); }
};

/// Graph-frequency-by-time coefficients; row m is the m-th mode sequence.
struct SpectralMatrix {
  Eigen::MatrixXd coefficients;

  int modes() const noexcept { return static_cast<int>(coefficients.rows()); }
  int length() const noexcept { return static_cast<int>(coefficients.cols()); }
};

SpectralMatrix gft(const LaplacianSpectrum& spectrum, const WindowMatrix& window);
WindowMatrix igft(const LaplacianSpectrum& spectrum, const SpectralMatrix& coefficients);

/// Plain-text edge list: `M <n>` header, `i j w` lines, optional `pos i x y`.
std::string format_edge_list(const SensorGraph& graph);
SensorGraph parse_edge_list(const std::string& text);
void save_graph(const SensorGraph& graph, const std::string& path);
SensorGraph load_graph(const std::string& path);

}  // namespace gwh
