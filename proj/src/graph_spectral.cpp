#include "gwh/graph_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>

#include "gwh/error.hpp"
#include "gwh/rng.hpp"

namespace gwh {

namespace {

constexpr int kMaxAttempts = 100;

Eigen::MatrixXd geometric_adjacency(const std::vector<Point2>& pos, double radius) {
  const int n = static_cast<int>(pos.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = pos[i][0] - pos[j][0];
      const double dy = pos[i][1] - pos[j][1];
      if (std::sqrt(dx * dx + dy * dy) <= radius) a(i, j) = a(j, i) = 1.0;
    }
  }
  return a;
}

double mean_degree_of(const Eigen::MatrixXd& a) {
  const auto n = static_cast<double>(a.rows());
  return (a.array() > 0.0).count() / n;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

int SensorGraph::edge_count() const {
  return static_cast<int>((adjacency_.array() > 0.0).count() / 2);
}

double SensorGraph::mean_degree() const { return mean_degree_of(adjacency_); }

std::vector<std::pair<int, int>> SensorGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  const int n = node_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adjacency_(i, j) > 0.0) out.emplace_back(i, j);
  return out;
}

bool is_connected(const Eigen::MatrixXd& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < n; ++w) {
      if (!seen[w] && adjacency(v, w) > 0.0) {
        seen[w] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == n;
}

SensorGraph make_graph(Eigen::MatrixXd adjacency, std::vector<Point2> positions) {
  const auto n = adjacency.rows();
  if (n < 1 || adjacency.cols() != n)
    fail(ErrorCode::ContractViolation, "adjacency must be a non-empty square matrix");
  if (!positions.empty() && static_cast<Eigen::Index>(positions.size()) != n)
    fail(ErrorCode::DimensionMismatch, "positions count does not match node count");
  if (!adjacency.allFinite()) fail(ErrorCode::ContractViolation, "adjacency has non-finite entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) fail(ErrorCode::ContractViolation, "adjacency diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (adjacency(i, j) < 0.0) fail(ErrorCode::ContractViolation, "adjacency weights must be nonnegative");
      if (adjacency(i, j) != adjacency(j, i)) fail(ErrorCode::ContractViolation, "adjacency must be symmetric");
    }
  }
  if (!is_connected(adjacency)) fail(ErrorCode::ContractViolation, "graph is not connected");
  SensorGraph g;
  g.adjacency_ = std::move(adjacency);
  g.positions_ = std::move(positions);
  return g;
}

SensorGraph build_random_geometric_graph(int node_count, double target_mean_degree,
                                         std::uint64_t seed) {
  if (node_count < 2)
    fail(ErrorCode::ContractViolation, "random geometric graph needs node_count >= 2");
  if (!(target_mean_degree >= 1.0 && target_mean_degree <= node_count - 1.0))
    fail(ErrorCode::ContractViolation,
         "target mean degree " + fmt_double(target_mean_degree) + " outside [1, node_count-1]");

  double last_radius = 0.0;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = make_rng(derive_seed(seed, {stage::graph, static_cast<std::uint64_t>(attempt)}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point2> pos(node_count);
    for (auto& p : pos) {
      p[0] = unit(rng);
      p[1] = unit(rng);
    }

    double lo = 0.0;
    double hi = std::sqrt(2.0);
    std::optional<Eigen::MatrixXd> hit;
    for (int it = 0; it < 200 && !hit; ++it) {
      const double r = 0.5 * (lo + hi);
      last_radius = r;
      Eigen::MatrixXd a = geometric_adjacency(pos, r);
      const double d = mean_degree_of(a);
      if (d < target_mean_degree - 0.5) {
        lo = r;
      } else if (d > target_mean_degree + 0.5) {
        hi = r;
      } else {
        hit = std::move(a);
      }
    }
    if (hit && is_connected(*hit)) return make_graph(std::move(*hit), std::move(pos));
  }
  fail(ErrorCode::Construction, "no connected random geometric graph after " +
                                    std::to_string(kMaxAttempts) +
                                    " attempts (last radius " + fmt_double(last_radius) + ")");
}

SensorGraph rewire_edges(const SensorGraph& graph, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    fail(ErrorCode::ContractViolation, "rewire fraction must lie in [0, 1]");
  const auto edges = graph.edges();
  const int n = graph.node_count();
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(edges.size()) - 1e-9));
  if (count == 0) return graph;

  std::vector<std::pair<int, int>> absent;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (graph.adjacency()(i, j) == 0.0) absent.emplace_back(i, j);
  if (absent.size() < count)
    fail(ErrorCode::Rewiring, "not enough absent edges to rewire " + std::to_string(count) + " edges");

  Rng rng = make_rng(derive_seed(seed, {stage::rewire}));
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  Eigen::MatrixXd base = graph.adjacency();
  for (std::size_t k = 0; k < count; ++k) {
    const auto [i, j] = edges[order[k]];
    base(i, j) = base(j, i) = 0.0;
  }

  std::vector<std::size_t> pick(absent.size());
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    Eigen::MatrixXd a = base;
    for (std::size_t k = 0; k < count; ++k) {
      const auto [i, j] = absent[pick[k]];
      a(i, j) = a(j, i) = 1.0;
    }
    if (is_connected(a)) return make_graph(std::move(a), graph.positions());
  }
  fail(ErrorCode::Rewiring, "rewiring could not restore connectivity after " +
                                std::to_string(kMaxAttempts) + " attempts");
}

Eigen::MatrixXd laplacian(const SensorGraph& graph) {
  const Eigen::MatrixXd& a = graph.adjacency();
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

LaplacianSpectrum eigendecompose(const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != laplacian.cols() || laplacian.rows() == 0)
    fail(ErrorCode::ContractViolation, "eigendecompose needs a non-empty square matrix");
  const double asym = (laplacian - laplacian.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9)
    fail(ErrorCode::ContractViolation, "eigendecompose input is not symmetric (max asymmetry " +
                                           fmt_double(asym) + ")");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) fail(ErrorCode::Runtime, "symmetric eigensolver did not converge");

  LaplacianSpectrum out{solver.eigenvectors(), solver.eigenvalues()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > 1e-12) {
        if (col(r) < 0.0) col = -col;
        break;
      }
    }
  }
  // Laplacians are PSD; snap roundoff below zero.
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i)
    if (out.eigenvalues(i) < 0.0 && out.eigenvalues(i) > -1e-10) out.eigenvalues(i) = 0.0;
  return out;
}

SpectralMatrix gft(const LaplacianSpectrum& spectrum, const WindowMatrix& window) {
  if (window.data.rows() != spectrum.eigenvectors.rows())
    fail(ErrorCode::DimensionMismatch, "gft: window has " + std::to_string(window.data.rows()) +
                                           " sensors, spectrum has " +
                                           std::to_string(spectrum.eigenvectors.rows()));
  return SpectralMatrix{spectrum.eigenvectors.transpose() * window.data};
}

WindowMatrix igft(const LaplacianSpectrum& spectrum, const SpectralMatrix& coefficients) {
  if (coefficients.coefficients.rows() != spectrum.eigenvectors.cols())
    fail(ErrorCode::DimensionMismatch, "igft: coefficient rows do not match spectrum size");
  return WindowMatrix{spectrum.eigenvectors * coefficients.coefficients};
}

std::string format_edge_list(const SensorGraph& graph) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "M " << graph.node_count() << '\n';
  for (const auto& [i, j] : graph.edges()) os << i << ' ' << j << ' ' << graph.adjacency()(i, j) << '\n';
  for (std::size_t i = 0; i < graph.positions().size(); ++i)
    os << "pos " << i << ' ' << graph.positions()[i][0] << ' ' << graph.positions()[i][1] << '\n';
  return os.str();
}

SensorGraph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int n = -1;
  Eigen::MatrixXd a;
  std::vector<Point2> pos;
  std::vector<char> has_pos;
  auto bad = [&](const std::string& why) {
    fail(ErrorCode::Format, "edge list line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (n < 0) {
      if (head != "M" || !(ls >> n) || n < 1) bad("expected header `M <node_count>`");
      a = Eigen::MatrixXd::Zero(n, n);
      continue;
    }
    if (head == "pos") {
      int i;
      double x, y;
      if (!(ls >> i >> x >> y) || i < 0 || i >= n) bad("malformed pos entry");
      if (pos.empty()) {
        pos.assign(n, Point2{0.0, 0.0});
        has_pos.assign(n, 0);
      }
      pos[i] = {x, y};
      has_pos[i] = 1;
      continue;
    }
    int i, j;
    double w;
    std::istringstream es(line);
    if (!(es >> i >> j >> w)) bad("expected `i j w`");
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) bad("edge index out of range or self-loop");
    if (!(w >= 0.0) || !std::isfinite(w)) bad("edge weight must be finite and nonnegative");
    a(i, j) = a(j, i) = w;
  }
  if (n < 0) fail(ErrorCode::Format, "edge list is missing the `M <node_count>` header");
  if (!pos.empty() && std::count(has_pos.begin(), has_pos.end(), 0) != 0)
    fail(ErrorCode::Format, "pos section must list every node");
  return make_graph(std::move(a), std::move(pos));
}

void save_graph(const SensorGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  out << format_edge_list(graph);
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

SensorGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str());
}

}  // namespace gwh
