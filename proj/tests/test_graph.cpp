#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gwh/error.hpp"
#include "gwh/graph_spectral.hpp"
#include "test_util.hpp"

using namespace gwh;
using testutil::max_abs;

namespace {

// Faddeev-LeVerrier: coefficients c[0..n] of det(xI - A) = sum c[k] x^(n-k).
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[0] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * Eigen::MatrixXd::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

std::set<std::pair<int, int>> edge_set(const SensorGraph& g) {
  std::set<std::pair<int, int>> s;
  for (auto e : g.edges()) s.insert(e);
  return s;
}

}  // namespace

TEST_CASE("random geometric graph hits the mean degree and stays connected") {
  const auto g = build_random_geometric_graph(24, 4.0, 7);
  CHECK(g.node_count() == 24);
  CHECK(is_connected(g.adjacency()));
  CHECK(g.mean_degree() >= 3.5);
  CHECK(g.mean_degree() <= 4.5);
  const auto again = build_random_geometric_graph(24, 4.0, 7);
  CHECK((g.adjacency().array() == again.adjacency().array()).all());
  CHECK(g.positions() == again.positions());
}

TEST_CASE("two nodes with degree one give K2") {
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const auto g = build_random_geometric_graph(2, 1.0, seed);
    CHECK(g.edge_count() == 1);
    CHECK(g.adjacency()(0, 1) == 1.0);
  }
}

TEST_CASE("graph construction rejects bad requests") {
  CHECK_THROWS_AS(build_random_geometric_graph(1, 1.0, 1), Error);
  CHECK_THROWS_AS(build_random_geometric_graph(10, 9.5, 1), Error);
  Eigen::MatrixXd asym = testutil::path_adjacency(3);
  asym(0, 1) = 2.0;
  CHECK_THROWS_AS(make_graph(asym), Error);
  Eigen::MatrixXd split = Eigen::MatrixXd::Zero(4, 4);
  split(0, 1) = split(1, 0) = split(2, 3) = split(3, 2) = 1.0;
  CHECK_THROWS_AS(make_graph(split), Error);
  Eigen::MatrixXd loop = testutil::path_adjacency(3);
  loop(1, 1) = 1.0;
  CHECK_THROWS_AS(make_graph(loop), Error);
}

TEST_CASE("laplacian closed forms") {
  const Eigen::MatrixXd l2 = laplacian(make_graph(testutil::path_adjacency(2)));
  Eigen::Matrix2d k2;
  k2 << 1, -1, -1, 1;
  CHECK(max_abs(l2 - k2) == 0.0);

  const Eigen::MatrixXd l3 = laplacian(make_graph(testutil::path_adjacency(3)));
  Eigen::Matrix3d p3;
  p3 << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  CHECK(max_abs(l3 - p3) == 0.0);

  const auto g = build_random_geometric_graph(30, 5.0, 11);
  const Eigen::MatrixXd l = laplacian(g);
  CHECK(max_abs(l * Eigen::VectorXd::Ones(30)) < 1e-12);
  CHECK(max_abs(l - l.transpose()) == 0.0);
}

TEST_CASE("K2 eigendecomposition") {
  const auto s = eigendecompose(laplacian(make_graph(testutil::path_adjacency(2))));
  CHECK(std::abs(s.eigenvalues(0)) < 1e-12);
  CHECK(std::abs(s.eigenvalues(1) - 2.0) < 1e-12);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.eigenvectors(0, 0) - r) < 1e-12);
  CHECK(std::abs(s.eigenvectors(1, 0) - r) < 1e-12);
  CHECK(std::abs(s.eigenvectors(0, 1) - r) < 1e-12);
  CHECK(std::abs(s.eigenvectors(1, 1) + r) < 1e-12);
}

TEST_CASE("C4 spectrum matches the characteristic polynomial") {
  const Eigen::MatrixXd l = laplacian(make_graph(testutil::cycle_adjacency(4)));
  // Oracle: x^4 - 8x^3 + 20x^2 - 16x = x (x-2)^2 (x-4).
  const auto c = characteristic_polynomial(l);
  const std::vector<double> expected{1, -8, 20, -16, 0};
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - expected[k]) < 1e-12);

  const auto s = eigendecompose(l);
  const double want[] = {0, 2, 2, 4};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(s.eigenvalues(i) - want[i]) < 1e-10);
  // Each returned eigenvalue is a root of the oracle polynomial.
  for (int i = 0; i < 4; ++i) {
    const double x = s.eigenvalues(i);
    const double p = (((x + c[1]) * x + c[2]) * x + c[3]) * x + c[4];
    CHECK(std::abs(p) < 1e-8);
  }
  // Degenerate eigenspace: compare projectors, not vectors.
  const Eigen::MatrixXd u2 = s.eigenvectors.middleCols(1, 2);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(4, 4);
  Eigen::Vector4d a(1, 0, -1, 0), b(0, 1, 0, -1);
  proj += a * a.transpose() / 2.0 + b * b.transpose() / 2.0;
  CHECK(max_abs(u2 * u2.transpose() - proj) < 1e-10);
}

TEST_CASE("spectral invariants on random graphs") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int m = 10 + static_cast<int>(seed % 25);
    const auto g = build_random_geometric_graph(m, 4.0, seed);
    const Eigen::MatrixXd l = laplacian(g);
    const auto s = eigendecompose(l);
    const Eigen::MatrixXd& u = s.eigenvectors;
    CHECK(max_abs(u.transpose() * u - Eigen::MatrixXd::Identity(m, m)) < 1e-9);
    CHECK(max_abs(l * u - u * s.eigenvalues.asDiagonal()) < 1e-8);
    CHECK(max_abs(u * s.eigenvalues.asDiagonal() * u.transpose() - l) < 1e-8);
    CHECK(s.eigenvalues(0) >= 0.0);
    CHECK(s.eigenvalues(0) <= 1e-9);
    for (int i = 0; i + 1 < m; ++i) CHECK(s.eigenvalues(i) <= s.eigenvalues(i + 1));
    for (int i = 0; i < m; ++i) {
      CHECK(std::abs(u.col(i).dot(l * u.col(i)) - s.eigenvalues(i)) < 1e-8);
      int first = 0;
      while (std::abs(u(first, i)) <= 1e-12) ++first;
      CHECK(u(first, i) > 0.0);
    }
    const auto again = eigendecompose(l);
    CHECK((again.eigenvectors.array() == u.array()).all());
  }
}

TEST_CASE("eigendecompose rejects asymmetric input") {
  Eigen::MatrixXd l = laplacian(make_graph(testutil::path_adjacency(3)));
  l(0, 1) += 1e-6;
  CHECK_THROWS_AS(eigendecompose(l), Error);
}

TEST_CASE("GFT closed forms and Parseval") {
  const auto g = build_random_geometric_graph(24, 4.0, 3);
  const auto s = eigendecompose(laplacian(g));

  WindowMatrix flat{Eigen::MatrixXd::Ones(24, 1) * Eigen::RowVectorXd::LinSpaced(16, -2.0, 3.0)};
  const auto fs = gft(s, flat);
  CHECK(max_abs(fs.coefficients.bottomRows(23)) < 1e-9);
  CHECK(std::abs(fs.coefficients.row(0).norm() - flat.data.norm()) < 1e-9);

  WindowMatrix spike{Eigen::MatrixXd::Zero(24, 8)};
  spike.data.col(5) = s.eigenvectors.col(23);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(24, 8);
  expect(23, 5) = 1.0;
  CHECK(max_abs(gft(s, spike).coefficients - expect) < 1e-12);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    WindowMatrix x{testutil::random_matrix(24, 64, seed)};
    const auto c = gft(s, x);
    CHECK(std::abs(c.coefficients.norm() - x.data.norm()) <= 1e-9 * x.data.norm());
    CHECK(max_abs(igft(s, c).data - x.data) < 1e-9);
  }
  CHECK_THROWS_AS(gft(s, WindowMatrix{Eigen::MatrixXd::Zero(23, 4)}), Error);
  CHECK_THROWS_AS(igft(s, SpectralMatrix{Eigen::MatrixXd::Zero(25, 4)}), Error);
}

TEST_CASE("rewiring preserves size and connectivity") {
  const auto g = build_random_geometric_graph(24, 4.0, 7);
  const auto same = rewire_edges(g, 0.0, 5);
  CHECK((same.adjacency().array() == g.adjacency().array()).all());

  const int e = g.edge_count();
  for (double fraction : {0.1, 0.25}) {
    const auto r = rewire_edges(g, fraction, 17);
    CHECK(r.edge_count() == e);
    CHECK(is_connected(r.adjacency()));
    CHECK(max_abs(r.adjacency() - r.adjacency().transpose()) == 0.0);
    CHECK(r.adjacency().diagonal().cwiseAbs().maxCoeff() == 0.0);
    const auto before = edge_set(g), after = edge_set(r);
    std::vector<std::pair<int, int>> removed;
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(removed));
    CHECK(static_cast<int>(removed.size()) == static_cast<int>(std::ceil(fraction * e)));
    const auto again = rewire_edges(g, fraction, 17);
    CHECK((again.adjacency().array() == r.adjacency().array()).all());
  }
}

TEST_CASE("rewiring 25% of a 48-edge graph changes 12 edges") {
  // Ring of 24 with chords to the second neighbour: 48 edges.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(24, 24);
  for (int i = 0; i < 24; ++i)
    for (int k : {1, 2}) a(i, (i + k) % 24) = a((i + k) % 24, i) = 1.0;
  const auto g = make_graph(a);
  REQUIRE(g.edge_count() == 48);
  const auto r = rewire_edges(g, 0.25, 4);
  CHECK(r.edge_count() == 48);
  const auto before = edge_set(g), after = edge_set(r);
  std::vector<std::pair<int, int>> added;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(added));
  CHECK(added.size() == 12);
}

TEST_CASE("edge list round trip and parse errors") {
  const auto g = build_random_geometric_graph(12, 3.0, 21);
  const auto text = format_edge_list(g);
  const auto back = parse_edge_list(text);
  CHECK((back.adjacency().array() == g.adjacency().array()).all());
  CHECK(back.positions() == g.positions());
  CHECK(format_edge_list(back) == text);

  CHECK(parse_edge_list("# comment\nM 3\n0 1 1\n1 2 0.5\n").edge_count() == 2);
  CHECK_THROWS_AS(parse_edge_list("M 3\n0 1 1\n"), Error);        // disconnected
  CHECK_THROWS_AS(parse_edge_list("M 3\n0 5 1\n1 2 1\n"), Error);  // index out of range
  CHECK_THROWS_AS(parse_edge_list("0 1 1\n"), Error);              // missing header
  try {
    parse_edge_list("M 3\n0 1 1\n1 x 1\n");
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Format);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
