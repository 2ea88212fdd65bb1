#include "msdnet/graph.hpp"
#include "msdnet/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace msdnet;
using namespace msdnet::testing;

TEST_CASE("incidence columns") {
  const Mat e2 = Mat(incidence_matrix(Graph(2, {{0, 1}})));
  CHECK(e2(0, 0) == 1.0);
  CHECK(e2(1, 0) == -1.0);

  const Mat e3 = Mat(incidence_matrix(path(3)));
  Mat expected(3, 2);
  expected << 1, 0, -1, 1, 0, -1;
  CHECK(e3 == expected);
  CHECK(e3.colwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaled incidence") {
  const Graph g(2, {{0, 1}});
  const BlockOperator es = scaled_incidence(g, vec({4.0}));
  CHECK(es.apply_adjoint(Mat::Constant(1, 2, 3.0))(0, 0) == 0.0);
  Mat x(1, 2);
  x << 3, 1;
  CHECK(es.apply_adjoint(x)(0, 0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(scaled_incidence(g, vec({0.0})), GraphError);
  CHECK_THROWS_AS(scaled_incidence(g, vec({1.0, 1.0})), GraphError);
}

TEST_CASE("block lift acts column-wise") {
  const Graph g = triangle();
  const Vec w = vec({1.0, 2.0, 3.0});
  const BlockOperator l = weighted_laplacian(g, w);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Mat x(4, 3);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  // (L (x) I_n) stacked, built densely with a Kronecker product
  const Mat dense = Mat(l.base());
  Mat kron = Mat::Zero(12, 12);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) kron.block(4 * i, 4 * j, 4, 4) = dense(i, j) * Mat::Identity(4, 4);
  const Vec flat = Eigen::Map<const Vec>(x.data(), 12);
  const Mat lx = l.apply(x);
  CHECK(max_abs(Eigen::Map<const Vec>(lx.data(), 12), kron * flat) < 1e-12);
}

TEST_CASE("laplacian and eigenvalue") {
  const Graph k2(2, {{0, 1}});
  Mat expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(Mat(weighted_laplacian(k2, vec({1.0})).base()) == expected);
  CHECK(largest_eigenvalue(weighted_laplacian(k2, vec({1.0}))) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(largest_eigenvalue(weighted_laplacian(triangle(), Vec::Ones(3))) ==
        doctest::Approx(3.0).epsilon(1e-9));
  CHECK_THROWS_AS(weighted_laplacian(k2, vec({-1.0})), GraphError);
}

TEST_CASE("eigenvalue matches dense decomposition on random graphs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Graph g = random_connected_graph(20, 0.3, seed).graph;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    Vec w(g.edge_count());
    for (Index e = 0; e < w.size(); ++e) w[e] = u(rng);
    const BlockOperator l = weighted_laplacian(g, w);
    const double dense = oracle::dense_largest_eigenvalue(l.base());
    CHECK(std::abs(largest_eigenvalue(l) - dense) <= 1e-8 * dense);
  }
}

TEST_CASE("power iteration reports nonconvergence") {
  EigenOptions tight;
  tight.max_iterations = 2;
  tight.tolerance = 1e-15;
  const Graph g = random_connected_graph(20, 0.3, 9).graph;
  try {
    largest_eigenvalue(weighted_laplacian(g, Vec::Ones(g.edge_count())), tight);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.iterations() == 2);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("gamma inverse") {
  CHECK(gamma_inverse(vec({1, 2}), vec({2, 4})) == 2.0);
  CHECK(gamma_inverse(vec({3, 5}), vec({3, 5})) == 1.0);
  const double lambda = 2.5;
  CHECK(gamma_inverse(lambda * vec({1, 2}), vec({1, 2})) == doctest::Approx(1.0 / lambda));
  CHECK_THROWS_AS(gamma_inverse(vec({1}), vec({1, 2})), GraphError);
}

TEST_CASE("random connected graphs") {
  const Graph single = random_connected_graph(2, 1.0, 4).graph;
  CHECK(single.edge_count() == 1);

  const auto a = random_connected_graph(20, 0.3, 42);
  const auto b = random_connected_graph(20, 0.3, 42);
  CHECK(a.graph == b.graph);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_connected_graph(20, 0.3, seed).graph;
    CHECK(oracle::connected_by_union_find(g.node_count(), g.edges()));
    for (const Edge& e : g.edges()) CHECK(e.head < e.tail);
  }
  CHECK_THROWS_AS(random_connected_graph(30, 1e-6, 1, 5), GraphError);
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS(Graph(3, {{0, 1}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 0}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 1}, {1, 0}}), GraphError);
  CHECK_THROWS_AS(Graph(2, {{0, 2}}), GraphError);
  CHECK_NOTHROW(Graph(1, {}));
  const Graph flipped = path(3).with_flipped_edge(1);
  CHECK(flipped.edges()[1] == Edge{2, 1});
}

TEST_CASE("edge list round trip") {
  const Graph g = triangle();
  const EdgeWeights w{vec({1.5, 2.0, 0.25}), vec({0.07, 0.07, 1.0 / 3.0})};
  std::stringstream buffer;
  write_edge_list(buffer, g, w);
  const WeightedGraph back = read_edge_list(buffer);
  CHECK(back.graph == g);
  CHECK(back.weights.spring == w.spring);
  CHECK(back.weights.damper == w.damper);

  std::istringstream commented("# triangle\n3\n0 1 1 1\n\n1 2 1 1  # middle\n0 2 1 1\n");
  CHECK(read_edge_list(commented).graph == g);

  std::istringstream bad("2\n0 1 1\n");
  CHECK_THROWS_WITH_AS(read_edge_list(bad), doctest::Contains("line 2"), GraphError);
  std::istringstream negative("2\n0 1 -1 1\n");
  CHECK_THROWS_AS(read_edge_list(negative), GraphError);
  CHECK_THROWS_AS(read_edge_list_file("/nonexistent/graph.txt"), IoError);
}
