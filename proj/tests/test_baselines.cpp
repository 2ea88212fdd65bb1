#include "msdnet/baselines.hpp"
#include "msdnet/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace msdnet;
using namespace msdnet::testing;

TEST_CASE("mixing matrix") {
  Mat expected(2, 2);
  expected << 0.75, 0.25, 0.25, 0.75;
  CHECK(max_abs(mixing_matrix(path(2)), expected) == 0.0);

  const Graph g = random_connected_graph(20, 0.3, 4).graph;
  const Mat m = mixing_matrix(g);
  CHECK(max_abs(m, m.transpose()) == 0.0);
  CHECK((m.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
  CHECK(m.minCoeff() >= 0.0);
  const double slem = second_eigenvalue_modulus(m);
  CHECK(slem < 1.0);
  CHECK(slem > 0.0);
}

TEST_CASE("consensus is a fixed point without costs") {
  const Graph g = triangle();
  const ProblemInstance p(g, unit_weights(g), std::vector<NodeCost>(3, NodeCost::linear(Vec::Zero(3))),
                          MirrorMap::entropy(3));
  const Mat m = mixing_matrix(g);
  const Stacked x = replicate(vec({0.2, 0.5, 0.3}), 3);
  CHECK(max_abs(distributed_projected_subgradient_step(p, m, x, 0.3), x) < 1e-15);
  CHECK(max_abs(distributed_mirror_descent_step(p, m, x, 0.3), x) < 1e-14);
}

TEST_CASE("projected subgradient on two nodes by hand") {
  const Graph g = path(2);
  const ProblemInstance p(g, unit_weights(g),
                          {NodeCost::linear(vec({1.0, 0.0})), NodeCost::linear(vec({0.0, 0.0}))},
                          MirrorMap::euclidean(2, Domain::Simplex));
  Stacked x(2, 2);
  x << 1.0, 0.0,
       0.0, 1.0;
  // mix: node 0 -> (.75, .25), node 1 -> (.25, .75); step: node 0 -> (.25, .25)
  // project (.25, .25) -> (.5, .5)
  const Stacked next = distributed_projected_subgradient_step(p, mixing_matrix(g), x, 0.5);
  Stacked expected(2, 2);
  expected << 0.5, 0.25,
              0.5, 0.75;
  CHECK(max_abs(next, expected) < 1e-15);
}

TEST_CASE("mirror descent without costs averages in the primal") {
  const Graph g = path(3);
  const ProblemInstance p(g, unit_weights(g), std::vector<NodeCost>(3, NodeCost::linear(Vec::Zero(2))),
                          MirrorMap::entropy(2));
  Stacked x(2, 3);
  x << 0.9, 0.5, 0.2,
       0.1, 0.5, 0.8;
  const Mat m = mixing_matrix(g);
  CHECK(max_abs(distributed_mirror_descent_step(p, m, x, 1.0), x * m.transpose()) < 1e-14);
}

TEST_CASE("dual averaging") {
  const Graph g = path(2);
  const ProblemInstance zero(g, unit_weights(g),
                             std::vector<NodeCost>(2, NodeCost::linear(Vec::Zero(4))),
                             MirrorMap::entropy(4));
  const DualAveragingState start{Stacked::Zero(4, 2), replicate(vec({0.7, 0.1, 0.1, 0.1}), 2)};
  const DualAveragingState next =
      distributed_dual_averaging_step(zero, mixing_matrix(g), start, 0.5);
  CHECK(max_abs(next.x, Stacked::Constant(4, 2, 0.25)) < 1e-15);

  // one node: x_{k+1} proportional to exp(-alpha_k sum_{t<=k} a)
  const Vec a = vec({0.2, 0.9, 0.4});
  const ProblemInstance single(Graph(1, {}), {Vec(0), Vec(0)}, {NodeCost::linear(a)},
                               MirrorMap::entropy(3));
  DualAveragingState s{Stacked::Zero(3, 1), replicate(Vec::Constant(3, 1.0 / 3.0), 1)};
  const Mat one = Mat::Identity(1, 1);
  for (int k = 1; k <= 10; ++k) {
    const double alpha = 1.0 / std::sqrt(static_cast<double>(k));
    s = distributed_dual_averaging_step(single, one, s, alpha);
    const Vec expected_logits = -alpha * k * a;
    Vec expected = expected_logits.array().exp();
    expected /= expected.sum();
    CHECK(max_abs(s.x.col(0), expected) < 1e-14);
  }
}
