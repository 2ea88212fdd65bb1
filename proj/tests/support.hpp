#pragma once

#include "msdnet/problem.hpp"

#include <doctest.h>

#include <vector>

namespace msdnet::testing {

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline double max_abs(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline Graph path(Index nodes) {
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < nodes; ++i) edges.push_back({i, i + 1});
  return Graph(nodes, edges);
}

inline Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

inline EdgeWeights unit_weights(const Graph& g) {
  return {Vec::Ones(g.edge_count()), Vec::Ones(g.edge_count())};
}

}  // namespace msdnet::testing
