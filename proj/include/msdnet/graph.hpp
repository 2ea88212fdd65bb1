#pragma once

#include "msdnet/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace msdnet {

/// Oriented edge: the incidence column has +1 at `head` and -1 at `tail`.
struct Edge {
  Index head = 0;
  Index tail = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected, connected, simple graph with an arbitrary but fixed edge
/// orientation. Immutable after construction.
class Graph {
 public:
  /// Throws GraphError on self loops, duplicate pairs, out-of-range ids or a
  /// disconnected edge set.
  Graph(Index node_count, std::vector<Edge> edges);

  Index node_count() const { return node_count_; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Same graph with the orientation of edge `e` reversed.
  Graph with_flipped_edge(Index e) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Index node_count_;
  std::vector<Edge> edges_;
};

/// Per-edge spring (s) and damper (d) constants, all strictly positive.
struct EdgeWeights {
  Vec spring;
  Vec damper;

  /// Throws GraphError unless both vectors have `edge_count` strictly
  /// positive finite entries.
  void validate(Index edge_count) const;
};

/// Linear map between stacked vectors, stored as its base matrix M and applied
/// as M (x) I_n without materializing the Kronecker product. A stacked vector
/// with b blocks of size n is an n x b matrix, so apply(X) = X M^T.
class BlockOperator {
 public:
  BlockOperator() = default;
  explicit BlockOperator(SpMat base) : base_(std::move(base)) {}

  const SpMat& base() const { return base_; }
  Index rows() const { return base_.rows(); }
  Index cols() const { return base_.cols(); }

  /// (M (x) I_n) x.
  Mat apply(const Eigen::Ref<const Mat>& x) const;
  /// (M (x) I_n)^T y.
  Mat apply_adjoint(const Eigen::Ref<const Mat>& y) const;

 private:
  SpMat base_;
};

/// Unweighted |V| x |E| incidence matrix E(G).
SpMat incidence_matrix(const Graph& g);

/// E_s(G) = (E(G) diag(sqrt(s))) (x) I_n. Throws GraphError on nonpositive s.
BlockOperator scaled_incidence(const Graph& g, const Vec& spring);

/// L_w(G) = (E(G) diag(w) E(G)^T) (x) I_n. Throws GraphError on nonpositive w.
BlockOperator weighted_laplacian(const Graph& g, const Vec& weights);

struct EigenOptions {
  double tolerance = 1e-10;
  long max_iterations = 100000;
  std::uint64_t seed = 0x5eedULL;
};

/// Largest eigenvalue of a symmetric PSD block operator, by power iteration on
/// its base matrix. Stops when ||M v - rho v|| <= tolerance * max(rho, 1).
/// Throws NumericalError if the iteration budget runs out.
double largest_eigenvalue(const BlockOperator& op, const EigenOptions& options = {});

/// Multiplicative margin applied to power-iteration estimates before they are
/// used as step-size bounds.
inline constexpr double kEigenvalueSafetyFactor = 1.0 + 1e-8;

/// 1/gamma = max{a : a s - d <= 0} = min_e d_e / s_e.
double gamma_inverse(const Vec& spring, const Vec& damper);

struct RandomGraphResult {
  Graph graph;
  int retries = 0;  ///< rejected disconnected draws
};

/// Erdos-Renyi G(n, p) draw (head = lower id), redrawn until connected.
/// Deterministic for a given seed. Throws GraphError if `max_retries`
/// consecutive draws are disconnected.
RandomGraphResult random_connected_graph(Index node_count, double probability,
                                         std::uint64_t seed, int max_retries = 10000);

/// True if every node is reachable from node 0 along the given edges.
bool is_connected(Index node_count, const std::vector<Edge>& edges);

/// Graph plus weights as read from / written to an edge-list file:
/// line 1 holds the node count, then one `head tail s d` line per edge.
/// Node ids are zero-based; `#` starts a comment.
struct WeightedGraph {
  Graph graph;
  EdgeWeights weights;
};

WeightedGraph read_edge_list(std::istream& in);
WeightedGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g, const EdgeWeights& w);
void write_edge_list_file(const std::string& path, const Graph& g, const EdgeWeights& w);

}  // namespace msdnet
