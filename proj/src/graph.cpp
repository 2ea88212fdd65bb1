#include "msdnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace msdnet {

bool is_connected(Index node_count, const std::vector<Edge>& edges) {
  if (node_count <= 1) return true;
  std::vector<std::vector<Index>> adjacency(static_cast<std::size_t>(node_count));
  for (const Edge& e : edges) {
    adjacency[e.head].push_back(e.tail);
    adjacency[e.tail].push_back(e.head);
  }
  std::vector<bool> seen(static_cast<std::size_t>(node_count), false);
  std::queue<Index> frontier;
  frontier.push(0);
  seen[0] = true;
  Index reached = 1;
  while (!frontier.empty()) {
    const Index v = frontier.front();
    frontier.pop();
    for (Index w : adjacency[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == node_count;
}

Graph::Graph(Index node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 1) throw GraphError("graph needs at least one node");
  std::set<std::pair<Index, Index>> pairs;
  for (const Edge& e : edges_) {
    if (e.head < 0 || e.head >= node_count_ || e.tail < 0 || e.tail >= node_count_)
      throw GraphError("edge (" + std::to_string(e.head) + ", " + std::to_string(e.tail) +
                       ") references a node outside [0, " + std::to_string(node_count_) + ")");
    if (e.head == e.tail)
      throw GraphError("self loop at node " + std::to_string(e.head));
    if (!pairs.emplace(std::min(e.head, e.tail), std::max(e.head, e.tail)).second)
      throw GraphError("duplicate edge {" + std::to_string(e.head) + ", " +
                       std::to_string(e.tail) + "}");
  }
  if (!is_connected(node_count_, edges_)) throw GraphError("graph is not connected");
}

Graph Graph::with_flipped_edge(Index e) const {
  std::vector<Edge> flipped = edges_;
  std::swap(flipped.at(static_cast<std::size_t>(e)).head,
            flipped.at(static_cast<std::size_t>(e)).tail);
  return Graph(node_count_, std::move(flipped));
}

namespace {

void require_positive(const Vec& w, Index edge_count, const char* name) {
  if (w.size() != edge_count)
    throw GraphError(std::string(name) + " has " + std::to_string(w.size()) +
                     " entries, graph has " + std::to_string(edge_count) + " edges");
  for (Index e = 0; e < w.size(); ++e) {
    if (!(w[e] > 0.0) || !std::isfinite(w[e]))
      throw GraphError(std::string(name) + "[" + std::to_string(e) +
                       "] must be strictly positive");
  }
}

}  // namespace

void EdgeWeights::validate(Index edge_count) const {
  require_positive(spring, edge_count, "spring weights");
  require_positive(damper, edge_count, "damper weights");
}

Mat BlockOperator::apply(const Eigen::Ref<const Mat>& x) const {
  return x * base_.transpose();
}

Mat BlockOperator::apply_adjoint(const Eigen::Ref<const Mat>& y) const {
  return y * base_;
}

SpMat incidence_matrix(const Graph& g) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * g.edges().size());
  for (Index e = 0; e < g.edge_count(); ++e) {
    entries.emplace_back(g.edges()[e].head, e, 1.0);
    entries.emplace_back(g.edges()[e].tail, e, -1.0);
  }
  SpMat incidence(g.node_count(), g.edge_count());
  incidence.setFromTriplets(entries.begin(), entries.end());
  return incidence;
}

BlockOperator scaled_incidence(const Graph& g, const Vec& spring) {
  require_positive(spring, g.edge_count(), "spring weights");
  SpMat scaled = incidence_matrix(g) * spring.cwiseSqrt().asDiagonal();
  return BlockOperator(std::move(scaled));
}

BlockOperator weighted_laplacian(const Graph& g, const Vec& weights) {
  require_positive(weights, g.edge_count(), "laplacian weights");
  const SpMat incidence = incidence_matrix(g);
  SpMat laplacian = incidence * weights.asDiagonal() * SpMat(incidence.transpose());
  laplacian.makeCompressed();
  return BlockOperator(std::move(laplacian));
}

double largest_eigenvalue(const BlockOperator& op, const EigenOptions& options) {
  const SpMat& m = op.base();
  if (m.rows() != m.cols()) throw NumericalError("largest_eigenvalue: operator not square", 0, 0.0);
  if (m.rows() == 0) return 0.0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Vec v(m.rows());
  for (Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  double residual = 0.0;
  for (long it = 1; it <= options.max_iterations; ++it) {
    Vec mv = m * v;
    const double rho = v.dot(mv);
    residual = (mv - rho * v).norm();
    if (residual <= options.tolerance * std::max(std::abs(rho), 1.0)) return std::max(rho, 0.0);
    const double norm = mv.norm();
    if (norm == 0.0) return 0.0;  // v in the null space of a PSD operator: M = 0 on span
    v = mv / norm;
  }
  throw NumericalError("power iteration did not converge", options.max_iterations, residual);
}

double gamma_inverse(const Vec& spring, const Vec& damper) {
  if (spring.size() != damper.size())
    throw GraphError("spring and damper weights differ in length");
  if (spring.size() == 0) throw GraphError("gamma_inverse needs at least one edge");
  require_positive(spring, spring.size(), "spring weights");
  require_positive(damper, damper.size(), "damper weights");
  return damper.cwiseQuotient(spring).minCoeff();
}

RandomGraphResult random_connected_graph(Index node_count, double probability,
                                         std::uint64_t seed, int max_retries) {
  if (node_count < 2) throw GraphError("random graph needs at least two nodes");
  if (!(probability > 0.0 && probability <= 1.0))
    throw GraphError("edge probability must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(probability);
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    std::vector<Edge> edges;
    for (Index i = 0; i < node_count; ++i)
      for (Index j = i + 1; j < node_count; ++j)
        if (coin(rng)) edges.push_back({i, j});
    if (is_connected(node_count, edges))
      return {Graph(node_count, std::move(edges)), attempt};
  }
  throw GraphError("no connected draw after " + std::to_string(max_retries) + " retries (n=" +
                   std::to_string(node_count) + ", p=" + std::to_string(probability) + ")");
}

WeightedGraph read_edge_list(std::istream& in) {
  std::string line;
  long line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        out = line;
        return true;
      }
    }
    return false;
  };
  auto fail = [&](const std::string& what) {
    throw GraphError("edge list line " + std::to_string(line_no) + ": " + what);
  };

  std::string content;
  if (!next_line(content)) throw GraphError("edge list is empty");
  Index node_count = 0;
  {
    std::istringstream ss(content);
    if (!(ss >> node_count) || node_count < 1) fail("expected a positive node count");
    std::string rest;
    if (ss >> rest) fail("trailing text after node count");
  }
  std::vector<Edge> edges;
  std::vector<double> spring;
  std::vector<double> damper;
  while (next_line(content)) {
    std::istringstream ss(content);
    Edge e;
    double s = 0.0;
    double d = 0.0;
    if (!(ss >> e.head >> e.tail >> s >> d)) fail("expected `head tail s d`");
    std::string rest;
    if (ss >> rest) fail("trailing text after edge");
    edges.push_back(e);
    spring.push_back(s);
    damper.push_back(d);
  }
  Graph graph(node_count, std::move(edges));
  EdgeWeights weights{Eigen::Map<Vec>(spring.data(), static_cast<Index>(spring.size())),
                      Eigen::Map<Vec>(damper.data(), static_cast<Index>(damper.size()))};
  weights.validate(graph.edge_count());
  return {std::move(graph), std::move(weights)};
}

WeightedGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open edge list");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g, const EdgeWeights& w) {
  w.validate(g.edge_count());
  out << g.node_count() << '\n' << std::setprecision(17);
  for (Index e = 0; e < g.edge_count(); ++e)
    out << g.edges()[e].head << ' ' << g.edges()[e].tail << ' ' << w.spring[e] << ' '
        << w.damper[e] << '\n';
}

void write_edge_list_file(const std::string& path, const Graph& g, const EdgeWeights& w) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot open for writing");
  write_edge_list(out, g, w);
  if (!out) throw IoError(path, "write failed");
}

}  // namespace msdnet
