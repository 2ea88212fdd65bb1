#pragma once

#include "msdnet/common.hpp"
#include "msdnet/cost.hpp"
#include "msdnet/geometry.hpp"
#include "msdnet/graph.hpp"

#include <cstdint>
#include <vector>

namespace msdnet {

/// minimize sum_i f_i(x_i)  subject to  E_s^T x = 0,  x in X0^|V|.
///
/// Holds the graph, weights, per-node costs and the mirror map, plus the
/// derived operators E_s, L_d and the step-size constants lambda and 1/gamma.
/// Immutable after construction.
class ProblemInstance {
 public:
  /// Throws GraphError / DomainError on inconsistent sizes or weights.
  ProblemInstance(Graph graph, EdgeWeights weights, std::vector<NodeCost> costs, MirrorMap map);

  const Graph& graph() const { return graph_; }
  const EdgeWeights& weights() const { return weights_; }
  const std::vector<NodeCost>& costs() const { return costs_; }
  const MirrorMap& map() const { return map_; }
  Index dim() const { return map_.dim; }
  Index node_count() const { return graph_.node_count(); }
  Index edge_count() const { return graph_.edge_count(); }

  /// E_s(G).
  const BlockOperator& incidence() const { return incidence_; }
  /// L_d(G).
  const BlockOperator& laplacian() const { return laplacian_; }

  /// Power-iteration estimate of the largest eigenvalue of L_d.
  double lambda_estimate() const { return lambda_estimate_; }
  /// lambda_estimate() times kEigenvalueSafetyFactor; used for every step cap.
  double lambda() const { return lambda_estimate_ * kEigenvalueSafetyFactor; }
  /// min_e d_e / s_e, or +inf without edges.
  double gamma_inverse() const { return gamma_inverse_; }

  double objective(const Stacked& x) const;
  /// Column i is a subgradient of f_i at x_i.
  Stacked subgradient(const Stacked& x) const;
  /// Strong convexity moduli mu_i.
  Vec strong_convexity() const;

 private:
  Graph graph_;
  EdgeWeights weights_;
  std::vector<NodeCost> costs_;
  MirrorMap map_;
  BlockOperator incidence_;
  BlockOperator laplacian_;
  double lambda_estimate_ = 0.0;
  double gamma_inverse_ = 0.0;
};

/// Spring weights s = lambda d where lambda bounds the top eigenvalue of L_d.
Vec springs_proportional_to_lambda(const Graph& g, const Vec& damper);

/// The stacked point with every block equal to `block`.
Stacked replicate(const Vec& block, Index node_count);

enum class InitKind { Dirichlet, Uniform };

/// Initial point: per-node Dirichlet(1, ..., 1) draws (standard normal on free
/// space) or the simplex barycenter (zero on free space).
Stacked initial_point(const ProblemInstance& p, InitKind kind, std::uint64_t seed);

struct Optimum {
  Stacked x_star;
  bool nonunique = false;
  /// Set when the iterative fallback stopped before its tolerance.
  bool approximate = false;
};

/// Consensus minimizer of sum_i f_i over X0, replicated to every node.
/// Closed forms for all-linear costs on the simplex (argmin coordinate of
/// sum a_i, ties to the lowest index) and all-quadratic costs (weighted mean,
/// projected onto the domain); projected gradient on the aggregate otherwise.
/// Throws CertificateError when the problem is unbounded.
Optimum centralized_optimum(const ProblemInstance& p);

/// x*, u*, g* with E_s^T x* = 0 and -g* - E_s u* in N_X(x*), plus the bound
/// G >= ||g + E_s u*|| over all x in X and g in df(x).
struct Certificate {
  Stacked x_star;
  Stacked u_star;  ///< n x |E|
  Stacked g_star;  ///< n x |V|
  double G = 0.0;
  bool G_estimated = false;
  /// max_i dist(-g*_i - (E_s u*)_i, N_X0(x*_i)).
  double residual = 0.0;
};

/// Builds the certificate for a consensus optimum. Every block of -g* - E_s u*
/// is set to the shared normal vector -mean_i(g*_i), and u* is the
/// minimum-norm solution of the resulting linear system.
/// Throws CertificateError if x* is not a consensus point or -mean(g*) is not
/// normal to X0 at x* (x* is not optimal).
Certificate dual_certificate(const ProblemInstance& p, const Stacked& x_star);

/// l(x) = f(x) + <E_s u*, x>.
double lagrangian(const ProblemInstance& p, const Certificate& cert, const Stacked& x);

/// V(x, u) = B_psi(x*, x) + 1/2 ||u - u*||^2.
double lyapunov(const ProblemInstance& p, const Certificate& cert, const Stacked& x,
                const Stacked& u);

/// 1/2 <L_d x, x>.
double disagreement(const ProblemInstance& p, const Stacked& x);

/// max over edges of ||x_head - x_tail||.
double max_edge_disagreement(const ProblemInstance& p, const Stacked& x);

/// sum_i B_psi0(x'_i, x_i).
double stacked_bregman(const MirrorMap& map, const Stacked& x_prime, const Stacked& x);

}  // namespace msdnet
