#include "msdnet/problem.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <random>

namespace msdnet {

ProblemInstance::ProblemInstance(Graph graph, EdgeWeights weights, std::vector<NodeCost> costs,
                                 MirrorMap map)
    : graph_(std::move(graph)),
      weights_(std::move(weights)),
      costs_(std::move(costs)),
      map_(map) {
  map_.validate();
  weights_.validate(graph_.edge_count());
  if (static_cast<Index>(costs_.size()) != graph_.node_count())
    throw DomainError("expected one cost per node (" + std::to_string(graph_.node_count()) +
                      "), got " + std::to_string(costs_.size()));
  for (std::size_t i = 0; i < costs_.size(); ++i) {
    if (costs_[i].dim() != map_.dim)
      throw DomainError("cost of node " + std::to_string(i) + " has dimension " +
                        std::to_string(costs_[i].dim()) + ", mirror map has " +
                        std::to_string(map_.dim));
  }
  incidence_ = scaled_incidence(graph_, weights_.spring);
  laplacian_ = weighted_laplacian(graph_, weights_.damper);
  lambda_estimate_ = largest_eigenvalue(laplacian_);
  gamma_inverse_ = graph_.edge_count() == 0
                       ? std::numeric_limits<double>::infinity()
                       : msdnet::gamma_inverse(weights_.spring, weights_.damper);
}

double ProblemInstance::objective(const Stacked& x) const {
  double total = 0.0;
  for (Index i = 0; i < node_count(); ++i) total += costs_[i].value(x.col(i));
  return total;
}

Stacked ProblemInstance::subgradient(const Stacked& x) const {
  Stacked g(dim(), node_count());
  for (Index i = 0; i < node_count(); ++i) g.col(i) = costs_[i].subgradient(x.col(i));
  return g;
}

Vec ProblemInstance::strong_convexity() const {
  Vec mu(node_count());
  for (Index i = 0; i < node_count(); ++i) mu[i] = costs_[i].strong_convexity();
  return mu;
}

Vec springs_proportional_to_lambda(const Graph& g, const Vec& damper) {
  const double lambda = largest_eigenvalue(weighted_laplacian(g, damper)) * kEigenvalueSafetyFactor;
  return lambda * damper;
}

Stacked replicate(const Vec& block, Index node_count) { return block.replicate(1, node_count); }

Stacked initial_point(const ProblemInstance& p, InitKind kind, std::uint64_t seed) {
  const Index n = p.dim();
  const bool simplex = p.map().domain == Domain::Simplex;
  if (kind == InitKind::Uniform) {
    return simplex ? Stacked::Constant(n, p.node_count(), 1.0 / static_cast<double>(n))
                   : Stacked::Zero(n, p.node_count());
  }
  std::mt19937_64 rng(seed);
  Stacked x(n, p.node_count());
  if (simplex) {
    std::exponential_distribution<double> exponential(1.0);
    for (Index i = 0; i < p.node_count(); ++i) {
      for (Index k = 0; k < n; ++k) x(k, i) = exponential(rng);
      x.col(i) /= x.col(i).sum();
    }
  } else {
    std::normal_distribution<double> normal;
    for (Index i = 0; i < p.node_count(); ++i)
      for (Index k = 0; k < n; ++k) x(k, i) = normal(rng);
  }
  return x;
}

namespace {

Vec project_domain(const MirrorMap& map, const Vec& v) {
  return map.domain == Domain::Simplex ? simplex_projection(v) : v;
}

// Projected gradient with backtracking on F(y) = sum_i f_i(y) over X0.
Optimum aggregate_projected_gradient(const ProblemInstance& p) {
  const MirrorMap& map = p.map();
  auto value = [&](const Vec& y) {
    double total = 0.0;
    for (const NodeCost& c : p.costs()) total += c.value(y);
    return total;
  };
  auto gradient = [&](const Vec& y) {
    Vec total = Vec::Zero(p.dim());
    for (const NodeCost& c : p.costs()) total += c.subgradient(y);
    return total;
  };
  Vec y = map.domain == Domain::Simplex ? Vec::Constant(p.dim(), 1.0 / static_cast<double>(p.dim()))
                                        : Vec::Zero(p.dim());
  double step = 1.0;
  constexpr double kTolerance = 1e-10;
  constexpr long kMaxIterations = 200000;
  for (long it = 0; it < kMaxIterations; ++it) {
    const Vec g = gradient(y);
    const double fy = value(y);
    Vec next;
    for (int backtrack = 0; backtrack < 100; ++backtrack) {
      next = project_domain(map, y - step * g);
      const Vec d = next - y;
      if (value(next) <= fy + g.dot(d) + d.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(fy))
        break;
      step *= 0.5;
    }
    const double mapping = (next - y).norm() / step;
    y = std::move(next);
    if (mapping < kTolerance) return {replicate(y, p.node_count()), false, false};
    step *= 1.5;
  }
  return {replicate(y, p.node_count()), false, true};
}

}  // namespace

Optimum centralized_optimum(const ProblemInstance& p) {
  bool all_linear = true;
  bool all_quadratic = true;
  for (const NodeCost& c : p.costs()) {
    all_linear = all_linear && c.as_linear() != nullptr;
    all_quadratic = all_quadratic && c.as_quadratic() != nullptr;
  }
  const Index n = p.dim();

  if (all_linear) {
    Vec total = Vec::Zero(n);
    for (const NodeCost& c : p.costs()) total += c.as_linear()->a;
    if (p.map().domain == Domain::FreeSpace) {
      if (total.norm() > 1e-12)
        throw CertificateError("linear objective is unbounded below on free space");
      return {Stacked::Zero(n, p.node_count()), true, false};
    }
    Index best = 0;
    for (Index k = 1; k < n; ++k)
      if (total[k] < total[best]) best = k;
    bool tie = false;
    for (Index k = 0; k < n; ++k)
      if (k != best && std::abs(total[k] - total[best]) <= 1e-12) tie = true;
    return {replicate(Vec::Unit(n, best), p.node_count()), tie, false};
  }

  if (all_quadratic) {
    Vec weighted = Vec::Zero(n);
    double mass = 0.0;
    for (const NodeCost& c : p.costs()) {
      weighted += c.as_quadratic()->mu * c.as_quadratic()->b;
      mass += c.as_quadratic()->mu;
    }
    return {replicate(project_domain(p.map(), weighted / mass), p.node_count()), false, false};
  }

  return aggregate_projected_gradient(p);
}

namespace {

double uniform_subgradient_bound(const ProblemInstance& p, const Stacked& shift, bool& estimated) {
  const MirrorMap& map = p.map();
  const Index n = p.dim();
  estimated = false;
  double squared = 0.0;
  for (Index i = 0; i < p.node_count(); ++i) {
    const NodeCost& cost = p.costs()[i];
    const Vec q = shift.col(i);
    if (const auto* linear = cost.as_linear()) {
      squared += (linear->a + q).squaredNorm();
    } else if (const auto* quad = cost.as_quadratic()) {
      if (map.domain == Domain::FreeSpace) return std::numeric_limits<double>::infinity();
      // ||mu (y - b) + q|| is convex in y, so its maximum over the simplex is
      // attained at a vertex.
      double worst = 0.0;
      for (Index m = 0; m < n; ++m)
        worst = std::max(worst, (quad->mu * (Vec::Unit(n, m) - quad->b) + q).squaredNorm());
      squared += worst;
    } else {
      estimated = true;
      std::mt19937_64 rng(0x6b0dULL + static_cast<std::uint64_t>(i));
      std::exponential_distribution<double> exponential(1.0);
      std::normal_distribution<double> normal;
      double worst = 0.0;
      for (int sample = 0; sample < 10000; ++sample) {
        Vec y(n);
        if (map.domain == Domain::Simplex) {
          for (Index k = 0; k < n; ++k) y[k] = exponential(rng);
          y /= y.sum();
        } else {
          for (Index k = 0; k < n; ++k) y[k] = normal(rng);
        }
        worst = std::max(worst, (cost.subgradient(y) + q).squaredNorm());
      }
      squared += 1.1 * 1.1 * worst;
    }
  }
  return std::sqrt(squared);
}

}  // namespace

Certificate dual_certificate(const ProblemInstance& p, const Stacked& x_star) {
  const Index n = p.dim();
  const Index nodes = p.node_count();
  if (x_star.rows() != n || x_star.cols() != nodes)
    throw CertificateError("x* has the wrong shape");
  const double consensus_gap = p.incidence().apply_adjoint(x_star).norm();
  if (consensus_gap > 1e-10)
    throw CertificateError("x* is not a consensus point (||E_s^T x*|| = " +
                           std::to_string(consensus_gap) + ")");

  const Vec point = x_star.col(0);
  Certificate cert;
  cert.x_star = x_star;
  cert.g_star = p.subgradient(x_star);
  const Vec mean_g = cert.g_star.rowwise().mean();

  const double normal_gap = normal_cone_residual(p.map(), point, -mean_g);
  if (normal_gap > 1e-8 * std::max(1.0, mean_g.norm()))
    throw CertificateError("-mean(g*) is not in the normal cone at x* (distance " +
                           std::to_string(normal_gap) + "); x* is not optimal");

  // Target E_s u = mean_g 1^T - g*, whose node sums vanish. The minimum-norm
  // solution is u = B^T L_s^+ r per coordinate, with B = E diag(sqrt s) and
  // L_s = B B^T; L_s^+ r = (L_s + 11^T/|V|)^{-1} r for r orthogonal to 1.
  const Stacked target = mean_g.replicate(1, nodes) - cert.g_star;
  const Mat base = Mat(p.incidence().base());
  const Mat shifted_laplacian =
      base * base.transpose() + Mat::Constant(nodes, nodes, 1.0 / static_cast<double>(nodes));
  const Eigen::LDLT<Mat> solver(shifted_laplacian);
  const Mat y = solver.solve(Mat(target.transpose())).transpose();
  cert.u_star = y * base;

  const Stacked coupling = p.incidence().apply(cert.u_star);
  for (Index i = 0; i < nodes; ++i) {
    const Vec v = -cert.g_star.col(i) - coupling.col(i);
    cert.residual = std::max(cert.residual, normal_cone_residual(p.map(), point, v));
  }
  if (cert.residual > 1e-8)
    throw CertificateError("certificate residual " + std::to_string(cert.residual) +
                           " exceeds 1e-8");
  cert.G = uniform_subgradient_bound(p, coupling, cert.G_estimated);
  return cert;
}

double lagrangian(const ProblemInstance& p, const Certificate& cert, const Stacked& x) {
  return p.objective(x) + inner(p.incidence().apply(cert.u_star), x);
}

double stacked_bregman(const MirrorMap& map, const Stacked& x_prime, const Stacked& x) {
  double total = 0.0;
  for (Index i = 0; i < x.cols(); ++i) total += bregman(map, x_prime.col(i), x.col(i));
  return total;
}

double lyapunov(const ProblemInstance& p, const Certificate& cert, const Stacked& x,
                const Stacked& u) {
  return stacked_bregman(p.map(), cert.x_star, x) + 0.5 * (u - cert.u_star).squaredNorm();
}

double disagreement(const ProblemInstance& p, const Stacked& x) {
  return 0.5 * inner(p.laplacian().apply(x), x);
}

double max_edge_disagreement(const ProblemInstance& p, const Stacked& x) {
  double worst = 0.0;
  for (const Edge& e : p.graph().edges())
    worst = std::max(worst, (x.col(e.head) - x.col(e.tail)).norm());
  return worst;
}

}  // namespace msdnet
