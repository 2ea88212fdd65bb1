#include "msdnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace msdnet {

Vec normal_cone_projection(const MirrorMap& map, const Vec& x, const Vec& v, double support_tol) {
  if (map.domain == Domain::FreeSpace) return Vec::Zero(v.size());

  // Minimize sum_{supp} (v_i - t)^2 + sum_{off} (v_i - t)_+^2 over the level t;
  // the projection is t on the support and min(v_i, t) off it.
  std::vector<double> off_support;
  double support_sum = 0.0;
  Index support_size = 0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] > support_tol) {
      support_sum += v[i];
      ++support_size;
    } else {
      off_support.push_back(v[i]);
    }
  }
  if (support_size == 0) throw DomainError("normal cone: point has empty support");
  std::sort(off_support.begin(), off_support.end(), std::greater<>());
  double active_sum = support_sum;
  double active_count = static_cast<double>(support_size);
  double level = active_sum / active_count;
  for (double value : off_support) {
    if (value <= level) break;
    active_sum += value;
    active_count += 1.0;
    level = active_sum / active_count;
  }
  Vec projected(v.size());
  for (Index i = 0; i < x.size(); ++i)
    projected[i] = x[i] > support_tol ? level : std::min(v[i], level);
  return projected;
}

double normal_cone_residual(const MirrorMap& map, const Vec& x, const Vec& v, double support_tol) {
  return (v - normal_cone_projection(map, x, v, support_tol)).norm();
}

namespace {

Vec euclidean_domain_projection(const MirrorMap& map, const Vec& v) {
  return map.domain == Domain::Simplex ? simplex_projection(v) : v;
}

}  // namespace

double prox_residual(const MirrorMap& map, const Vec& x, const Vec& c, const NodeCost& cost,
                     double alpha, const Vec& y) {
  const Vec gradient =
      alpha * cost.subgradient(y) + c + potential_gradient(map, y) - potential_gradient(map, x);
  return (y - euclidean_domain_projection(map, y - gradient)).norm();
}

ProxResult bregman_prox_detailed(const MirrorMap& map, const Vec& x, const Vec& c,
                                 const NodeCost& cost, double alpha, const ProxOptions& options) {
  if (!(alpha > 0.0)) throw DomainError("bregman_prox: step must be positive");

  if (const auto* linear = cost.as_linear()) {
    return {mirror_step(map, x, c + alpha * linear->a), 0, 0.0};
  }
  if (const auto* quad = cost.as_quadratic(); quad && map.geometry == Geometry::Euclidean) {
    // Stationarity of alpha mu/2 ||y - b||^2 + <c, y> + 1/2 ||y - x||^2.
    const double weight = alpha * quad->mu;
    const Vec center = (x - c + weight * quad->b) / (1.0 + weight);
    return {euclidean_domain_projection(map, center), 0, 0.0};
  }

  const Vec grad_psi_x = potential_gradient(map, x);
  auto smooth_part = [&](const Vec& y) { return alpha * cost.value(y); };

  Vec y = x;
  double tau = 1.0;
  double residual = prox_residual(map, x, c, cost, alpha, y);
  for (long it = 1; it <= options.max_iterations; ++it) {
    const Vec linear = c + alpha * cost.subgradient(y);
    const Vec grad_psi_y = potential_gradient(map, y);
    const double f_y = smooth_part(y);
    Vec candidate;
    for (int backtrack = 0;; ++backtrack) {
      candidate = dual_to_primal(map, (grad_psi_x + tau * grad_psi_y - linear) / (1.0 + tau));
      const double model = f_y + alpha * cost.subgradient(y).dot(candidate - y) +
                           tau * bregman(map, candidate, y);
      const double actual = smooth_part(candidate);
      if (actual <= model + 1e-14 * std::max(1.0, std::abs(actual))) break;
      if (backtrack > 200) throw NumericalError("bregman_prox: backtracking failed", it, residual);
      tau *= 2.0;
    }
    if (has_underflow(map, candidate))
      throw NumericalError("bregman_prox: inner iterate underflowed", it, residual);
    const double change = (candidate - y).lpNorm<Eigen::Infinity>();
    y = std::move(candidate);
    residual = prox_residual(map, x, c, cost, alpha, y);
    if (residual < options.residual_tol) return {y, it, residual};
    if (change <= options.step_tol)
      throw NumericalError("bregman_prox: inner iterates stagnated", it, residual);
  }
  throw NumericalError("bregman_prox: inner solver did not converge", options.max_iterations,
                       residual);
}

}  // namespace msdnet
