#pragma once

#include "msdnet/common.hpp"
#include "msdnet/cost.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace msdnet {

enum class Geometry { Euclidean, NegativeEntropy };
enum class Domain { FreeSpace, Simplex };

/// A 1-strongly convex potential psi0 on a node domain X0 in R^n.
///   Euclidean        psi0(y) = 1/2 ||y||^2     on R^n or the simplex
///   NegativeEntropy  psi0(y) = sum y[i] ln y[i] on the simplex only
struct MirrorMap {
  Geometry geometry = Geometry::Euclidean;
  Domain domain = Domain::FreeSpace;
  Index dim = 1;

  static MirrorMap euclidean(Index n, Domain d = Domain::FreeSpace) {
    return {Geometry::Euclidean, d, n};
  }
  static MirrorMap entropy(Index n) { return {Geometry::NegativeEntropy, Domain::Simplex, n}; }

  /// Throws DomainError for entropy on free space or a nonpositive dimension.
  void validate() const {
    if (dim < 1) throw DomainError("mirror map dimension must be positive");
    if (geometry == Geometry::NegativeEntropy && domain != Domain::Simplex)
      throw DomainError("negative entropy is only defined on the simplex");
  }

  friend bool operator==(const MirrorMap&, const MirrorMap&) = default;
};

/// Coordinates below this after a multiplicative update are reported as
/// underflow; they are never clamped.
inline constexpr double kUnderflowFloor = 1e-300;

namespace detail {

template <typename Derived>
void require_interior(const Eigen::MatrixBase<Derived>& x, const char* what) {
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0))
      throw DomainError(std::string(what) + ": coordinate " + std::to_string(i) +
                        " is not strictly positive (entropy geometry needs an interior point)");
  }
}

template <typename Derived>
void require_nonnegative(const Eigen::MatrixBase<Derived>& x, const char* what) {
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0))
      throw DomainError(std::string(what) + ": coordinate " + std::to_string(i) + " is negative");
  }
}

/// Normalized exp(z - max z).
template <typename Derived>
Vec softmax(const Eigen::MatrixBase<Derived>& z) {
  Vec y = (z.array() - z.maxCoeff()).exp().matrix();
  return y / y.sum();
}

}  // namespace detail

/// Euclidean projection onto {y >= 0, sum y = 1} by sort and threshold.
template <typename Derived>
Vec simplex_projection(const Eigen::MatrixBase<Derived>& v) {
  const Index n = v.size();
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = v[i];
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

/// psi0(y).
template <typename Derived>
double potential(const MirrorMap& map, const Eigen::MatrixBase<Derived>& y) {
  if (map.geometry == Geometry::Euclidean) return 0.5 * y.squaredNorm();
  detail::require_nonnegative(y, "potential");
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i)
    if (y[i] > 0.0) total += y[i] * std::log(y[i]);
  return total;
}

/// grad psi0(y). Entropy requires a strictly positive y.
template <typename Derived>
Vec potential_gradient(const MirrorMap& map, const Eigen::MatrixBase<Derived>& y) {
  if (map.geometry == Geometry::Euclidean) return y;
  detail::require_interior(y, "potential_gradient");
  return (y.array().log() + 1.0).matrix();
}

/// argmin_{y in X0} psi0(y) - <z, y>: the inverse gradient map restricted to
/// the domain. Identity on free space, simplex projection for Euclidean on the
/// simplex, softmax for entropy.
template <typename Derived>
Vec dual_to_primal(const MirrorMap& map, const Eigen::MatrixBase<Derived>& z) {
  if (map.geometry == Geometry::NegativeEntropy) return detail::softmax(z);
  if (map.domain == Domain::Simplex) return simplex_projection(z);
  return z;
}

/// B_psi0(x', x) = psi0(x') - psi0(x) - <grad psi0(x), x' - x>.
/// For entropy this is evaluated as sum x' ln(x'/x) - x' + x, which equals the
/// definition on the positive orthant and the KL divergence on the simplex.
template <typename A, typename B>
double bregman(const MirrorMap& map, const Eigen::MatrixBase<A>& x_prime,
               const Eigen::MatrixBase<B>& x) {
  if (map.geometry == Geometry::Euclidean) return 0.5 * (x_prime - x).squaredNorm();
  detail::require_interior(x, "bregman");
  detail::require_nonnegative(x_prime, "bregman");
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    total += x[i] - x_prime[i];
    if (x_prime[i] > 0.0) total += x_prime[i] * std::log(x_prime[i] / x[i]);
  }
  return std::max(total, 0.0);
}

/// argmin_{y in X0} <c, y> + B_psi0(y, x).
template <typename A, typename B>
Vec mirror_step(const MirrorMap& map, const Eigen::MatrixBase<A>& x,
                const Eigen::MatrixBase<B>& c) {
  if (map.geometry == Geometry::NegativeEntropy) {
    detail::require_interior(x, "mirror_step");
    return detail::softmax((x.array().log() - c.array()).matrix());
  }
  if (map.domain == Domain::Simplex) return simplex_projection(x - c);
  return x - c;
}

/// True if some coordinate of an entropy iterate fell below kUnderflowFloor.
template <typename Derived>
bool has_underflow(const MirrorMap& map, const Eigen::MatrixBase<Derived>& x) {
  return map.geometry == Geometry::NegativeEntropy && x.minCoeff() < kUnderflowFloor;
}

/// Euclidean projection of v onto the normal cone N_X0(x). On free space the
/// cone is {0}; on the simplex it is {t 1 - w : w >= 0, w = 0 on supp(x)},
/// with supp(x) = {i : x[i] > support_tol}.
Vec normal_cone_projection(const MirrorMap& map, const Vec& x, const Vec& v,
                           double support_tol = 1e-12);

/// Distance from v to N_X0(x).
double normal_cone_residual(const MirrorMap& map, const Vec& x, const Vec& v,
                            double support_tol = 1e-12);

struct ProxOptions {
  double residual_tol = 1e-10;
  /// Stagnation guard on max |y_{t+1} - y_t|: the loop gives up
  /// (NumericalError) once iterates stop moving before the residual is met.
  double step_tol = 0.0;
  long max_iterations = 100000;
};

struct ProxResult {
  Vec point;
  long iterations = 0;  ///< 0 for closed-form cases
  double residual = 0.0;
};

/// argmin_{y in X0} alpha cost(y) + <c, y> + B_psi0(y, x).
///
/// Linear costs reduce to mirror_step(x, c + alpha a). Quadratic costs under
/// the Euclidean map have a closed form (a projection on the simplex). Every
/// other case runs a Bregman proximal-gradient inner loop that linearizes the
/// cost only, keeping B(., x) exact:
///
///   y_{t+1} = argmin_y <c + alpha grad f(y_t), y> + B(y, x) + tau B(y, y_t)
///
/// with tau doubled until the relative-smoothness descent test holds. The loop
/// stops on the projected first-order residual of the full objective.
/// Throws NumericalError carrying the residual on nonconvergence.
ProxResult bregman_prox_detailed(const MirrorMap& map, const Vec& x, const Vec& c,
                                 const NodeCost& cost, double alpha,
                                 const ProxOptions& options = {});

inline Vec bregman_prox(const MirrorMap& map, const Vec& x, const Vec& c, const NodeCost& cost,
                        double alpha, const ProxOptions& options = {}) {
  return bregman_prox_detailed(map, x, c, cost, alpha, options).point;
}

/// Projected first-order residual ||y - P_X0(y - grad F(y))|| of the proximal
/// objective F(y) = alpha cost(y) + <c, y> + B(y, x). Zero exactly at the
/// minimizer for smooth costs.
double prox_residual(const MirrorMap& map, const Vec& x, const Vec& c, const NodeCost& cost,
                     double alpha, const Vec& y);

}  // namespace msdnet
