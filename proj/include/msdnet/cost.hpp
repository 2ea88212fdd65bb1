#pragma once

#include "msdnet/common.hpp"

#include <functional>
#include <variant>

namespace msdnet {

/// Convex cost held by one node.
///
///   Linear     f(y) = <a, y>
///   Quadratic  f(y) = (mu / 2) ||y - b||^2, mu > 0
///   Custom     user supplied value and subgradient oracles
///
/// The strong convexity modulus is the mu in "f - (mu/2)||.||^2 is convex";
/// it is 0 for linear costs and user declared for custom ones.
class NodeCost {
 public:
  struct Linear {
    Vec a;
  };
  struct Quadratic {
    double mu;
    Vec b;
  };
  struct Custom {
    Index dim;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> subgradient;
    double mu = 0.0;
    /// True when the subgradient oracle is the gradient of a differentiable f.
    bool smooth = false;
  };

  static NodeCost linear(Vec a);
  /// Throws DomainError unless mu > 0.
  static NodeCost quadratic(double mu, Vec b);
  static NodeCost custom(Custom oracle);

  Index dim() const;
  double value(const Vec& y) const;
  Vec subgradient(const Vec& y) const;
  double strong_convexity() const;
  bool is_smooth() const;

  const Linear* as_linear() const { return std::get_if<Linear>(&kind_); }
  const Quadratic* as_quadratic() const { return std::get_if<Quadratic>(&kind_); }
  const Custom* as_custom() const { return std::get_if<Custom>(&kind_); }

 private:
  explicit NodeCost(std::variant<Linear, Quadratic, Custom> kind) : kind_(std::move(kind)) {}

  std::variant<Linear, Quadratic, Custom> kind_;
};

}  // namespace msdnet
