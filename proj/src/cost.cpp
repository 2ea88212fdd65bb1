#include "msdnet/cost.hpp"

#include <cmath>

namespace msdnet {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

NodeCost NodeCost::linear(Vec a) { return NodeCost(Linear{std::move(a)}); }

NodeCost NodeCost::quadratic(double mu, Vec b) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("quadratic cost needs mu > 0");
  return NodeCost(Quadratic{mu, std::move(b)});
}

NodeCost NodeCost::custom(Custom oracle) {
  if (!oracle.value || !oracle.subgradient) throw DomainError("custom cost needs both oracles");
  if (oracle.mu < 0.0) throw DomainError("custom cost strong convexity must be >= 0");
  return NodeCost(std::move(oracle));
}

Index NodeCost::dim() const {
  return std::visit(overloaded{[](const Linear& c) { return c.a.size(); },
                               [](const Quadratic& c) { return c.b.size(); },
                               [](const Custom& c) { return c.dim; }},
                    kind_);
}

double NodeCost::value(const Vec& y) const {
  return std::visit(
      overloaded{[&](const Linear& c) { return c.a.dot(y); },
                 [&](const Quadratic& c) { return 0.5 * c.mu * (y - c.b).squaredNorm(); },
                 [&](const Custom& c) { return c.value(y); }},
      kind_);
}

Vec NodeCost::subgradient(const Vec& y) const {
  return std::visit(overloaded{[&](const Linear& c) -> Vec { return c.a; },
                               [&](const Quadratic& c) -> Vec { return c.mu * (y - c.b); },
                               [&](const Custom& c) -> Vec { return c.subgradient(y); }},
                    kind_);
}

double NodeCost::strong_convexity() const {
  return std::visit(overloaded{[](const Linear&) { return 0.0; },
                               [](const Quadratic& c) { return c.mu; },
                               [](const Custom& c) { return c.mu; }},
                    kind_);
}

bool NodeCost::is_smooth() const {
  return std::visit(overloaded{[](const Linear&) { return true; },
                               [](const Quadratic&) { return true; },
                               [](const Custom& c) { return c.smooth; }},
                    kind_);
}

}  // namespace msdnet
