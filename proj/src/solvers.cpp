#include "msdnet/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msdnet {

SolverState make_state(const ProblemInstance& p, const Stacked& x0) {
  if (x0.rows() != p.dim() || x0.cols() != p.node_count())
    throw DomainError("initial point has the wrong shape");
  SolverState state;
  state.x = x0;
  state.u = Stacked::Zero(p.dim(), p.edge_count());
  state.avg_num = Stacked::Zero(p.dim(), p.node_count());
  state.underflow = has_underflow(p.map(), x0);
  return state;
}

double explicit_step_cap(double lambda, double gamma_inv) {
  const double eigen_cap =
      lambda > 0.0 ? 1.0 / (2.0 * lambda) : std::numeric_limits<double>::infinity();
  return std::min(eigen_cap, gamma_inv);
}

double implicit_step_cap(double lambda, double gamma_inv) {
  const double eigen_cap = lambda > 0.0 ? 1.0 / lambda : std::numeric_limits<double>::infinity();
  return std::min(eigen_cap, 0.5 * gamma_inv);
}

bool within_cap(double alpha, double cap) { return alpha > 0.0 && alpha <= cap * (1.0 + 1e-12); }

double step_size(const StepSchedule& schedule, long k, double lambda, double gamma_inv) {
  if (k < 1) throw DomainError("step index must be >= 1");
  if (!schedule.has_base && !(lambda > 0.0))
    throw DomainError("step size needs lambda > 0 (got " + std::to_string(lambda) + ")");
  if (schedule.kind == StepSchedule::Kind::Diminishing) {
    const double base = schedule.has_base ? schedule.base : 1.0 / (2.0 * lambda);
    return base / std::sqrt(static_cast<double>(k));
  }
  return schedule.has_base ? schedule.base : implicit_step_cap(lambda, gamma_inv);
}

namespace {

SolverState advance_dual(const ProblemInstance& p, const SolverState& state, Stacked x_next,
                         double alpha) {
  SolverState next;
  next.u = state.u + alpha * p.incidence().apply_adjoint(x_next);
  next.x = std::move(x_next);
  next.k = state.k + 1;
  next.underflow = state.underflow || has_underflow(p.map(), next.x);
  return next;
}

}  // namespace

SolverState msd_explicit_step(const ProblemInstance& p, const SolverState& state, double alpha) {
  const Stacked g = p.subgradient(state.x);
  const Stacked w = p.laplacian().apply(state.x) + p.incidence().apply(state.u);
  Stacked x_next(p.dim(), p.node_count());
  for (Index i = 0; i < p.node_count(); ++i)
    x_next.col(i) = mirror_step(p.map(), state.x.col(i), alpha * (g.col(i) + w.col(i)));

  SolverState next = advance_dual(p, state, std::move(x_next), alpha);
  next.avg_num = state.avg_num + alpha * state.x;
  next.avg_den = state.avg_den + alpha;
  next.caps_respected =
      state.caps_respected && within_cap(alpha, explicit_step_cap(p.lambda(), p.gamma_inverse()));
  return next;
}

SolverState msd_implicit_step(const ProblemInstance& p, const SolverState& state, double alpha,
                              const ProxOptions& prox) {
  const Stacked w = p.laplacian().apply(state.x) + p.incidence().apply(state.u);
  Stacked x_next(p.dim(), p.node_count());
  for (Index i = 0; i < p.node_count(); ++i)
    x_next.col(i) =
        bregman_prox(p.map(), state.x.col(i), alpha * w.col(i), p.costs()[i], alpha, prox);

  SolverState next = advance_dual(p, state, std::move(x_next), alpha);
  next.avg_num = state.avg_num + next.x;
  next.avg_den = state.avg_den + 1.0;
  next.caps_respected =
      state.caps_respected && within_cap(alpha, implicit_step_cap(p.lambda(), p.gamma_inverse()));
  return next;
}

namespace {

struct Phase {
  Stacked z;
  Stacked u;
};

Stacked to_primal(const MirrorMap& map, const Stacked& z) {
  Stacked x(z.rows(), z.cols());
  for (Index i = 0; i < z.cols(); ++i) x.col(i) = dual_to_primal(map, z.col(i));
  return x;
}

Phase vector_field(const ProblemInstance& p, const Phase& s, const Stacked& x) {
  return {-p.laplacian().apply(x) - p.incidence().apply(s.u) - p.subgradient(x),
          p.incidence().apply_adjoint(x)};
}

bool finite(const Stacked& m) { return m.allFinite(); }

// Returns false if the state left the finite range.
bool integrate(const ProblemInstance& p, const Certificate& cert, const Stacked& x0,
               const Stacked& u0, const ContinuousOptions& options, double h,
               ContinuousResult& out) {
  const MirrorMap& map = p.map();
  Phase s;
  s.z = Stacked(p.dim(), p.node_count());
  for (Index i = 0; i < p.node_count(); ++i) s.z.col(i) = potential_gradient(map, x0.col(i));
  s.u = u0;
  Stacked x = to_primal(map, s.z);
  Stacked integral = Stacked::Zero(p.dim(), p.node_count());
  const double v0 = lyapunov(p, cert, x0, u0);
  const double l_star = lagrangian(p, cert, cert.x_star);

  out.checkpoints.clear();
  double t = 0.0;
  for (double target : options.checkpoints) {
    while (t < target) {
      const double dt = std::min(h, target - t);
      const Phase k1 = vector_field(p, s, x);
      const Phase s2{s.z + 0.5 * dt * k1.z, s.u + 0.5 * dt * k1.u};
      const Phase k2 = vector_field(p, s2, to_primal(map, s2.z));
      const Phase s3{s.z + 0.5 * dt * k2.z, s.u + 0.5 * dt * k2.u};
      const Phase k3 = vector_field(p, s3, to_primal(map, s3.z));
      const Phase s4{s.z + dt * k3.z, s.u + dt * k3.u};
      const Phase k4 = vector_field(p, s4, to_primal(map, s4.z));
      s.z += dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
      s.u += dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
      if (!finite(s.z) || !finite(s.u)) return false;
      // Entropy coordinates are defined up to a per-block constant.
      if (map.geometry == Geometry::NegativeEntropy)
        s.z.rowwise() -= s.z.colwise().maxCoeff();
      Stacked x_next = to_primal(map, s.z);
      if (!finite(x_next)) return false;
      integral += 0.5 * dt * (x + x_next);
      x = std::move(x_next);
      t = (target - t <= h) ? target : t + dt;
    }
    ContinuousCheckpoint cp;
    cp.horizon = target;
    cp.x_average = integral / target;
    cp.gap = lagrangian(p, cert, cp.x_average) - l_star + disagreement(p, cp.x_average);
    cp.bound = v0 / target;
    out.checkpoints.push_back(std::move(cp));
  }
  out.x_final = x;
  out.u_final = s.u;
  return true;
}

}  // namespace

ContinuousResult simulate_continuous(const ProblemInstance& p, const Certificate& cert,
                                     const Stacked& x0, const Stacked& u0,
                                     const ContinuousOptions& options) {
  for (const NodeCost& c : p.costs())
    if (!c.is_smooth()) throw DomainError("continuous simulation needs differentiable costs");
  if (!(options.step > 0.0)) throw DomainError("integration step must be positive");
  if (!std::is_sorted(options.checkpoints.begin(), options.checkpoints.end()) ||
      (!options.checkpoints.empty() && !(options.checkpoints.front() > 0.0)))
    throw DomainError("checkpoints must be positive and ascending");
  if (u0.rows() != p.dim() || u0.cols() != p.edge_count())
    throw DomainError("u0 has the wrong shape");

  ContinuousResult result;
  double h = options.step;
  for (int halving = 0; halving <= options.max_halvings; ++halving) {
    if (integrate(p, cert, x0, u0, options, h, result)) {
      result.step_used = h;
      result.halvings = halving;
      return result;
    }
    h *= 0.5;
  }
  throw NumericalError("continuous simulation left the domain", options.max_halvings, h);
}

}  // namespace msdnet
