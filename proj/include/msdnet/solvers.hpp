#pragma once

#include "msdnet/common.hpp"
#include "msdnet/problem.hpp"

#include <vector>

namespace msdnet {

/// Iterate of the discrete mass-spring-damper methods.
///
/// `k` is the index of the iterate held in `x` (the initial point is k = 1).
/// The explicit method accumulates sum_k alpha^k x^k over pre-step iterates;
/// the implicit method accumulates the unweighted sum of post-step iterates
/// x^{k+1}. average() is avg_num / avg_den either way.
struct SolverState {
  Stacked x;
  Stacked u;
  long k = 1;
  Stacked avg_num;
  double avg_den = 0.0;
  /// Some entropy coordinate fell below kUnderflowFloor.
  bool underflow = false;
  /// Every step so far respected the relevant step cap.
  bool caps_respected = true;

  Stacked average() const { return avg_num / avg_den; }
};

/// Fresh state at x0 with u = 0 and an empty average.
SolverState make_state(const ProblemInstance& p, const Stacked& x0);

/// alpha^k = base / sqrt(k) (Diminishing) or alpha = base (Constant). A base
/// left unset resolves to 1/(2 lambda) for Diminishing and
/// min{1/lambda, 1/(2 gamma)} for Constant.
struct StepSchedule {
  enum class Kind { Diminishing, Constant };

  Kind kind = Kind::Diminishing;
  double base = 0.0;
  bool has_base = false;

  static StepSchedule diminishing() { return {Kind::Diminishing, 0.0, false}; }
  static StepSchedule diminishing(double base) { return {Kind::Diminishing, base, true}; }
  static StepSchedule constant() { return {Kind::Constant, 0.0, false}; }
  static StepSchedule constant(double alpha) { return {Kind::Constant, alpha, true}; }
};

/// Step alpha^k for k >= 1. Throws DomainError if k < 1, or if the schedule
/// needs lambda and lambda <= 0.
double step_size(const StepSchedule& schedule, long k, double lambda, double gamma_inv);

/// min{1/(2 lambda), 1/gamma}: admissible explicit steps.
double explicit_step_cap(double lambda, double gamma_inv);
/// min{1/lambda, 1/(2 gamma)}: the implicit constant step.
double implicit_step_cap(double lambda, double gamma_inv);
/// alpha <= cap up to a relative rounding allowance.
bool within_cap(double alpha, double cap);

/// One explicit iteration:
///   w^k     = L_d x^k + E_s u^k
///   x^{k+1} = argmin alpha <g^k + w^k, x> + B_psi(x, x^k)   (blockwise)
///   u^{k+1} = u^k + alpha E_s^T x^{k+1}
/// Steps above the explicit cap are taken but clear caps_respected.
SolverState msd_explicit_step(const ProblemInstance& p, const SolverState& state, double alpha);

/// One implicit iteration: as msd_explicit_step with the x-update replaced by
/// argmin alpha f(x) + alpha <w^k, x> + B_psi(x, x^k).
SolverState msd_implicit_step(const ProblemInstance& p, const SolverState& state, double alpha,
                              const ProxOptions& prox = {});

struct ContinuousOptions {
  double step = 1e-2;
  /// Horizons T at which the running average is reported; sorted ascending.
  std::vector<double> checkpoints;
  int max_halvings = 10;
};

struct ContinuousCheckpoint {
  double horizon = 0.0;
  Stacked x_average;  ///< (1/T) int_0^T x dt, trapezoid rule
  double gap = 0.0;   ///< l(x_avg) - l(x*) + 1/2 <L_d x_avg, x_avg>
  double bound = 0.0; ///< V(x(0), u(0)) / T
};

struct ContinuousResult {
  std::vector<ContinuousCheckpoint> checkpoints;
  Stacked x_final;
  Stacked u_final;
  double step_used = 0.0;
  int halvings = 0;
};

/// Integrates
///   d/dt grad psi(x) = -L_d x - E_s u - grad f(x),   du/dt = E_s^T x
/// with classical RK4 in the mirror coordinates z = grad psi(x), mapping back
/// through dual_to_primal at every stage. Costs must be smooth. A non-finite
/// state halves the step and restarts, up to max_halvings times.
ContinuousResult simulate_continuous(const ProblemInstance& p, const Certificate& cert,
                                     const Stacked& x0, const Stacked& u0,
                                     const ContinuousOptions& options);

}  // namespace msdnet
