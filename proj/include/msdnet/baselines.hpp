#pragma once

#include "msdnet/common.hpp"
#include "msdnet/problem.hpp"

namespace msdnet {

// Consensus-based comparison methods. Each mixes node blocks through a doubly
// stochastic matrix P; mixing a stacked X is X P^T. Subgradients are taken at
// the pre-mix iterate x_i^k.

/// P = I - L(G) / (2 + 2 Delta), with L(G) = E E^T unweighted and Delta its
/// largest diagonal entry. Symmetric, doubly stochastic, positive diagonal.
Mat mixing_matrix(const Graph& g);

/// Second largest eigenvalue modulus of a symmetric stochastic matrix.
double second_eigenvalue_modulus(const Mat& mixing);

/// x_i+ = Proj_X0(sum_j P_ij x_j - alpha g_i).
Stacked distributed_projected_subgradient_step(const ProblemInstance& p, const Mat& mixing,
                                               const Stacked& x, double alpha);

/// y_i = sum_j P_ij x_j;  x_i+ = mirror_step(y_i, alpha g_i).
Stacked distributed_mirror_descent_step(const ProblemInstance& p, const Mat& mixing,
                                        const Stacked& x, double alpha);

struct DualAveragingState {
  Stacked z;  ///< accumulated subgradients, starts at 0
  Stacked x;
};

/// z_i+ = sum_j P_ij z_j + g_i(x_i);
/// x_i+ = argmin_{y in X0} <z_i+, y> + psi0(y) / alpha.
DualAveragingState distributed_dual_averaging_step(const ProblemInstance& p, const Mat& mixing,
                                                   const DualAveragingState& state,
                                                   double alpha);

}  // namespace msdnet
