#include "msdnet/baselines.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace msdnet {

Mat mixing_matrix(const Graph& g) {
  const SpMat incidence = incidence_matrix(g);
  const Mat laplacian = Mat(incidence * SpMat(incidence.transpose()));
  const double max_degree = laplacian.diagonal().maxCoeff();
  return Mat::Identity(g.node_count(), g.node_count()) - laplacian / (2.0 + 2.0 * max_degree);
}

double second_eigenvalue_modulus(const Mat& mixing) {
  const Index n = mixing.rows();
  if (n <= 1) return 0.0;
  const Mat centered = mixing - Mat::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::SelfAdjointEigenSolver<Mat> solver(centered, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Stacked distributed_projected_subgradient_step(const ProblemInstance& p, const Mat& mixing,
                                               const Stacked& x, double alpha) {
  const Stacked target = x * mixing.transpose() - alpha * p.subgradient(x);
  if (p.map().domain == Domain::FreeSpace) return target;
  Stacked next(target.rows(), target.cols());
  for (Index i = 0; i < target.cols(); ++i) next.col(i) = simplex_projection(target.col(i));
  return next;
}

Stacked distributed_mirror_descent_step(const ProblemInstance& p, const Mat& mixing,
                                        const Stacked& x, double alpha) {
  const Stacked g = p.subgradient(x);
  const Stacked mixed = x * mixing.transpose();
  Stacked next(x.rows(), x.cols());
  for (Index i = 0; i < x.cols(); ++i)
    next.col(i) = mirror_step(p.map(), mixed.col(i), alpha * g.col(i));
  return next;
}

DualAveragingState distributed_dual_averaging_step(const ProblemInstance& p, const Mat& mixing,
                                                   const DualAveragingState& state,
                                                   double alpha) {
  DualAveragingState next;
  next.z = state.z * mixing.transpose() + p.subgradient(state.x);
  next.x = Stacked(state.x.rows(), state.x.cols());
  // argmin <z, y> + psi0(y)/alpha = argmin psi0(y) - <-alpha z, y>.
  for (Index i = 0; i < state.x.cols(); ++i)
    next.x.col(i) = dual_to_primal(p.map(), Vec(-alpha * next.z.col(i)));
  return next;
}

}  // namespace msdnet
