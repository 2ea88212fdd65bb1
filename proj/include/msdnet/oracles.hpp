#pragma once

// Reference computations that share no code path with the library routines
// they are used to check: brute-force search, enumeration, dense
// factorizations and direct formula evaluation.

#include "msdnet/common.hpp"
#include "msdnet/graph.hpp"

#include <functional>
#include <vector>

namespace msdnet::oracle {

/// Minimizer of a convex F over the 2- or 3-point probability simplex by
/// nested golden-section search (the 3-point case minimizes over y[0] the
/// partial minimum along each slice y[0] = t). Accurate to about 1e-10 in y.
Vec minimize_on_simplex(const std::function<double(const Vec&)>& objective, Index n);

/// Euclidean projection onto the simplex by enumerating every support set and
/// keeping the KKT-feasible candidate. Exponential in n; meant for n <= 12.
Vec simplex_projection_by_enumeration(const Vec& v);

/// Largest eigenvalue from a dense symmetric eigendecomposition.
double dense_largest_eigenvalue(const SpMat& m);

/// Connectivity by union-find.
bool connected_by_union_find(Index node_count, const std::vector<Edge>& edges);

/// sum_e w_e ||x_head - x_tail||^2.
double edgewise_quadratic_form(const Graph& g, const Vec& w, const Mat& x);

/// sum_i x'[i] ln(x'[i] / x[i]) for points on the simplex.
double kl_divergence(const Vec& x_prime, const Vec& x);

/// psi(x') - psi(x) - <grad psi(x), x' - x> with psi(y) = sum y ln y, written
/// out term by term.
double entropy_bregman_by_definition(const Vec& x_prime, const Vec& x);

/// Index of the smallest entry (lowest index on ties) by linear scan, i.e. the
/// best vertex of the simplex for a linear objective.
Index best_vertex(const Vec& total_cost);

/// x_{k+1}[i] proportional to x_k[i] exp(-alpha_k a[i]), written without the
/// library. Returns every iterate x_1 .. x_{K+1}.
std::vector<Vec> centralized_entropic_descent(const Vec& a, const Vec& x1,
                                              const std::vector<double>& steps);

}  // namespace msdnet::oracle
