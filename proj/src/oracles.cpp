#include "msdnet/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace msdnet::oracle {

namespace {

// Golden-section search for the minimum of a unimodal function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 120 && b - a > 1e-13; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Vec minimize_on_simplex(const std::function<double(const Vec&)>& objective, Index n) {
  if (n == 2) {
    auto along = [&](double t) { return objective(Vec((Vec(2) << t, 1.0 - t).finished())); };
    const double t = golden_section(along, 0.0, 1.0);
    return (Vec(2) << t, 1.0 - t).finished();
  }
  if (n != 3) throw DomainError("minimize_on_simplex supports n = 2 or 3");
  auto point = [](double t, double s) {
    return Vec((Vec(3) << t, (1.0 - t) * s, (1.0 - t) * (1.0 - s)).finished());
  };
  auto best_s = [&](double t) {
    return golden_section([&](double s) { return objective(point(t, s)); }, 0.0, 1.0);
  };
  const double t = golden_section([&](double t) { return objective(point(t, best_s(t))); }, 0.0, 1.0);
  return point(t, best_s(t));
}

Vec simplex_projection_by_enumeration(const Vec& v) {
  const Index n = v.size();
  Vec best;
  double best_distance = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    // On support S the projection is v_i - t with t fixed by sum = 1.
    double sum = 0.0;
    double count = 0.0;
    for (Index i = 0; i < n; ++i)
      if (mask & (1UL << i)) {
        sum += v[i];
        count += 1.0;
      }
    const double t = (sum - 1.0) / count;
    Vec y = Vec::Zero(n);
    bool feasible = true;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1UL << i)) {
        y[i] = v[i] - t;
        if (y[i] < 0.0) feasible = false;
      } else if (v[i] - t > 0.0) {
        feasible = false;  // multiplier for y_i >= 0 would be negative
      }
    }
    if (!feasible) continue;
    const double distance = (y - v).squaredNorm();
    if (distance < best_distance) {
      best_distance = distance;
      best = y;
    }
  }
  return best;
}

double dense_largest_eigenvalue(const SpMat& m) {
  const Eigen::SelfAdjointEigenSolver<Mat> solver{Mat(m), Eigen::EigenvaluesOnly};
  return solver.eigenvalues().maxCoeff();
}

bool connected_by_union_find(Index node_count, const std::vector<Edge>& edges) {
  std::vector<Index> parent(static_cast<std::size_t>(node_count));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  Index components = node_count;
  for (const Edge& e : edges) {
    const Index a = find(e.head);
    const Index b = find(e.tail);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

double edgewise_quadratic_form(const Graph& g, const Vec& w, const Mat& x) {
  double total = 0.0;
  for (Index e = 0; e < g.edge_count(); ++e)
    total += w[e] * (x.col(g.edges()[e].head) - x.col(g.edges()[e].tail)).squaredNorm();
  return total;
}

double kl_divergence(const Vec& x_prime, const Vec& x) {
  double total = 0.0;
  for (Index i = 0; i < x.size(); ++i)
    if (x_prime[i] > 0.0) total += x_prime[i] * std::log(x_prime[i] / x[i]);
  return total;
}

double entropy_bregman_by_definition(const Vec& x_prime, const Vec& x) {
  auto psi = [](const Vec& y) {
    double s = 0.0;
    for (Index i = 0; i < y.size(); ++i)
      if (y[i] > 0.0) s += y[i] * std::log(y[i]);
    return s;
  };
  double linear = 0.0;
  for (Index i = 0; i < x.size(); ++i) linear += (std::log(x[i]) + 1.0) * (x_prime[i] - x[i]);
  return psi(x_prime) - psi(x) - linear;
}

Index best_vertex(const Vec& total_cost) {
  Index best = 0;
  for (Index i = 1; i < total_cost.size(); ++i)
    if (total_cost[i] < total_cost[best]) best = i;
  return best;
}

std::vector<Vec> centralized_entropic_descent(const Vec& a, const Vec& x1,
                                              const std::vector<double>& steps) {
  std::vector<Vec> iterates{x1};
  Vec x = x1;
  for (double alpha : steps) {
    Vec logits(x.size());
    for (Index i = 0; i < x.size(); ++i) logits[i] = std::log(x[i]) - alpha * a[i];
    const double shift = logits.maxCoeff();
    double z = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      x[i] = std::exp(logits[i] - shift);
      z += x[i];
    }
    x /= z;
    iterates.push_back(x);
  }
  return iterates;
}

}  // namespace msdnet::oracle
