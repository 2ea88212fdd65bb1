#include "msdnet/verify.hpp"

#include "msdnet/oracles.hpp"
#include "msdnet/problem.hpp"
#include "msdnet/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace msdnet {

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Vec simplex_point(Index n) {
    std::exponential_distribution<double> exponential(1.0);
    Vec y(n);
    for (Index i = 0; i < n; ++i) y[i] = exponential(rng_);
    return y / y.sum();
  }
  Vec gaussian(Index n, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Vec y(n);
    for (Index i = 0; i < n; ++i) y[i] = normal(rng_);
    return y;
  }
  Mat gaussian(Index rows, Index cols) {
    std::normal_distribution<double> normal;
    Mat m(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng_);
    return m;
  }
  Vec positive(Index n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec y(n);
    for (Index i = 0; i < n; ++i) y[i] = u(rng_);
    return y;
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }
  std::uint64_t raw() { return rng_(); }

  Vec point(const MirrorMap& map) {
    return map.domain == Domain::Simplex ? simplex_point(map.dim) : gaussian(map.dim);
  }

 private:
  std::mt19937_64 rng_;
};

struct Tally {
  PropertyResult result;

  explicit Tally(std::string name) { result.name = std::move(name); }

  // violation > tolerance counts as a failure
  void observe(double violation, double tolerance) {
    ++result.samples;
    if (!std::isfinite(violation)) violation = std::numeric_limits<double>::infinity();
    result.worst = std::max(result.worst, violation);
    if (violation > tolerance) failures_++;
  }
  PropertyResult finish(double tolerance) {
    result.passed = failures_ == 0 && result.samples > 0;
    std::ostringstream detail;
    detail << std::setprecision(3) << "worst " << result.worst << " vs tol " << tolerance;
    if (failures_) detail << ", " << failures_ << " failing samples";
    result.detail = detail.str();
    return result;
  }

 private:
  long failures_ = 0;
};

const MirrorMap kMaps[] = {MirrorMap::euclidean(4), MirrorMap::euclidean(4, Domain::Simplex),
                           MirrorMap::entropy(4)};

struct RandomNetwork {
  Graph graph;
  Vec spring;
  Vec damper;
};

RandomNetwork random_network(Sampler& s) {
  const Index nodes = s.integer(2, 9);
  Graph g = random_connected_graph(nodes, 0.5, s.raw()).graph;
  const Index m = g.edge_count();
  return {std::move(g), s.positive(m, 0.1, 3.0), s.positive(m, 0.1, 3.0)};
}

PropertyResult three_point(const VerifyOptions& o, const Divergence& div) {
  Sampler s(o.seed + 1);
  Tally t("three-point identity");
  const double tol = 1e-10;
  for (long i = 0; i < o.samples; ++i) {
    const MirrorMap& map = kMaps[i % 3];
    const Vec xp = s.point(map), xplus = s.point(map), x = s.point(map);
    const double lhs = div(map, xp, x) - div(map, xp, xplus) - div(map, xplus, x);
    const double rhs =
        (potential_gradient(map, xplus) - potential_gradient(map, x)).dot(xp - xplus);
    t.observe(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)), tol);
  }
  return t.finish(tol);
}

PropertyResult strong_convexity(const VerifyOptions& o, const Divergence& div) {
  Sampler s(o.seed + 2);
  Tally t("strong convexity B(x',x) >= 1/2 ||x'-x||^2");
  const double tol = 1e-12;
  for (long i = 0; i < 10 * o.samples; ++i) {
    const MirrorMap& map = kMaps[i % 3];
    const Vec xp = s.point(map), x = s.point(map);
    t.observe(0.5 * (xp - x).squaredNorm() - div(map, xp, x), tol);
  }
  return t.finish(tol);
}

NodeCost random_cost(Sampler& s, Index n) {
  if (s.integer(0, 1) == 0) return NodeCost::linear(s.gaussian(n));
  return NodeCost::quadratic(s.uniform(0.2, 3.0), s.simplex_point(n));
}

PropertyResult proximal_inequality(const VerifyOptions& o, const Divergence& div) {
  Sampler s(o.seed + 3);
  Tally t("bregman proximal inequality");
  const double tol = 1e-9;
  for (long i = 0; i < o.samples; ++i) {
    const MirrorMap& map = kMaps[i % 3];
    const Vec x = s.point(map), c = s.gaussian(map.dim, 0.5), xp = s.point(map);
    const NodeCost cost = random_cost(s, map.dim);
    const double alpha = s.uniform(0.05, 2.0);
    const Vec xplus = bregman_prox(map, x, c, cost, alpha);
    auto phi = [&](const Vec& y) { return alpha * cost.value(y) + c.dot(y); };
    const double lhs = div(map, xp, xplus) - div(map, xp, x);
    const double rhs = -0.5 * (xplus - x).squaredNorm() + phi(xp) - phi(xplus);
    t.observe(lhs - rhs, tol);
  }
  return t.finish(tol);
}

PropertyResult mirror_step_optimality(const VerifyOptions& o) {
  Sampler s(o.seed + 4);
  Tally t("mirror step first-order optimality");
  const double tol = 1e-9;
  for (long i = 0; i < o.samples; ++i) {
    const MirrorMap& map = kMaps[1 + i % 2];
    const Vec x = s.point(map), c = s.gaussian(map.dim);
    const Vec xplus = mirror_step(map, x, c);
    if (map.geometry == Geometry::NegativeEntropy && xplus.minCoeff() <= 0.0) {
      t.observe(std::numeric_limits<double>::infinity(), tol);
      continue;
    }
    const Vec g = c + potential_gradient(map, xplus) - potential_gradient(map, x);
    double worst = 0.0;
    for (Index v = 0; v < map.dim; ++v)
      worst = std::max(worst, -g.dot(Vec::Unit(map.dim, v) - xplus));
    t.observe(worst, tol);
  }
  return t.finish(tol);
}

PropertyResult adjointness(const VerifyOptions& o) {
  Sampler s(o.seed + 5);
  Tally t("incidence adjointness <E_s u, x> = <u, E_s^T x>");
  const double tol = 1e-12;
  for (long i = 0; i < o.samples; ++i) {
    const RandomNetwork net = random_network(s);
    const BlockOperator es = scaled_incidence(net.graph, net.spring);
    const Index n = s.integer(1, 4);
    const Mat u = s.gaussian(n, net.graph.edge_count());
    const Mat x = s.gaussian(n, net.graph.node_count());
    const double a = inner(es.apply(u), x);
    const double b = inner(u, es.apply_adjoint(x));
    t.observe(std::abs(a - b) / std::max(1.0, std::abs(a)), tol);
  }
  return t.finish(tol);
}

PropertyResult laplacian_identities(const VerifyOptions& o) {
  Sampler s(o.seed + 6);
  Tally t("laplacian quadratic form and L_s = E_s E_s^T");
  const double tol = 1e-12;
  for (long i = 0; i < o.samples; ++i) {
    const RandomNetwork net = random_network(s);
    const Index n = s.integer(1, 4);
    const Mat x = s.gaussian(n, net.graph.node_count());
    const BlockOperator ld = weighted_laplacian(net.graph, net.damper);
    const double form = inner(ld.apply(x), x);
    const double edgewise = oracle::edgewise_quadratic_form(net.graph, net.damper, x);
    t.observe(std::abs(form - edgewise) / std::max(1.0, edgewise), tol);

    const BlockOperator es = scaled_incidence(net.graph, net.spring);
    const Mat ls = weighted_laplacian(net.graph, net.spring).apply(x);
    const Mat composed = es.apply(es.apply_adjoint(x));
    t.observe((ls - composed).norm() / std::max(1.0, ls.norm()), tol);
  }
  return t.finish(tol);
}

PropertyResult eigen_bound(const VerifyOptions& o) {
  Sampler s(o.seed + 7);
  Tally t("eigenvalue bound <L_d z, z> <= lambda ||z||^2");
  const double tol = 1e-12;
  RandomNetwork net = random_network(s);
  BlockOperator ld = weighted_laplacian(net.graph, net.damper);
  double lambda = largest_eigenvalue(ld) * kEigenvalueSafetyFactor;
  for (long i = 0; i < o.samples; ++i) {
    if (i % 100 == 0) {
      net = random_network(s);
      ld = weighted_laplacian(net.graph, net.damper);
      lambda = largest_eigenvalue(ld) * kEigenvalueSafetyFactor;
    }
    const Mat z = s.gaussian(3, net.graph.node_count());
    const double sq = z.squaredNorm();
    t.observe((inner(ld.apply(z), z) - lambda * sq) / sq, tol);
  }
  return t.finish(tol);
}

PropertyResult consensus_and_orientation(const VerifyOptions& o) {
  Sampler s(o.seed + 8);
  Tally t("consensus null space and orientation invariance");
  const double tol = 1e-12;
  for (long i = 0; i < o.samples; ++i) {
    const RandomNetwork net = random_network(s);
    const Index n = s.integer(1, 4);
    const BlockOperator es = scaled_incidence(net.graph, net.spring);
    const Mat consensus = s.gaussian(n).replicate(1, net.graph.node_count());
    t.observe(es.apply_adjoint(consensus).norm() / std::max(1.0, consensus.norm()), tol);

    const Index e = s.integer(0, net.graph.edge_count() - 1);
    const Graph flipped = net.graph.with_flipped_edge(e);
    const Mat x = s.gaussian(n, net.graph.node_count());
    const Mat l0 = weighted_laplacian(net.graph, net.damper).apply(x);
    const Mat l1 = weighted_laplacian(flipped, net.damper).apply(x);
    t.observe((l0 - l1).norm() / std::max(1.0, l0.norm()), tol);
    Mat y0 = es.apply_adjoint(x);
    const Mat y1 = scaled_incidence(flipped, net.spring).apply_adjoint(x);
    y0.col(e) *= -1.0;
    t.observe((y0 - y1).norm() / std::max(1.0, y0.norm()), tol);
  }
  return t.finish(tol);
}

PropertyResult single_node_reduction(const VerifyOptions& o) {
  Sampler s(o.seed + 9);
  Tally t("single-node explicit method equals centralized mirror descent");
  const double tol = 1e-12;
  for (int trial = 0; trial < 5; ++trial) {
    const Index n = s.integer(2, 8);
    const Vec a = s.positive(n, 0.0, 1.0);
    ProblemInstance p(Graph(1, {}), EdgeWeights{Vec(0), Vec(0)}, {NodeCost::linear(a)},
                      MirrorMap::entropy(n));
    const Vec x1 = s.simplex_point(n);
    std::vector<double> steps;
    for (long k = 1; k <= 500; ++k) steps.push_back(0.5 / std::sqrt(static_cast<double>(k)));
    const auto reference = oracle::centralized_entropic_descent(a, x1, steps);
    SolverState state = make_state(p, x1);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      state = msd_explicit_step(p, state, steps[k]);
      t.observe((state.x.col(0) - reference[k + 1]).cwiseAbs().maxCoeff(), tol);
    }
  }
  return t.finish(tol);
}

PropertyResult mirror_step_oracle(const VerifyOptions& o) {
  Sampler s(o.seed + 10);
  Tally t("entropy mirror step and prox vs brute-force minimization");
  const double tol = 1e-6;
  const long instances = std::max(1L, o.samples / 10);
  for (long i = 0; i < instances; ++i) {
    const Index n = 2 + (i % 2);
    const MirrorMap map = MirrorMap::entropy(n);
    const Vec x = s.simplex_point(n), c = s.gaussian(n);
    const Vec ours = mirror_step(map, x, c);
    const Vec brute = oracle::minimize_on_simplex(
        [&](const Vec& y) { return c.dot(y) + oracle::kl_divergence(y, x); }, n);
    t.observe((ours - brute).cwiseAbs().maxCoeff(), tol);

    const double mu = s.uniform(0.2, 3.0), alpha = s.uniform(0.1, 2.0);
    const Vec b = s.simplex_point(n);
    const Vec prox = bregman_prox(map, x, c, NodeCost::quadratic(mu, b), alpha);
    const Vec brute_prox = oracle::minimize_on_simplex(
        [&](const Vec& y) {
          return alpha * 0.5 * mu * (y - b).squaredNorm() + c.dot(y) + oracle::kl_divergence(y, x);
        },
        n);
    t.observe((prox - brute_prox).cwiseAbs().maxCoeff(), tol);
  }
  return t.finish(tol);
}

PropertyResult projection_oracle(const VerifyOptions& o) {
  Sampler s(o.seed + 11);
  Tally t("simplex projection vs support enumeration");
  const double tol = 1e-12;
  for (long i = 0; i < o.samples; ++i) {
    const Vec v = s.gaussian(5, 1.0);
    const Vec ours = simplex_projection(v);
    const Vec brute = oracle::simplex_projection_by_enumeration(v);
    t.observe(std::max((ours - brute).cwiseAbs().maxCoeff(), std::abs(ours.sum() - 1.0)), tol);
  }
  return t.finish(tol);
}

PropertyResult certificates(const VerifyOptions& o) {
  Sampler s(o.seed + 12);
  Tally t("certificate KKT residual and consensus");
  const double tol = 1e-8;
  for (long i = 0; i < std::max(1L, o.samples / 20); ++i) {
    const RandomNetwork net = random_network(s);
    const Index n = s.integer(2, 6);
    std::vector<NodeCost> costs;
    for (Index v = 0; v < net.graph.node_count(); ++v) costs.push_back(random_cost(s, n));
    const ProblemInstance p(net.graph, EdgeWeights{net.spring, net.damper}, std::move(costs),
                            i % 2 ? MirrorMap::entropy(n) : MirrorMap::euclidean(n, Domain::Simplex));
    const Certificate cert = dual_certificate(p, centralized_optimum(p).x_star);
    t.observe(cert.residual, tol);
    t.observe(p.incidence().apply_adjoint(cert.x_star).norm(), 1e-12);
  }
  return t.finish(tol);
}

template <typename F>
PropertyResult guarded(const std::string& name, F&& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    PropertyResult r;
    r.name = name;
    r.passed = false;
    r.detail = std::string("threw: ") + e.what();
    return r;
  }
}

}  // namespace

std::vector<PropertyResult> run_invariant_suite(const VerifyOptions& options) {
  const Divergence div = options.divergence
                             ? options.divergence
                             : Divergence([](const MirrorMap& m, const Vec& a, const Vec& b) {
                                 return bregman(m, a, b);
                               });
  return {
      guarded("three-point identity", [&] { return three_point(options, div); }),
      guarded("strong convexity", [&] { return strong_convexity(options, div); }),
      guarded("bregman proximal inequality", [&] { return proximal_inequality(options, div); }),
      guarded("mirror step optimality", [&] { return mirror_step_optimality(options); }),
      guarded("incidence adjointness", [&] { return adjointness(options); }),
      guarded("laplacian identities", [&] { return laplacian_identities(options); }),
      guarded("eigenvalue bound", [&] { return eigen_bound(options); }),
      guarded("consensus and orientation", [&] { return consensus_and_orientation(options); }),
      guarded("single-node reduction", [&] { return single_node_reduction(options); }),
      guarded("oracle equivalence", [&] { return mirror_step_oracle(options); }),
      guarded("simplex projection", [&] { return projection_oracle(options); }),
      guarded("certificates", [&] { return certificates(options); }),
  };
}

void print_report(std::ostream& out, const std::vector<PropertyResult>& results) {
  for (const PropertyResult& r : results)
    out << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.samples << " samples; "
        << r.detail << ")\n";
}

bool all_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

}  // namespace msdnet
