// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. argv[1] is the msdnet executable (used by criterion 9).

#include "msdnet/geometry.hpp"
#include "msdnet/harness.hpp"
#include "msdnet/oracles.hpp"
#include "msdnet/problem.hpp"
#include "msdnet/solvers.hpp"
#include "msdnet/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace msdnet;

namespace {

constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

const AlgorithmRun& find(const ExperimentResult& r, Algorithm a) {
  for (const AlgorithmRun& run : r.runs)
    if (run.algorithm == a) return run;
  throw std::runtime_error("missing run " + algorithm_name(a));
}

Stacked zero_springs(const ProblemInstance& p) { return Stacked::Zero(p.dim(), p.edge_count()); }

Outcome explicit_bound() {
  double worst = -std::numeric_limits<double>::infinity();
  double slowest = 0.0;
  for (std::uint64_t seed : kSeeds) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig c = reference_preset(seed);
    c.algorithms = {Algorithm::MsdExplicit};
    const ProblemInstance p = build_instance(c);
    const Stacked x1 = initial_point(p, c.init, c.seed);
    const AlgorithmRun ex = find(run(c, p, x1), Algorithm::MsdExplicit);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (ex.failed || !ex.caps_respected || ex.records.size() != 1000)
      return {false, "seed " + std::to_string(seed) + ": run failed or left the step cap"};

    // rhs rebuilt from the recorded steps
    const Certificate cert = dual_certificate(p, centralized_optimum(p).x_star);
    const double v1 = lyapunov(p, cert, x1, zero_springs(p));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const RunRecord& r : ex.records) {
      const double alpha = 1.0 / (2.0 * p.lambda() * std::sqrt(static_cast<double>(r.k)));
      if (std::abs(r.alpha - alpha) > 1e-15 * alpha)
        return {false, "seed " + std::to_string(seed) + ": unexpected step at k=" + std::to_string(r.k)};
      sum += alpha;
      sum_sq += alpha * alpha;
      const double rhs = (v1 + cert.G * cert.G * sum_sq) / sum;
      worst = std::max(worst, r.gap + r.disagreement - rhs);
    }
  }
  return {worst <= kBoundSlack, "5 seeds x K=1..1000; max lhs-rhs " + fmt(worst) + ", slowest seed " +
                                    fmt(slowest) + " s"};
}

Outcome implicit_bound() {
  double worst = -std::numeric_limits<double>::infinity();
  double worst_rate = -std::numeric_limits<double>::infinity();
  double slowest = 0.0;
  for (std::uint64_t seed : kSeeds) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig c = reference_preset(seed);
    c.algorithms = {Algorithm::MsdImplicit};
    c.implicit_schedule = StepSchedule::constant();
    const ProblemInstance p = build_instance(c);
    const Stacked x1 = initial_point(p, c.init, c.seed);
    const AlgorithmRun im = find(run(c, p, x1), Algorithm::MsdImplicit);
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (im.failed || !im.caps_respected || im.records.size() != 1000)
      return {false, "seed " + std::to_string(seed) + ": run failed or left the step cap"};

    const double alpha = 1.0 / (2.0 * p.lambda());
    const Certificate cert = dual_certificate(p, centralized_optimum(p).x_star);
    const double v1 = lyapunov(p, cert, x1, zero_springs(p));
    for (const RunRecord& r : im.records) {
      if (std::abs(r.alpha - alpha) > 1e-15 * alpha)
        return {false, "seed " + std::to_string(seed) + ": unexpected step"};
      const double K = static_cast<double>(r.k);
      worst = std::max(worst, r.gap + r.disagreement - v1 / (alpha * K));
      worst_rate = std::max(worst_rate, K * r.gap - v1 / alpha);
    }
  }
  return {worst <= kBoundSlack && worst_rate <= kBoundSlack,
          "5 seeds x K=1..1000; max lhs-rhs " + fmt(worst) + ", max K*gap - V1/alpha " +
              fmt(worst_rate) + ", slowest seed " + fmt(slowest) + " s"};
}

Outcome continuous_bound() {
  ExperimentConfig c = reference_preset(11);
  c.nodes = 5;
  c.edge_probability = 0.5;
  c.dim = 4;
  c.cost_kind = CostKind::Quadratic;
  c.mu = 1.0;
  const ProblemInstance p = build_instance(c);
  const Certificate cert = dual_certificate(p, centralized_optimum(p).x_star);
  const Stacked x0 = initial_point(p, InitKind::Dirichlet, 11);

  auto simulate = [&](double h) {
    ContinuousOptions o;
    o.step = h;
    o.checkpoints = {1.0, 10.0, 100.0};
    return simulate_continuous(p, cert, x0, zero_springs(p), o);
  };
  const ContinuousResult coarse = simulate(0.02);
  const ContinuousResult fine = simulate(0.01);
  std::string detail;
  bool ok = true;
  for (std::size_t i = 0; i < fine.checkpoints.size(); ++i) {
    const ContinuousCheckpoint& cp = fine.checkpoints[i];
    // step-halving estimate of the error in the fine run
    const double error = std::abs(coarse.checkpoints[i].gap - cp.gap);
    const double margin = cp.bound - cp.gap;
    ok = ok && margin > 10.0 * error;
    if (!detail.empty()) detail += ", ";
    detail += "T=" + fmt(cp.horizon) + " margin " + fmt(margin) + " err " + fmt(error);
  }
  return {ok, detail};
}

struct Decomposition {
  double explicit_worst = -std::numeric_limits<double>::infinity();
  double implicit_worst = -std::numeric_limits<double>::infinity();
};

Outcome strongly_convex_decompositions() {
  ExperimentConfig c = reference_preset(4);
  c.cost_kind = CostKind::Quadratic;
  c.mu = 1.0;
  const ProblemInstance p = build_instance(c);
  const Certificate cert = dual_certificate(p, centralized_optimum(p).x_star);
  const Stacked x1 = initial_point(p, c.init, c.seed);
  const double v1 = lyapunov(p, cert, x1, zero_springs(p));
  const long K = 500;

  auto node_error = [&](const Stacked& avg) {
    return 0.5 * c.mu * (avg - cert.x_star).squaredNorm();
  };
  auto edge_disagreement = [&](const Stacked& avg, double weight) {
    double total = 0.0;
    for (Index e = 0; e < p.edge_count(); ++e) {
      const Edge& edge = p.graph().edges()[e];
      total += weight * p.weights().damper[e] * (avg.col(edge.head) - avg.col(edge.tail)).squaredNorm();
    }
    return total;
  };

  Decomposition worst;
  SolverState ex = make_state(p, x1);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long k = 1; k <= K; ++k) {
    const double alpha = step_size(StepSchedule::diminishing(), k, p.lambda(), p.gamma_inverse());
    ex = msd_explicit_step(p, ex, alpha);
    sum += alpha;
    sum_sq += alpha * alpha;
    const Stacked avg = ex.average();
    const double lhs = node_error(avg) + edge_disagreement(avg, 0.5);
    worst.explicit_worst = std::max(worst.explicit_worst, lhs - theorem1_rhs(v1, cert.G, sum_sq, sum));
  }

  SolverState im = make_state(p, x1);
  const double alpha = step_size(StepSchedule::constant(), 1, p.lambda(), p.gamma_inverse());
  for (long k = 1; k <= K; ++k) {
    im = msd_implicit_step(p, im, alpha);
    const Stacked avg = im.average();
    const double lhs = node_error(avg) + edge_disagreement(avg, 0.25);
    worst.implicit_worst = std::max(worst.implicit_worst, lhs - theorem2_rhs(v1, alpha, k));
  }
  const bool ok = ex.caps_respected && im.caps_respected && worst.explicit_worst <= kBoundSlack &&
                  worst.implicit_worst <= kBoundSlack;
  return {ok, "K=1..500; explicit max lhs-rhs " + fmt(worst.explicit_worst) + ", implicit " +
                  fmt(worst.implicit_worst) + (cert.G_estimated ? " (G estimated)" : "")};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::exponential_distribution<double> exponential(1.0);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.1, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = trial % 2 == 0 ? 2 : 3;
    const MirrorMap map = MirrorMap::entropy(n);
    Vec x(n);
    Vec b(n);
    Vec c(n);
    for (Index i = 0; i < n; ++i) {
      x[i] = exponential(rng);
      b[i] = exponential(rng);
      c[i] = normal(rng);
    }
    x /= x.sum();
    b /= b.sum();
    const double alpha = unit(rng);
    const NodeCost cost = NodeCost::quadratic(unit(rng), b);

    const Vec step = mirror_step(map, x, c);
    const Vec step_oracle = oracle::minimize_on_simplex(
        [&](const Vec& y) { return c.dot(y) + oracle::kl_divergence(y, x); }, n);
    const Vec prox = bregman_prox(map, x, c, cost, alpha);
    const Vec prox_oracle = oracle::minimize_on_simplex(
        [&](const Vec& y) { return alpha * cost.value(y) + c.dot(y) + oracle::kl_divergence(y, x); }, n);
    worst = std::max({worst, (step - step_oracle).lpNorm<Eigen::Infinity>(),
                      (prox - prox_oracle).lpNorm<Eigen::Infinity>()});
  }
  return {worst <= 1e-6, "100 instances on 2 and 3 coordinates; max deviation " + fmt(worst)};
}

Outcome identity_suite() {
  VerifyOptions options;
  options.samples = 1000;
  const auto results = run_invariant_suite(options);
  const std::vector<std::string> required = {"three-point identity", "bregman proximal inequality",
                                             "incidence adjointness", "laplacian quadratic form",
                                             "eigenvalue bound"};
  std::size_t passed = 0;
  long fewest = std::numeric_limits<long>::max();
  std::string failures;
  for (const PropertyResult& r : results) {
    if (r.passed) ++passed;
    else failures += ", failed: " + r.name;
    for (const std::string& name : required)
      if (r.name.rfind(name, 0) == 0) fewest = std::min(fewest, static_cast<long>(r.samples));
  }
  return {all_passed(results) && fewest >= 1000,
          std::to_string(passed) + "/" + std::to_string(results.size()) +
              " properties, fewest samples on the core identities " + std::to_string(fewest) + failures};
}

Outcome single_node_reduction() {
  const Vec a = (Vec(5) << 0.42, 0.13, 0.77, 0.13, 0.5).finished();
  const Vec x1 = (Vec(5) << 0.1, 0.2, 0.3, 0.25, 0.15).finished();
  const ProblemInstance p(Graph(1, {}), {Vec(0), Vec(0)}, {NodeCost::linear(a)}, MirrorMap::entropy(5));
  std::vector<double> steps;
  for (long k = 1; k <= 500; ++k) steps.push_back(0.5 / std::sqrt(static_cast<double>(k)));
  const auto reference = oracle::centralized_entropic_descent(a, x1, steps);
  SolverState s = make_state(p, replicate(x1, 1));
  double worst = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    s = msd_explicit_step(p, s, steps[k]);
    worst = std::max(worst, (s.x.col(0) - reference[k + 1]).lpNorm<Eigen::Infinity>());
  }
  return {worst <= 1e-12, "500 iterations; max coordinate deviation " + fmt(worst)};
}

Outcome qualitative_comparison() {
  int implicit_better = 0;
  int same_order = 0;
  std::string detail;
  for (std::uint64_t seed : kSeeds) {
    ExperimentConfig c = reference_preset(seed);
    c.algorithms = {Algorithm::MsdExplicit, Algorithm::MsdImplicit, Algorithm::MirrorDescent,
                    Algorithm::DualAveraging};
    const ExperimentResult r = run(c);
    auto last = [&](Algorithm a) {
      const AlgorithmRun& run = find(r, a);
      if (run.failed || run.records.empty()) throw std::runtime_error(algorithm_name(a) + " failed");
      return std::abs(run.records.back().f_subopt);
    };
    const double ex = last(Algorithm::MsdExplicit);
    const double im = last(Algorithm::MsdImplicit);
    const double dmd = last(Algorithm::MirrorDescent);
    const double dda = last(Algorithm::DualAveraging);
    if (im < ex) ++implicit_better;
    const double ratio = std::max({ex, dmd, dda}) / std::min({ex, dmd, dda});
    if (ratio <= 10.0) ++same_order;
    detail += (detail.empty() ? " seed " : ", seed ") + std::to_string(seed) + " ratio " + fmt(ratio);
  }
  const int n = static_cast<int>(std::size(kSeeds));
  return {implicit_better == n && same_order == n,
          "(a) msd-im below msd-ex on " + std::to_string(implicit_better) + "/" + std::to_string(n) +
              " seeds; (b) msd-ex/dmd/dda within 10x on " + std::to_string(same_order) + "/" +
              std::to_string(n) + " seeds:" + detail};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const char* cli) {
  namespace fs = std::filesystem;
  if (cli == nullptr) return {false, "no executable given"};
  const fs::path root = fs::temp_directory_path() / "msdnet-acceptance";
  fs::remove_all(root);
  std::vector<fs::path> dirs = {root / "a", root / "b"};
  for (const fs::path& dir : dirs) {
    const std::string command = std::string("\"") + cli + "\" paper-experiment --seed 7 --out \"" +
                                dir.string() + "\" > /dev/null";
    if (std::system(command.c_str()) != 0) return {false, "paper-experiment exited nonzero"};
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path twin = dirs[1] / entry.path().filename();
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin))
      return {false, entry.path().filename().string() + " differs"};
    ++compared;
  }
  fs::remove_all(root);
  return {compared > 0, std::to_string(compared) + " csv files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"explicit method bound", explicit_bound},
      {"implicit method bound", implicit_bound},
      {"continuous-time bound", continuous_bound},
      {"strongly convex decompositions", strongly_convex_decompositions},
      {"oracle equivalence", oracle_equivalence},
      {"identity suite", identity_suite},
      {"single-node reduction", single_node_reduction},
      {"qualitative comparison", qualitative_comparison},
      {"determinism", [cli] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.passed) ++failures;
    std::cout << (o.passed ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << "  ("
              << o.detail << "; " << fmt(seconds) << " s)\n";
  }
  return failures;
}
