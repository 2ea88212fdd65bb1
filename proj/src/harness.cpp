#include "msdnet/harness.hpp"

#include "msdnet/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace msdnet {

namespace {

constexpr std::uint64_t kCostStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kInitStream = 0xbf58476d1ce4e5b9ULL;

const std::pair<Algorithm, const char*> kAlgorithmNames[] = {
    {Algorithm::MsdExplicit, "msd-ex"},         {Algorithm::MsdImplicit, "msd-im"},
    {Algorithm::ProjectedSubgradient, "dps"},   {Algorithm::DualAveraging, "dda"},
    {Algorithm::MirrorDescent, "dmd"},          {Algorithm::ContinuousReference, "ode"},
};

}  // namespace

std::string algorithm_name(Algorithm a) {
  for (const auto& [id, name] : kAlgorithmNames)
    if (id == a) return name;
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (const auto& [id, known] : kAlgorithmNames)
    if (name == known) return id;
  throw ConfigError("experiment.algorithms", "unknown algorithm '" + name +
                                                 "' (expected msd-ex, msd-im, dps, dda, dmd, ode)");
}

std::vector<Algorithm> all_algorithms() {
  std::vector<Algorithm> out;
  for (const auto& entry : kAlgorithmNames) out.push_back(entry.first);
  return out;
}

bool AlgorithmRun::bound_violated() const {
  return std::any_of(records.begin(), records.end(),
                     [](const RunRecord& r) { return r.bound_ok == 0; });
}

ExperimentConfig reference_preset(std::uint64_t seed) {
  ExperimentConfig config;
  config.seed = seed;
  return config;
}

ProblemInstance build_instance(const ExperimentConfig& config) {
  const MirrorMap map = config.mirror_map();
  map.validate();

  std::optional<Graph> graph;
  EdgeWeights weights;
  if (!config.edge_list.empty()) {
    WeightedGraph loaded = read_edge_list_file(config.edge_list);
    graph = std::move(loaded.graph);
    weights = std::move(loaded.weights);
  } else {
    if (config.nodes == 1) {
      graph = Graph(1, {});
    } else {
      graph = random_connected_graph(config.nodes, config.edge_probability, config.seed).graph;
    }
    weights.damper = Vec::Constant(graph->edge_count(), config.damper);
    weights.spring = config.spring_rule == SpringRule::LambdaTimesDamper
                         ? springs_proportional_to_lambda(*graph, weights.damper)
                         : Vec::Constant(graph->edge_count(), config.spring);
  }

  std::mt19937_64 rng(config.seed ^ kCostStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<NodeCost> costs;
  for (Index i = 0; i < graph->node_count(); ++i) {
    Vec v(config.dim);
    for (Index k = 0; k < config.dim; ++k) v[k] = unit(rng);
    costs.push_back(config.cost_kind == CostKind::LinearUniform
                        ? NodeCost::linear(std::move(v))
                        : NodeCost::quadratic(config.mu, std::move(v)));
  }
  return ProblemInstance(std::move(*graph), std::move(weights), std::move(costs), map);
}

double theorem1_rhs(double v1, double G, double sum_alpha_sq, double sum_alpha) {
  if (std::isinf(G)) return std::numeric_limits<double>::infinity();
  return (v1 + G * G * sum_alpha_sq) / sum_alpha;
}

double theorem1_rhs(const ProblemInstance& p, const Certificate& cert, const Stacked& x1,
                    const Stacked& u1, const StepSchedule& schedule, long K) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long k = 1; k <= K; ++k) {
    const double a = step_size(schedule, k, p.lambda(), p.gamma_inverse());
    sum += a;
    sum_sq += a * a;
  }
  return theorem1_rhs(lyapunov(p, cert, x1, u1), cert.G, sum_sq, sum);
}

double theorem2_rhs(double v1, double alpha, long K) {
  return v1 / (alpha * static_cast<double>(K));
}

double theorem2_rhs(const ProblemInstance& p, const Certificate& cert, const Stacked& x1,
                    const Stacked& u1, double alpha, long K) {
  return theorem2_rhs(lyapunov(p, cert, x1, u1), alpha, K);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
  const ExperimentConfig& config;
  const ProblemInstance& p;
  const Certificate& cert;
  const Stacked& x1;
  double l_star;
  double f_star;
};

class Recorder {
 public:
  Recorder(const Context& ctx, AlgorithmRun& run)
      : ctx_(ctx), run_(run), start_(Clock::now()) {}

  RunRecord make(long k, double alpha, const Stacked& average, double disagreement_weight) {
    RunRecord r;
    r.k = k;
    r.alpha = alpha;
    r.gap = lagrangian(ctx_.p, ctx_.cert, average) - ctx_.l_star;
    r.disagreement = disagreement_weight * 2.0 * disagreement(ctx_.p, average);
    r.f_subopt = ctx_.p.objective(average) - ctx_.f_star;
    r.max_edge_disagreement = max_edge_disagreement(ctx_.p, average);
    r.rhs = std::numeric_limits<double>::quiet_NaN();
    if (ctx_.config.timing)
      r.ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return r;
  }

  void push(RunRecord r, bool check) {
    if (check) r.bound_ok = (r.gap + r.disagreement <= r.rhs + kBoundSlack) ? 1 : 0;
    run_.records.push_back(r);
  }

 private:
  const Context& ctx_;
  AlgorithmRun& run_;
  Clock::time_point start_;
};

void run_explicit(const Context& ctx, AlgorithmRun& run) {
  Recorder rec(ctx, run);
  const ProblemInstance& p = ctx.p;
  const double v1 = lyapunov(p, ctx.cert, ctx.x1, Stacked::Zero(p.dim(), p.edge_count()));
  SolverState state = make_state(p, ctx.x1);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long k = 1; k <= ctx.config.iterations; ++k) {
    const double alpha = step_size(ctx.config.explicit_schedule, k, p.lambda(), p.gamma_inverse());
    state = msd_explicit_step(p, state, alpha);
    sum += alpha;
    sum_sq += alpha * alpha;
    RunRecord r = rec.make(k, alpha, state.average(), 0.5);
    r.rhs = theorem1_rhs(v1, ctx.cert.G, sum_sq, sum);
    run.caps_respected = state.caps_respected && !state.underflow;
    rec.push(r, run.caps_respected);
  }
}

void run_implicit(const Context& ctx, AlgorithmRun& run) {
  Recorder rec(ctx, run);
  const ProblemInstance& p = ctx.p;
  const double v1 = lyapunov(p, ctx.cert, ctx.x1, Stacked::Zero(p.dim(), p.edge_count()));
  SolverState state = make_state(p, ctx.x1);
  for (long k = 1; k <= ctx.config.iterations; ++k) {
    const double alpha = step_size(ctx.config.implicit_schedule, k, p.lambda(), p.gamma_inverse());
    state = msd_implicit_step(p, state, alpha);
    RunRecord r = rec.make(k, alpha, state.average(), 0.25);
    // The implicit bound is stated for a constant step.
    const bool constant = ctx.config.implicit_schedule.kind == StepSchedule::Kind::Constant;
    r.rhs = theorem2_rhs(v1, alpha, k);
    run.caps_respected = state.caps_respected && constant && !state.underflow;
    rec.push(r, run.caps_respected);
  }
}

void run_baseline(const Context& ctx, AlgorithmRun& run) {
  Recorder rec(ctx, run);
  const ProblemInstance& p = ctx.p;
  const Mat mixing = mixing_matrix(p.graph());
  Stacked x = ctx.x1;
  DualAveragingState dda{Stacked::Zero(p.dim(), p.node_count()), ctx.x1};
  Stacked avg_num = Stacked::Zero(p.dim(), p.node_count());
  double avg_den = 0.0;
  for (long k = 1; k <= ctx.config.iterations; ++k) {
    const double alpha = step_size(ctx.config.baseline_schedule, k, p.lambda(), p.gamma_inverse());
    const Stacked& current = run.algorithm == Algorithm::DualAveraging ? dda.x : x;
    avg_num += alpha * current;
    avg_den += alpha;
    switch (run.algorithm) {
      case Algorithm::ProjectedSubgradient:
        x = distributed_projected_subgradient_step(p, mixing, x, alpha);
        break;
      case Algorithm::MirrorDescent:
        x = distributed_mirror_descent_step(p, mixing, x, alpha);
        break;
      case Algorithm::DualAveraging:
        dda = distributed_dual_averaging_step(p, mixing, dda, alpha);
        break;
      default:
        throw Error("not a baseline");
    }
    rec.push(rec.make(k, alpha, avg_num / avg_den, 0.5), false);
  }
  run.caps_respected = false;
}

void run_continuous(const Context& ctx, AlgorithmRun& run) {
  Recorder rec(ctx, run);
  const ProblemInstance& p = ctx.p;
  if (ctx.config.iterations == 0) return;
  const double interval =
      ctx.config.ode_interval.value_or(step_size(StepSchedule::constant(), 1, p.lambda(),
                                                 p.gamma_inverse()));
  ContinuousOptions options;
  options.step = interval / std::max(ctx.config.ode_substeps, 1);
  for (long k = 1; k <= ctx.config.iterations; ++k)
    options.checkpoints.push_back(interval * static_cast<double>(k));
  const ContinuousResult result =
      simulate_continuous(p, ctx.cert, ctx.x1, Stacked::Zero(p.dim(), p.edge_count()), options);
  for (std::size_t i = 0; i < result.checkpoints.size(); ++i) {
    const ContinuousCheckpoint& cp = result.checkpoints[i];
    RunRecord r = rec.make(static_cast<long>(i) + 1, interval, cp.x_average, 0.5);
    r.rhs = cp.bound;
    rec.push(r, true);
  }
}

void run_one(const Context& ctx, AlgorithmRun& run) {
  try {
    switch (run.algorithm) {
      case Algorithm::MsdExplicit:
        run_explicit(ctx, run);
        break;
      case Algorithm::MsdImplicit:
        run_implicit(ctx, run);
        break;
      case Algorithm::ContinuousReference:
        run_continuous(ctx, run);
        break;
      default:
        run_baseline(ctx, run);
        break;
    }
  } catch (const std::exception& e) {
    run.failed = true;
    run.error = e.what();
  }
}

unsigned worker_count(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MSDNET_THREADS")) {
    const long requested = std::strtol(env, nullptr, 10);
    if (requested >= 1) cap = static_cast<unsigned>(requested);
  }
  return static_cast<unsigned>(std::min<std::size_t>(cap, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

ExperimentResult run(const ExperimentConfig& config) {
  const ProblemInstance p = build_instance(config);
  const Stacked x1 = initial_point(p, config.init, config.seed ^ kInitStream);
  return run(config, p, x1);
}

ExperimentResult run(const ExperimentConfig& config, const ProblemInstance& p,
                     const Stacked& x1) {
  const Optimum optimum = centralized_optimum(p);
  const Certificate cert = dual_certificate(p, optimum.x_star);

  ExperimentResult result;
  result.instance = {p.node_count(),
                     p.edge_count(),
                     p.lambda(),
                     p.gamma_inverse(),
                     cert.G,
                     cert.G_estimated,
                     p.objective(cert.x_star),
                     cert.residual,
                     optimum.nonunique};
  const Context ctx{config, p, cert, x1, lagrangian(p, cert, cert.x_star),
                    result.instance.f_star};

  for (Algorithm a : config.algorithms) result.runs.push_back(AlgorithmRun{a, {}, false, {}, true});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.runs.size(); i = next++) run_one(ctx, result.runs[i]);
  };
  const unsigned workers = worker_count(result.runs.size());
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  return result;
}

namespace {

void write_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else if (std::isinf(v)) {
    out << (v > 0 ? "inf" : "-inf");
  } else {
    out << v;
  }
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kCsvHeader << '\n';
  out << std::setprecision(17);
  for (const RunRecord& r : records) {
    out << r.k << ',';
    for (double v : {r.alpha, r.gap, r.disagreement, r.f_subopt, r.rhs}) {
      write_number(out, v);
      out << ',';
    }
    out << r.bound_ok << ',';
    write_number(out, r.ms);
    out << '\n';
  }
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ConfigError("csv", "missing or unexpected header");
  std::vector<RunRecord> records;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw ConfigError("csv", "line " + std::to_string(line_no) + " has " +
                                   std::to_string(fields.size()) + " fields");
    try {
      RunRecord r;
      r.k = std::stol(fields[0]);
      r.alpha = std::stod(fields[1]);
      r.gap = std::stod(fields[2]);
      r.disagreement = std::stod(fields[3]);
      r.f_subopt = std::stod(fields[4]);
      r.rhs = std::stod(fields[5]);
      r.bound_ok = std::stoi(fields[6]);
      r.ms = std::stod(fields[7]);
      r.max_edge_disagreement = std::numeric_limits<double>::quiet_NaN();
      records.push_back(r);
    } catch (const std::logic_error&) {
      throw ConfigError("csv", "line " + std::to_string(line_no) + " has a malformed number");
    }
  }
  return records;
}

std::vector<RunRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open");
  return read_csv(in);
}

std::string plot_script(const std::vector<std::string>& csv_names) {
  std::ostringstream s;
  s << "#!/usr/bin/env python3\n"
       "\"\"\"Convergence comparison: |f(x_avg) - f(x*)| against iteration.\"\"\"\n"
       "import csv\n"
       "import os\n"
       "\n"
       "import matplotlib\n"
       "\n"
       "matplotlib.use(\"Agg\")\n"
       "import matplotlib.pyplot as plt\n"
       "\n"
       "HERE = os.path.dirname(os.path.abspath(__file__))\n"
       "RUNS = [";
  for (std::size_t i = 0; i < csv_names.size(); ++i) s << (i ? ", " : "") << '"' << csv_names[i] << '"';
  s << "]\n"
       "\n"
       "\n"
       "def load(name):\n"
       "    with open(os.path.join(HERE, name), newline=\"\") as fh:\n"
       "        rows = list(csv.DictReader(fh))\n"
       "    return [int(r[\"k\"]) for r in rows], [abs(float(r[\"f_subopt\"])) for r in rows]\n"
       "\n"
       "\n"
       "def main():\n"
       "    fig, ax = plt.subplots(figsize=(6, 4))\n"
       "    for name in RUNS:\n"
       "        k, err = load(name)\n"
       "        if k:\n"
       "            ax.plot(k, err, label=os.path.splitext(name)[0])\n"
       "    ax.set_yscale(\"log\")\n"
       "    ax.set_xlabel(\"iteration k\")\n"
       "    ax.set_ylabel(\"|f(x_avg) - f(x*)|\")\n"
       "    ax.legend()\n"
       "    fig.tight_layout()\n"
       "    fig.savefig(os.path.join(HERE, \"convergence.png\"), dpi=150)\n"
       "\n"
       "\n"
       "if __name__ == \"__main__\":\n"
       "    main()\n";
  return s.str();
}

std::vector<std::string> emit(const ExperimentResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create output directory: " + ec.message());

  std::vector<std::string> written;
  std::vector<std::string> names;
  for (const AlgorithmRun& run : result.runs) {
    const std::string name = algorithm_name(run.algorithm) + ".csv";
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    write_csv(out, run.records);
    if (!out) throw IoError(path, "write failed");
    written.push_back(path);
    names.push_back(name);
  }
  const std::string script = (fs::path(dir) / "plot.py").string();
  std::ofstream out(script, std::ios::binary);
  if (!out) throw IoError(script, "cannot open for writing");
  out << plot_script(names);
  if (!out) throw IoError(script, "write failed");
  written.push_back(script);
  return written;
}

}  // namespace msdnet
