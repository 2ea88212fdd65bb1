#pragma once

#include "msdnet/common.hpp"
#include "msdnet/problem.hpp"
#include "msdnet/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace msdnet {

enum class Algorithm {
  MsdExplicit,           // "msd-ex"
  MsdImplicit,           // "msd-im"
  ProjectedSubgradient,  // "dps"
  DualAveraging,         // "dda"
  MirrorDescent,         // "dmd"
  ContinuousReference,   // "ode"
};

std::string algorithm_name(Algorithm a);
/// Throws ConfigError for unknown names.
Algorithm parse_algorithm(const std::string& name);
std::vector<Algorithm> all_algorithms();

enum class CostKind { LinearUniform, Quadratic };
enum class SpringRule { LambdaTimesDamper, Fixed };

inline constexpr const char* kConfigSchema = "msdnet-config/1";

struct ExperimentConfig {
  std::string schema = kConfigSchema;
  std::uint64_t seed = 1;
  long iterations = 1000;
  std::vector<Algorithm> algorithms = all_algorithms();
  Geometry geometry = Geometry::NegativeEntropy;
  InitKind init = InitKind::Dirichlet;

  // graph
  Index nodes = 20;
  double edge_probability = 0.3;
  std::string edge_list;  ///< when set, graph and weights come from this file
  double damper = 0.07;
  SpringRule spring_rule = SpringRule::LambdaTimesDamper;
  double spring = 1.0;  ///< used with SpringRule::Fixed

  // costs
  CostKind cost_kind = CostKind::LinearUniform;
  Index dim = 10;
  double mu = 1.0;
  Domain domain = Domain::Simplex;

  // steps; unset bases resolve from lambda and gamma
  StepSchedule explicit_schedule = StepSchedule::diminishing();
  StepSchedule implicit_schedule = StepSchedule::constant();
  StepSchedule baseline_schedule = StepSchedule::diminishing();

  // continuous reference: one record every `ode_interval` time units (unset:
  // the implicit step), integrated with `ode_substeps` RK4 steps per record
  std::optional<double> ode_interval;
  int ode_substeps = 8;

  std::string output_dir = "msdnet-out";
  /// Wall-clock column; off by default so that output is reproducible.
  bool timing = false;

  MirrorMap mirror_map() const { return {geometry, domain, dim}; }
};

/// Numerical experiment defaults: |V| = 20, edge probability 0.3, n = 10
/// simplex, uniform [0, 1] linear costs, entropy geometry, d = 0.07, s = lambda d,
/// alpha^k = 1/(2 lambda sqrt k) for explicit methods and alpha = 1/(2 lambda)
/// for the implicit one, K = 1000.
ExperimentConfig reference_preset(std::uint64_t seed);

struct RunRecord {
  long k = 0;
  double alpha = 0.0;
  double gap = 0.0;           ///< l(x_avg) - l(x*)
  double disagreement = 0.0;  ///< 1/2 <L_d x_avg, x_avg> (1/4 for msd-im)
  double f_subopt = 0.0;      ///< f(x_avg) - f(x*)
  double max_edge_disagreement = 0.0;
  double rhs = 0.0;           ///< bound on gap + disagreement; NaN if none applies
  int bound_ok = -1;          ///< 1 held, 0 violated, -1 skipped / not applicable
  double ms = 0.0;
};

struct AlgorithmRun {
  Algorithm algorithm;
  std::vector<RunRecord> records;
  bool failed = false;
  std::string error;
  /// Every step obeyed its step cap, so bound_ok was evaluated.
  bool caps_respected = true;
  /// A record has bound_ok == 0.
  bool bound_violated() const;
};

struct InstanceSummary {
  Index nodes = 0;
  Index edges = 0;
  double lambda = 0.0;
  double gamma_inverse = 0.0;
  double G = 0.0;
  bool G_estimated = false;
  double f_star = 0.0;
  double certificate_residual = 0.0;
  bool optimum_nonunique = false;
};

struct ExperimentResult {
  InstanceSummary instance;
  std::vector<AlgorithmRun> runs;  ///< config order
};

/// Instance described by the config (graph, weights, costs, mirror map).
ProblemInstance build_instance(const ExperimentConfig& config);

/// (V1 + G^2 sum alpha_k^2) / sum alpha_k.
double theorem1_rhs(double v1, double G, double sum_alpha_sq, double sum_alpha);
/// Explicit-method bound for `schedule` over k = 1..K from (x1, u1).
double theorem1_rhs(const ProblemInstance& p, const Certificate& cert, const Stacked& x1,
                    const Stacked& u1, const StepSchedule& schedule, long K);
/// V1 / (alpha K).
double theorem2_rhs(double v1, double alpha, long K);
double theorem2_rhs(const ProblemInstance& p, const Certificate& cert, const Stacked& x1,
                    const Stacked& u1, double alpha, long K);

/// Allowed slack when comparing a bound's two sides.
inline constexpr double kBoundSlack = 1e-8;

/// Runs every configured algorithm from the same x1 on the same instance.
/// Algorithm failures are recorded per run; certificate failures throw.
/// Worker threads are capped by MSDNET_THREADS.
ExperimentResult run(const ExperimentConfig& config);

/// Same, on a prebuilt instance and initial point.
ExperimentResult run(const ExperimentConfig& config, const ProblemInstance& p,
                     const Stacked& x1);

inline constexpr const char* kCsvHeader = "k,alpha,gap,disagreement,f_subopt,rhs,bound_ok,ms";

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
/// Parses the columns of write_csv; max_edge_disagreement comes back NaN.
std::vector<RunRecord> read_csv(std::istream& in);
std::vector<RunRecord> read_csv_file(const std::string& path);

/// Writes <dir>/<algorithm>.csv per run and <dir>/plot.py, creating dir.
/// Returns the written paths. Throws IoError with the failing path.
std::vector<std::string> emit(const ExperimentResult& result, const std::string& dir);

/// Matplotlib script plotting |f_subopt| per algorithm on a log scale.
std::string plot_script(const std::vector<std::string>& csv_names);

}  // namespace msdnet
