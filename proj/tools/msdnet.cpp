// msdnet: run mass-spring-damper network experiments and the invariant suite.
//
//   msdnet paper-experiment --seed 7 --out results/
//   msdnet run --config experiment.ini
//   msdnet verify
//   msdnet init-config --out experiment.ini
//
// Exit status: 0 all checks pass, 2 bound violation, 3 config error,
// 4 numerical failure, 1 IO or other error.

#include "msdnet/config.hpp"
#include "msdnet/harness.hpp"
#include "msdnet/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace msdnet;

enum Exit : int { kOk = 0, kOther = 1, kBoundViolation = 2, kConfigError = 3, kNumericalFailure = 4 };

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> iters;
  std::string algorithms;
  std::string geometry;
  std::string out;
};

void apply(const Overrides& o, ExperimentConfig& config) {
  if (o.seed) config.seed = *o.seed;
  if (o.iters) {
    if (*o.iters < 1) throw ConfigError("--iters", "must be at least 1");
    config.iterations = *o.iters;
  }
  if (!o.algorithms.empty()) {
    config.algorithms.clear();
    std::stringstream list(o.algorithms);
    std::string name;
    while (std::getline(list, name, ','))
      if (!name.empty()) config.algorithms.push_back(parse_algorithm(name));
    if (config.algorithms.empty()) throw ConfigError("--algorithms", "empty list");
  }
  if (o.geometry == "entropy") {
    config.geometry = Geometry::NegativeEntropy;
    if (config.domain != Domain::Simplex)
      throw ConfigError("--geometry", "entropy requires the simplex domain");
  } else if (o.geometry == "euclidean") {
    config.geometry = Geometry::Euclidean;
  }
  if (!o.out.empty()) config.output_dir = o.out;
}

std::string format_value(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << std::scientific << v;
  return s.str();
}

void print_summary(std::ostream& out, const ExperimentResult& result) {
  const InstanceSummary& s = result.instance;
  out << "instance: |V|=" << s.nodes << " |E|=" << s.edges << " lambda=" << format_value(s.lambda)
      << " 1/gamma=" << format_value(s.gamma_inverse) << " G=" << format_value(s.G)
      << (s.G_estimated ? " (estimated)" : "") << " f*=" << format_value(s.f_star) << "\n";
  if (s.optimum_nonunique) out << "note: optimum is not unique\n";
  out << std::left << std::setw(8) << "method" << std::right << std::setw(8) << "K" << std::setw(14)
      << "gap" << std::setw(14) << "disagree" << std::setw(14) << "f_subopt" << "  bound\n";
  for (const AlgorithmRun& run : result.runs) {
    out << std::left << std::setw(8) << algorithm_name(run.algorithm) << std::right;
    if (run.failed) {
      out << "  failed: " << run.error << "\n";
      continue;
    }
    if (run.records.empty()) {
      out << "  no records\n";
      continue;
    }
    const RunRecord& last = run.records.back();
    std::string bound = "n/a";
    if (run.bound_violated())
      bound = "VIOLATED";
    else if (std::isnan(last.rhs))
      bound = "n/a";
    else if (!run.caps_respected)
      bound = "skipped (step above cap)";
    else if (last.bound_ok == 1)
      bound = "held";
    out << std::setw(8) << last.k << std::setw(14) << format_value(last.gap) << std::setw(14)
        << format_value(last.disagreement) << std::setw(14) << format_value(last.f_subopt) << "  "
        << bound << "\n";
  }
}

int status_of(const ExperimentResult& result) {
  for (const AlgorithmRun& run : result.runs)
    if (!run.failed && !run.caps_respected)
      std::cerr << "warning: " << algorithm_name(run.algorithm)
                << " took steps above the admissible cap; bound not checked\n";
  for (const AlgorithmRun& run : result.runs)
    if (run.bound_violated()) {
      std::cerr << "error: bound violated by " << algorithm_name(run.algorithm) << "\n";
      return kBoundViolation;
    }
  for (const AlgorithmRun& run : result.runs)
    if (run.failed) {
      std::cerr << "error: " << algorithm_name(run.algorithm) << " failed: " << run.error << "\n";
      return kNumericalFailure;
    }
  return kOk;
}

int execute(const ExperimentConfig& config) {
  const ProblemInstance p = build_instance(config);
  const ExperimentResult result = msdnet::run(config);

  namespace fs = std::filesystem;
  const auto paths = emit(result, config.output_dir);
  ExperimentConfig snapshot = config;
  write_config_file((fs::path(config.output_dir) / "config.ini").string(), snapshot);
  write_edge_list_file((fs::path(config.output_dir) / "graph.txt").string(), p.graph(), p.weights());

  print_summary(std::cout, result);
  std::cout << "wrote " << paths.size() << " files to " << config.output_dir << "\n";
  return status_of(result);
}

// Maps library exceptions to exit codes.
template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kOther;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const CertificateError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const GraphError& e) {
    std::cerr << "graph error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}

void add_overrides(CLI::App* cmd, Overrides& o, bool with_seed = true) {
  if (with_seed) cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--iters", o.iters, "iterations K");
  cmd->add_option("--algorithms", o.algorithms, "comma list of msd-ex,msd-im,dps,dda,dmd,ode");
  cmd->add_option("--geometry", o.geometry, "mirror map")
      ->check(CLI::IsMember({"entropy", "euclidean"}));
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass-spring-damper distributed optimization experiments"};
  app.require_subcommand(1);

  Overrides reference;
  std::uint64_t reference_seed = 1;
  auto* paper_cmd = app.add_subcommand("paper-experiment", "numerical experiment with its defaults");
  paper_cmd->add_option("--seed", reference_seed, "random seed");
  add_overrides(paper_cmd, reference, false);

  Overrides run;
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
  run_cmd->add_option("--config", config_path, "config file")->required();
  add_overrides(run_cmd, run);

  std::uint64_t verify_seed = VerifyOptions{}.seed;
  long verify_samples = VerifyOptions{}.samples;
  auto* verify_cmd = app.add_subcommand("verify", "randomized invariant suite");
  verify_cmd->add_option("--seed", verify_seed, "random seed");
  verify_cmd->add_option("--samples", verify_samples, "samples per property")
      ->check(CLI::PositiveNumber);

  Overrides init;
  std::string init_out;
  auto* init_cmd = app.add_subcommand("init-config", "write a config file with the reference defaults");
  init_cmd->add_option("--out", init_out, "destination (stdout when omitted)");
  init_cmd->add_option("--seed", init.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*paper_cmd) {
    return guarded([&] {
      ExperimentConfig config = reference_preset(reference_seed);
      if (reference.out.empty()) reference.out = config.output_dir;
      apply(reference, config);
      return execute(config);
    });
  }
  if (*run_cmd) {
    return guarded([&] {
      ExperimentConfig config = parse_config_file(config_path);
      apply(run, config);
      return execute(config);
    });
  }
  if (*verify_cmd) {
    return guarded([&] {
      VerifyOptions options;
      options.seed = verify_seed;
      options.samples = verify_samples;
      const auto results = run_invariant_suite(options);
      print_report(std::cout, results);
      return all_passed(results) ? kOk : kNumericalFailure;
    });
  }
  return guarded([&] {
    const ExperimentConfig config = reference_preset(init.seed.value_or(1));
    if (init_out.empty())
      write_config(std::cout, config);
    else
      write_config_file(init_out, config);
    return kOk;
  });
}
