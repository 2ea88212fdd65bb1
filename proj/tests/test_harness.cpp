#include "msdnet/harness.hpp"
#include "msdnet/oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace msdnet;
using namespace msdnet::testing;

namespace {

const AlgorithmRun& find(const ExperimentResult& r, Algorithm a) {
  for (const AlgorithmRun& run : r.runs)
    if (run.algorithm == a) return run;
  throw std::runtime_error("missing run");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("algorithm names") {
  for (Algorithm a : all_algorithms()) CHECK(parse_algorithm(algorithm_name(a)) == a);
  CHECK(algorithm_name(Algorithm::MsdImplicit) == "msd-im");
  CHECK_THROWS_AS(parse_algorithm("bpdmm"), ConfigError);
}

TEST_CASE("bound right-hand sides") {
  CHECK(theorem1_rhs(1.0, 2.0, 10 * 0.01, 10 * 0.1) == doctest::Approx(1.4));
  CHECK(theorem1_rhs(3.0, 0.0, 5.0, 1.5) == doctest::Approx(2.0));
  CHECK(std::isinf(theorem1_rhs(3.0, std::numeric_limits<double>::infinity(), 5.0, 1.5)));
  CHECK(theorem2_rhs(2.0, 0.5, 4) == 1.0);
}

TEST_CASE("reference preset") {
  const ExperimentConfig c = reference_preset(7);
  CHECK(c.seed == 7);
  CHECK(c.nodes == 20);
  CHECK(c.edge_probability == 0.3);
  CHECK(c.dim == 10);
  CHECK(c.damper == 0.07);
  CHECK(c.iterations == 1000);
  CHECK(c.geometry == Geometry::NegativeEntropy);
  CHECK(c.domain == Domain::Simplex);
  const ProblemInstance p = build_instance(c);
  CHECK(p.node_count() == 20);
  CHECK(std::abs(p.gamma_inverse() * p.lambda() - 1.0) < 1e-12);
  for (const NodeCost& cost : p.costs()) {
    REQUIRE(cost.as_linear());
    CHECK(cost.as_linear()->a.minCoeff() >= 0.0);
    CHECK(cost.as_linear()->a.maxCoeff() <= 1.0);
  }
}

TEST_CASE("zero iterations give empty records") {
  ExperimentConfig c = reference_preset(1);
  c.iterations = 0;
  const ExperimentResult r = run(c);
  for (const AlgorithmRun& a : r.runs) {
    CHECK_FALSE(a.failed);
    CHECK(a.records.empty());
  }
}

TEST_CASE("single node explicit run is centralized mirror descent") {
  ExperimentConfig c = reference_preset(5);
  c.nodes = 1;
  c.iterations = 100;
  c.algorithms = {Algorithm::MsdExplicit};
  c.explicit_schedule = StepSchedule::diminishing(0.5);
  const ProblemInstance p = build_instance(c);
  const Stacked x1 = initial_point(p, c.init, 11);
  const ExperimentResult r = run(c, p, x1);
  const AlgorithmRun& ex = find(r, Algorithm::MsdExplicit);
  REQUIRE(ex.records.size() == 100);

  const Vec a = p.costs()[0].as_linear()->a;
  std::vector<double> steps;
  for (long k = 1; k <= 100; ++k) steps.push_back(0.5 / std::sqrt(static_cast<double>(k)));
  const auto iterates = oracle::centralized_entropic_descent(a, x1.col(0), steps);
  Vec weighted = Vec::Zero(a.size());
  double total = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    weighted += steps[k] * iterates[k];
    total += steps[k];
    const double gap = a.dot(weighted / total) - a.minCoeff();
    CHECK(std::abs(ex.records[k].gap - gap) < 1e-12);
    CHECK(ex.records[k].disagreement == 0.0);
  }
}

TEST_CASE("bounds hold on the numerical experiment") {
  ExperimentConfig c = reference_preset(2);
  c.iterations = 300;
  const ExperimentResult r = run(c);
  for (Algorithm a : {Algorithm::MsdExplicit, Algorithm::MsdImplicit, Algorithm::ContinuousReference}) {
    const AlgorithmRun& run = find(r, a);
    CHECK_FALSE(run.failed);
    CHECK(run.caps_respected);
    for (const RunRecord& rec : run.records) CHECK(rec.bound_ok == 1);
  }
  for (Algorithm a : {Algorithm::ProjectedSubgradient, Algorithm::DualAveraging,
                      Algorithm::MirrorDescent}) {
    const AlgorithmRun& run = find(r, a);
    CHECK_FALSE(run.failed);
    for (const RunRecord& rec : run.records) {
      CHECK(rec.bound_ok == -1);
      CHECK(std::isnan(rec.rhs));
    }
  }
  // the diminishing-step bound eventually decreases
  const auto& ex = find(r, Algorithm::MsdExplicit).records;
  for (std::size_t k = 50; k + 1 < ex.size(); ++k) CHECK(ex[k + 1].rhs < ex[k].rhs);
}

TEST_CASE("steps above the cap skip the bound check") {
  ExperimentConfig c = reference_preset(3);
  c.iterations = 20;
  c.algorithms = {Algorithm::MsdExplicit, Algorithm::MsdImplicit};
  c.explicit_schedule = StepSchedule::diminishing(50.0);
  c.implicit_schedule = StepSchedule::constant(50.0);
  const ExperimentResult r = run(c);
  for (const AlgorithmRun& run : r.runs) {
    CHECK_FALSE(run.failed);
    CHECK_FALSE(run.caps_respected);
    for (const RunRecord& rec : run.records) CHECK(rec.bound_ok == -1);
  }
}

TEST_CASE("a failing algorithm does not stop the others") {
  const Graph g = path(3);
  NodeCost::Custom oracle_cost{2,
                               [](const Vec& y) { return 0.5 * (y - Vec::Constant(2, 0.5)).squaredNorm(); },
                               [](const Vec& y) { return Vec(y - Vec::Constant(2, 0.5)); },
                               1.0, false};
  const ProblemInstance p(g, unit_weights(g), std::vector<NodeCost>(3, NodeCost::custom(oracle_cost)),
                          MirrorMap::entropy(2));
  ExperimentConfig c;
  c.iterations = 10;
  c.algorithms = {Algorithm::ContinuousReference, Algorithm::MsdExplicit};
  const ExperimentResult r = run(c, p, replicate(vec({0.3, 0.7}), 3));
  CHECK(find(r, Algorithm::ContinuousReference).failed);
  CHECK_FALSE(find(r, Algorithm::ContinuousReference).error.empty());
  CHECK_FALSE(find(r, Algorithm::MsdExplicit).failed);
  CHECK(find(r, Algorithm::MsdExplicit).records.size() == 10);
  CHECK(r.instance.G_estimated);
}

TEST_CASE("runs are reproducible") {
  ExperimentConfig c = reference_preset(9);
  c.iterations = 50;
  const ExperimentResult a = run(c);
  const ExperimentResult b = run(c);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    std::ostringstream sa;
    std::ostringstream sb;
    write_csv(sa, a.runs[i].records);
    write_csv(sb, b.runs[i].records);
    CHECK(sa.str() == sb.str());
  }
}

TEST_CASE("csv") {
  std::ostringstream empty;
  write_csv(empty, {});
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");

  RunRecord r;
  r.k = 3;
  r.alpha = 0.1;
  r.gap = 1.0 / 3.0;
  r.disagreement = 2e-17;
  r.f_subopt = -0.25;
  r.rhs = std::numeric_limits<double>::quiet_NaN();
  r.bound_ok = -1;
  std::stringstream buffer;
  write_csv(buffer, {r});
  const auto back = read_csv(buffer);
  REQUIRE(back.size() == 1);
  CHECK(back[0].k == 3);
  CHECK(back[0].gap == r.gap);
  CHECK(back[0].disagreement == r.disagreement);
  CHECK(back[0].f_subopt == r.f_subopt);
  CHECK(std::isnan(back[0].rhs));
  CHECK(back[0].bound_ok == -1);

  std::istringstream bad_header("k,alpha\n");
  CHECK_THROWS_AS(read_csv(bad_header), ConfigError);
  std::istringstream short_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_WITH_AS(read_csv(short_row), doctest::Contains("line 2"), ConfigError);
}

TEST_CASE("emit writes csvs and a plot script") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "msdnet-emit-test";
  fs::remove_all(dir);
  ExperimentConfig c = reference_preset(4);
  c.iterations = 5;
  c.algorithms = {Algorithm::MsdExplicit, Algorithm::DualAveraging};
  const ExperimentResult r = run(c);
  const auto paths = emit(r, dir.string());
  CHECK(paths.size() == 3);
  CHECK(read_csv_file((dir / "msd-ex.csv").string()).size() == 5);
  const std::string script = slurp((dir / "plot.py").string());
  CHECK(script.find("\"msd-ex.csv\", \"dda.csv\"") != std::string::npos);
  CHECK(script.find("set_yscale(\"log\")") != std::string::npos);
  fs::remove_all(dir);

  const fs::path blocker = fs::temp_directory_path() / "msdnet-emit-blocker";
  { std::ofstream(blocker.string()) << "x"; }
  CHECK_THROWS_WITH_AS(emit(r, (blocker / "sub").string()), doctest::Contains("msdnet-emit-blocker"),
                       IoError);
  fs::remove(blocker);
}
