#include "msdnet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace msdnet {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kSchema = {
    {"experiment", {"preset", "seed", "iterations", "algorithms", "geometry", "init"}},
    {"graph", {"nodes", "edge_probability", "edge_list", "damper", "spring"}},
    {"costs", {"kind", "dim", "mu", "domain"}},
    {"steps", {"explicit", "explicit_base", "implicit_alpha", "baseline_base"}},
    {"ode", {"interval", "substeps"}},
    {"output", {"dir", "timing"}},
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto child = tree_->get_child_optional(key);
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(path(key), what);
  }

  double number(const std::string& key, double fallback) const {
    const auto v = raw(key);
    if (!v) return fallback;
    return parse_number(key, *v);
  }

  double parse_number(const std::string& key, const std::string& v) const {
    std::size_t used = 0;
    double out = 0.0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + v + "'");
    }
    if (used != v.size() || !std::isfinite(out)) fail(key, "expected a number, got '" + v + "'");
    return out;
  }

  long integer(const std::string& key, long fallback, long min_value) const {
    const auto v = raw(key);
    if (!v) return fallback;
    std::size_t used = 0;
    long out = 0;
    try {
      out = std::stol(*v, &used);
    } catch (const std::exception&) {
      fail(key, "expected an integer, got '" + *v + "'");
    }
    if (used != v->size()) fail(key, "expected an integer, got '" + *v + "'");
    if (out < min_value) fail(key, "must be >= " + std::to_string(min_value));
    return out;
  }

  template <typename T>
  T choice(const std::string& key, T fallback, const std::map<std::string, T>& options) const {
    const auto v = raw(key);
    if (!v) return fallback;
    const auto it = options.find(*v);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : ", ") + name;
      fail(key, "unknown value '" + *v + "' (expected one of: " + allowed + ")");
    }
    return it->second;
  }

  /// `auto` leaves the schedule base unset.
  void base(const std::string& key, StepSchedule& schedule) const {
    const auto v = raw(key);
    if (!v) return;
    if (*v == "auto") {
      schedule.has_base = false;
      return;
    }
    const double value = parse_number(key, *v);
    if (!(value > 0.0)) fail(key, "must be positive");
    schedule.base = value;
    schedule.has_base = true;
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
};

void check_keys(const pt::ptree& root) {
  for (const auto& [name, child] : root) {
    if (child.empty()) {
      if (name == "schema" || (kSchema.count(name) && child.data().empty())) continue;
      throw ConfigError(name, "unknown top-level key");
    }
    const auto section = kSchema.find(name);
    if (section == kSchema.end()) throw ConfigError(name, "unknown section");
    for (const auto& [key, value] : child) {
      if (!section->second.count(key)) throw ConfigError(name + "." + key, "unknown key");
      if (!value.empty()) throw ConfigError(name + "." + key, "nested keys are not allowed");
    }
  }
}

const pt::ptree* find_section(const pt::ptree& root, const std::string& name) {
  const auto child = root.get_child_optional(name);
  return child ? &*child : nullptr;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_keys(root);

  const auto schema = root.get_optional<std::string>("schema");
  if (!schema) throw ConfigError("schema", "missing (expected " + std::string(kConfigSchema) + ")");
  if (trim(*schema) != kConfigSchema)
    throw ConfigError("schema", "unsupported schema '" + trim(*schema) + "' (expected " +
                                    kConfigSchema + ")");

  const Section experiment("experiment", find_section(root, "experiment"));
  const Section graph("graph", find_section(root, "graph"));
  const Section costs("costs", find_section(root, "costs"));
  const Section steps("steps", find_section(root, "steps"));
  const Section ode("ode", find_section(root, "ode"));
  const Section output("output", find_section(root, "output"));

  ExperimentConfig c;
  if (const auto preset = experiment.raw("preset")) {
    if (*preset != "reference") experiment.fail("preset", "unknown preset '" + *preset + "'");
    c = reference_preset(c.seed);
  }

  c.seed = static_cast<std::uint64_t>(experiment.integer("seed", static_cast<long>(c.seed), 0));
  c.iterations = experiment.integer("iterations", c.iterations, 0);
  if (const auto list = experiment.raw("algorithms")) {
    c.algorithms.clear();
    std::stringstream ss(*list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        c.algorithms.push_back(parse_algorithm(item));
      } catch (const ConfigError& e) {
        experiment.fail("algorithms", "unknown algorithm '" + item + "'");
      }
    }
    if (c.algorithms.empty()) experiment.fail("algorithms", "list is empty");
  }
  c.geometry = experiment.choice<Geometry>(
      "geometry", c.geometry,
      {{"entropy", Geometry::NegativeEntropy}, {"euclidean", Geometry::Euclidean}});
  c.init = experiment.choice<InitKind>("init", c.init,
                                       {{"dirichlet", InitKind::Dirichlet}, {"uniform", InitKind::Uniform}});

  c.nodes = graph.integer("nodes", static_cast<long>(c.nodes), 1);
  c.edge_probability = graph.number("edge_probability", c.edge_probability);
  if (!(c.edge_probability > 0.0 && c.edge_probability <= 1.0))
    graph.fail("edge_probability", "must lie in (0, 1]");
  if (const auto path = graph.raw("edge_list")) c.edge_list = *path;
  c.damper = graph.number("damper", c.damper);
  if (!(c.damper > 0.0)) graph.fail("damper", "must be positive");
  if (const auto spring = graph.raw("spring")) {
    if (*spring == "lambda_d") {
      c.spring_rule = SpringRule::LambdaTimesDamper;
    } else {
      c.spring_rule = SpringRule::Fixed;
      c.spring = graph.parse_number("spring", *spring);
      if (!(c.spring > 0.0)) graph.fail("spring", "must be positive");
    }
  }

  c.cost_kind = costs.choice<CostKind>(
      "kind", c.cost_kind,
      {{"linear_uniform", CostKind::LinearUniform}, {"quadratic", CostKind::Quadratic}});
  c.dim = costs.integer("dim", static_cast<long>(c.dim), 1);
  c.mu = costs.number("mu", c.mu);
  if (!(c.mu > 0.0)) costs.fail("mu", "must be positive");
  c.domain = costs.choice<Domain>("domain", c.domain,
                                  {{"simplex", Domain::Simplex}, {"free", Domain::FreeSpace}});

  c.explicit_schedule.kind = steps.choice<StepSchedule::Kind>(
      "explicit", c.explicit_schedule.kind,
      {{"diminishing", StepSchedule::Kind::Diminishing}, {"constant", StepSchedule::Kind::Constant}});
  steps.base("explicit_base", c.explicit_schedule);
  steps.base("implicit_alpha", c.implicit_schedule);
  steps.base("baseline_base", c.baseline_schedule);

  if (const auto interval = ode.raw("interval"); interval && *interval != "auto") {
    const double value = ode.parse_number("interval", *interval);
    if (!(value > 0.0)) ode.fail("interval", "must be positive");
    c.ode_interval = value;
  }
  c.ode_substeps = static_cast<int>(ode.integer("substeps", c.ode_substeps, 1));

  if (const auto dir = output.raw("dir")) c.output_dir = *dir;
  c.timing = output.choice<bool>("timing", c.timing, {{"true", true}, {"false", false}});

  if (c.geometry == Geometry::NegativeEntropy && c.domain != Domain::Simplex)
    throw ConfigError("experiment.geometry", "entropy geometry requires costs.domain = simplex");
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config");
  return parse_config(in);
}

namespace {

// Shortest text that parses back to the same double.
std::string num(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, result.ptr);
}

std::string base_text(const StepSchedule& s) { return s.has_base ? num(s.base) : "auto"; }

}  // namespace

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "schema = " << kConfigSchema << "\n\n[experiment]\n";
  out << "seed = " << c.seed << '\n';
  out << "iterations = " << c.iterations << '\n';
  out << "algorithms = ";
  for (std::size_t i = 0; i < c.algorithms.size(); ++i)
    out << (i ? "," : "") << algorithm_name(c.algorithms[i]);
  out << '\n';
  out << "geometry = " << (c.geometry == Geometry::NegativeEntropy ? "entropy" : "euclidean") << '\n';
  out << "init = " << (c.init == InitKind::Dirichlet ? "dirichlet" : "uniform") << "\n\n[graph]\n";
  out << "nodes = " << c.nodes << '\n';
  out << "edge_probability = " << num(c.edge_probability) << '\n';
  if (!c.edge_list.empty()) out << "edge_list = " << c.edge_list << '\n';
  out << "damper = " << num(c.damper) << '\n';
  if (c.spring_rule == SpringRule::LambdaTimesDamper) {
    out << "spring = lambda_d\n";
  } else {
    out << "spring = " << num(c.spring) << '\n';
  }
  out << "\n[costs]\n";
  out << "kind = " << (c.cost_kind == CostKind::LinearUniform ? "linear_uniform" : "quadratic") << '\n';
  out << "dim = " << c.dim << '\n';
  out << "mu = " << num(c.mu) << '\n';
  out << "domain = " << (c.domain == Domain::Simplex ? "simplex" : "free") << "\n\n[steps]\n";
  out << "explicit = "
      << (c.explicit_schedule.kind == StepSchedule::Kind::Diminishing ? "diminishing" : "constant")
      << '\n';
  out << "explicit_base = " << base_text(c.explicit_schedule) << '\n';
  out << "implicit_alpha = " << base_text(c.implicit_schedule) << '\n';
  out << "baseline_base = " << base_text(c.baseline_schedule) << "\n\n[ode]\n";
  out << "interval = ";
  if (c.ode_interval) {
    out << num(*c.ode_interval) << '\n';
  } else {
    out << "auto\n";
  }
  out << "substeps = " << c.ode_substeps << "\n\n[output]\n";
  out << "dir = " << c.output_dir << '\n';
  out << "timing = " << (c.timing ? "true" : "false") << '\n';
}

void write_config_file(const std::string& path, const ExperimentConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  write_config(out, config);
  if (!out) throw IoError(path, "write failed");
}

}  // namespace msdnet
