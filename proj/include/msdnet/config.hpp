#pragma once

#include "msdnet/harness.hpp"

#include <iosfwd>
#include <string>

namespace msdnet {

// INI-style experiment configuration (Boost.PropertyTree dialect: `;`
// comments on their own line, no inline comments). Example:
//
//   schema = msdnet-config/1
//
//   [experiment]
//   ; optional, applied before the other keys
//   preset = reference
//   seed = 7
//   iterations = 1000
//   algorithms = msd-ex,msd-im,dps,dda,dmd,ode
//   geometry = entropy
//   init = dirichlet
//
//   [graph]
//   nodes = 20
//   edge_probability = 0.3
//   damper = 0.07
//   spring = lambda_d
//
//   [costs]
//   kind = linear_uniform
//   dim = 10
//   mu = 1
//   domain = simplex
//
//   [steps]
//   explicit = diminishing
//   explicit_base = auto
//   implicit_alpha = auto
//   baseline_base = auto
//
//   [ode]
//   interval = auto
//   substeps = 8
//
//   [output]
//   dir = msdnet-out
//   timing = false
//
// Enumerations: geometry entropy|euclidean, init dirichlet|uniform,
// spring lambda_d|<number>, kind linear_uniform|quadratic, domain simplex|free,
// explicit diminishing|constant. `graph.edge_list = <path>` replaces the random
// graph and its weights. Step bases accept `auto` or a positive number.
//
// Unknown sections or keys are rejected; errors name the offending
// `section.key`.

/// Throws ConfigError.
ExperimentConfig parse_config(std::istream& in);
/// Throws IoError if unreadable, ConfigError if invalid.
ExperimentConfig parse_config_file(const std::string& path);

/// Writes a config that parse_config reads back to an equal experiment.
void write_config(std::ostream& out, const ExperimentConfig& config);
void write_config_file(const std::string& path, const ExperimentConfig& config);

}  // namespace msdnet
