#pragma once

#include "msdnet/common.hpp"
#include "msdnet/geometry.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace msdnet {

struct PropertyResult {
  std::string name;
  bool passed = false;
  long samples = 0;
  double worst = 0.0;  ///< largest violation (or error) observed
  std::string detail;
};

using Divergence = std::function<double(const MirrorMap&, const Vec&, const Vec&)>;

struct VerifyOptions {
  std::uint64_t seed = 20200101;
  long samples = 1000;
  /// Divergence under test; defaults to msdnet::bregman. Tests substitute a
  /// faulty one to confirm the suite notices.
  Divergence divergence;
};

/// Randomized invariant suite on small instances: Bregman identities, proximal
/// inequalities, operator identities, reductions and oracle agreement.
/// Deterministic for a given seed.
std::vector<PropertyResult> run_invariant_suite(const VerifyOptions& options = {});

/// One line per property, `PASS`/`FAIL` first.
void print_report(std::ostream& out, const std::vector<PropertyResult>& results);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace msdnet
