#pragma once

// Oracle equivalence checks behind `openkz validate`.

#include <functional>
#include <string>
#include <vector>

#include "openkz/lindblad.hpp"

namespace openkz {

using RhsFunction =
    std::function<ModeState(const ModeState&, const BlochVector&, const DissipationConfig&)>;

enum class ValidationLevel { fast, full };

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationOptions {
  ValidationLevel level = ValidationLevel::fast;
  /// Generator under test; the checks compare it against independent oracles.
  RhsFunction rhs = openkz::rhs;
  int workers = 1;
  unsigned seed = 20240611u;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

ValidationReport run_validation(const ValidationOptions& opt);

/// Real 6x6 generator in the packed coordinates (rho11, rho22, rho33, rho44, Re, Im rho23),
/// recovered column by column from `rhs`.
std::array<std::array<double, 6>, 6> generator_matrix(const RhsFunction& rhs, const BlochVector& b,
                                                      const DissipationConfig& d);

}  // namespace openkz
