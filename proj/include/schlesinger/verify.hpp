#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace schlesinger {

struct PropertyResult {
  std::string name;
  int samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::vector<int> n_values;
  int samples = 0;
  std::vector<PropertyResult> properties;
  double wall_ms = 0.0;  ///< reported on stderr only; keeps stdout deterministic

  bool pass() const {
    for (const auto& p : properties) {
      if (!p.pass) return false;
    }
    return true;
  }
};

/// Seeded property suites over every module; deterministic given
/// (seed, n_values, samples).  Expensive flow suites run a reduced sample
/// count (recorded per property in the report).
RunReport run_property_suites(std::uint64_t seed, const std::vector<int>& n_values,
                              int samples);

struct CriterionResult {
  int id = 0;
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

/// The ten release criteria with their pinned sample counts and tolerances.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed);

}  // namespace schlesinger
