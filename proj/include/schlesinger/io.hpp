#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "schlesinger/flow.hpp"

namespace schlesinger {

/// Complex numbers are serialized as two-element arrays [re, im].
nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

/// On-disk configuration: n, pole positions ("lambdas"), matrix entries
/// ("matrices", each {"affine": [x1,x2,x3]} or {"divisor": [x1,x2,x3]}),
/// branch roots ("roots", one per matrix), and an optional preferred chart
/// {"i", "j"}.  All Configuration invariants are re-checked on load;
/// violations throw ParseError or ValidationError.
struct InstanceData {
  Configuration config;
  std::optional<std::pair<int, int>> chart;
};

InstanceData instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(
    const Configuration& config,
    const std::optional<std::pair<int, int>>& chart = std::nullopt);
InstanceData load_instance(const std::string& path);

/// On-disk reduced point: chart (indices and branch roots), interior factors
/// in the same point encoding, casimirs and roots of all original indices,
/// optional pole positions, and the chart robustness score (informational).
struct ReducedData {
  ReducedPoint point;
  std::optional<std::vector<Complex>> lambdas;
  double score = 0.0;
};

ReducedData reduced_from_json(const nlohmann::json& j);
nlohmann::json reduced_to_json(
    const ReducedPoint& r,
    const std::optional<std::vector<Complex>>& lambdas = std::nullopt,
    double score = 0.0);
ReducedData load_reduced(const std::string& path);

/// Trajectory rows: re/im of the moving pole, re/im of every affine entry,
/// then the conservation metrics (max casimir drift vs the first row, moment
/// residual).  17 significant digits, LF line endings, byte-deterministic.
void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryPoint>& traj, int k);

/// Same layout for reduced trajectories: chart id, p, q per factor.
void write_reduced_trajectory_csv(std::ostream& os,
                                  const std::vector<ReducedTrajectoryPoint>& traj);

/// Parse "0.6", "-1.2+0.5i", "2i", "i" style complex literals (CLI paths).
Complex parse_complex(const std::string& text);
/// Comma-separated list of complex literals.
std::vector<Complex> parse_complex_list(const std::string& text);

}  // namespace schlesinger
