#pragma once

#include <vector>

#include "schlesinger/reduction.hpp"

namespace schlesinger {

/// Global sign of the Hamiltonians H_k = s * sum_{i != k} a_ik/(lambda_k -
/// lambda_i) relative to the chart form dp ^ dq and the flow convention
/// dq/dt = dH/dp, dp/dt = -dH/dq.  Calibrated once against the full system
/// (the isomonodromic and reduced trajectories agree with this value and
/// diverge immediately with the opposite one).
inline constexpr double kHamiltonianSign = 1.0;

/// Velocities dA_j/dlambda_k of the full isomonodromic system:
///
///   j != k:  [A_k, A_j] / (lambda_k - lambda_j)
///   j == k:  sum_{i != k} [A_i, A_k] / (lambda_k - lambda_i)
///
/// The velocities sum to zero and are tangent to each orbit (each <A_j, dA_j>
/// vanishes).  Divisor points receive zero affine velocity; their projective
/// representatives evolve by the same commutator formula inside integrate().
std::vector<Sl2Element> schlesinger_rhs(const Configuration& config, int k);

/// H_k evaluated on a configuration.  Throws PoleCollision when some
/// lambda_i approaches lambda_k.
Complex hamiltonian_k(const Configuration& config, int k);

/// A configuration together with the active deformation index.
struct FlowState {
  Configuration config;
  int k = 0;

  Complex t() const { return config.lambdas[k]; }
};

struct FlowParams {
  std::vector<Complex> t_path;  ///< waypoints; motion starts from lambda_k
  double tol_local = 1e-10;     ///< local error target per step
  double tol_drift = 1e-8;      ///< conserved-quantity alarm threshold
  double step_init = 1e-2;
  double h_min = 1e-13;
  double pole_margin = 1e-6;      ///< min allowed path distance to other poles
  int checkpoints_per_segment = 0;  ///< 0: record every accepted step
  double rechart_score = 1e-8;      ///< compare_flows re-charts below this
};

struct TrajectoryPoint {
  Complex t;
  Configuration config;
};

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) along the straight
/// segments lambda_k -> t_path[0] -> ... -> t_path.back().  Conservation of
/// each a_ii and of the moment sum is monitored on every accepted step
/// (DriftAlarm).  Throws PoleCollision when the path passes too close to
/// another pole and StepUnderflow when the controller collapses.
std::vector<TrajectoryPoint> integrate(const FlowState& state,
                                       const FlowParams& params);

/// Reduced Hamiltonian (equals hamiltonian_k of the lifted configuration).
Complex reduced_hamiltonian(const ReducedPoint& r,
                            const std::vector<Complex>& lambdas, int k);

/// Hamiltonian velocities of the reduced system in per-factor chart
/// coordinates.  The chart of each factor is chosen by conditioning; the
/// derivative of H is taken by forward-mode differentiation through the
/// chart and normal-form polynomials (exact, no finite differences).
struct ReducedVelocity {
  std::vector<ChartCoords> at;  ///< chart and coordinates used per factor
  std::vector<Complex> dp, dq;  ///< velocities in those charts
};
ReducedVelocity reduced_rhs(const ReducedPoint& r,
                            const std::vector<Complex>& lambdas, int k);

struct ReducedTrajectoryPoint {
  Complex t;
  ReducedPoint point;
};

/// Integrates the reduced system along the same kind of path.  Factors whose
/// chart coordinate |p| exceeds 100 are moved to the other chart between
/// steps (the trajectories themselves are chart-independent).
std::vector<ReducedTrajectoryPoint> integrate_reduced(
    const ReducedPoint& r0, const std::vector<Complex>& lambdas, int k,
    const FlowParams& params);

/// Agreement of the orbit forms under the lift: compares the sum of the
/// interior factors' form values with the sum over all n+1 lifted orbit
/// points, pushing the given interior tangents forward through the lift
/// polynomials.  The three distinguished points contribute zero individually;
/// their values are reported for inspection.
struct FormAgreement {
  double total_residual = 0.0;  ///< |sum_lifted - sum_reduced|
  double special_0 = 0.0, special_i = 0.0, special_j = 0.0;
  double scale = 1.0;  ///< max(1, |sums|): normalizer for the residuals
};
FormAgreement form_restriction_check(const ReducedPoint& r,
                                     std::span<const OrbitTangent> u,
                                     std::span<const OrbitTangent> v);

/// Cross-validation: integrates the full system and the reduced system along
/// the same path and compares reduce(full trajectory) with the reduced
/// trajectory at shared checkpoints, plus the invariant tables of both sides.
/// Charts are re-selected (and the running reduced state converted through
/// lift) whenever the active chart's condition falls below rechart_score.
struct CompareReport {
  double sup_distance = 0.0;       ///< componentwise, (1 + magnitude)-relative
  double invariant_mismatch = 0.0; ///< same normalization on the pair table
  int rechart_events = 0;
  int checkpoints = 0;
};
CompareReport compare_flows(const Configuration& config, int k,
                            const FlowParams& params,
                            const ChartSpec* chart = nullptr);

}  // namespace schlesinger
