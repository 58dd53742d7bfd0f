#pragma once

#include <span>
#include <vector>

#include "schlesinger/basis.hpp"
#include "schlesinger/orbit.hpp"

namespace schlesinger {

/// n+1 orbit points with pairwise-distinct pole positions, subject to the
/// moment constraint sum of affine parts = 0.
struct Configuration {
  std::vector<OrbitPoint> points;  ///< indices 0..n
  std::vector<Complex> lambdas;    ///< pole positions, same indexing

  int n() const { return static_cast<int>(points.size()) - 1; }
};

/// Validates sizes (n >= 3), the moment constraint (<= 1e-9 * scale) and
/// pole separation (min gap > 1e-9 * scale).
Configuration make_configuration(std::vector<OrbitPoint> points,
                                 std::vector<Complex> lambdas);

/// Residual of the moment constraint, normalized by max(1, point norms).
double moment_residual(std::span<const OrbitPoint> points);

/// Gauge action: conjugate every point by g (pole positions are untouched).
Configuration conjugate(const GroupElement& g, const Configuration& config);

/// Pairings a_ik = <A_i, A_k> and triple brackets f_ikl = <[A_i, A_k], A_l>.
/// Both tables are conjugation-invariant functions of the configuration.
struct InvariantTable {
  int n = 0;
  std::vector<Complex> pair;    ///< (n+1)^2 entries, row-major
  std::vector<Complex> triple;  ///< (n+1)^3 entries

  Complex a(int i, int k) const { return pair[i * (n + 1) + k]; }
  Complex f(int i, int k, int l) const {
    return triple[(i * (n + 1) + k) * (n + 1) + l];
  }
};

InvariantTable invariants(std::span<const OrbitPoint> points);

/// Image of a configuration under the chart reduction: one quadric point per
/// interior slot (in the accompanying-basis coordinates), plus the casimirs
/// and branch roots of all n+1 original points.  Slot order is the ascending
/// order of the surviving indices.
struct ReducedPoint {
  int n = 0;
  ChartSpec chart;
  std::vector<OrbitPoint> factors;  ///< n-2 interior quadric points
  std::vector<Complex> casimirs;    ///< n+1, original indexing
  std::vector<Complex> roots;       ///< n+1, original indexing

  Complex beta(int s) const { return factors[s].affine.x3; }
  Complex q(int s) const { return factors[s].affine.x1; }
  Complex qp(int s) const { return factors[s].affine.x2; }
};

/// Ascending original indices that survive as interior slots:
/// {1..n} minus {index_i, index_j}.
std::vector<int> interior_slots(int n, const ChartSpec& chart);

/// Move the configuration into the accompanying basis of the given chart and
/// record the interior points' coordinates.  Throws RestrictionViolated for
/// simultaneously triangularizable input, ChartConditionViolated when the
/// chart's pairings degenerate, ValidationError when the chart's stored roots
/// disagree with the points'.
ReducedPoint reduce(std::span<const OrbitPoint> points, const ChartSpec& chart);
ReducedPoint reduce(const Configuration& config, const ChartSpec& chart);

/// Entries (x1, x2, x3) of all n+1 normal-form matrices as polynomials in the
/// free interior coordinates.  With S = sum beta_m + root0 + root_i:
///
///   index 0:       x1 = 0,            x2 = -sum qp + S^2 - a_j/2,  x3 = root0
///   index_i:       x1 = -(sum q + 1), x2 = 0,                      x3 = root_i
///   index_j:       x1 = 1,            x2 = -S^2 + a_j/2,           x3 = -S
///   slot m:        x1 = q_m,          x2 = qp_m,                   x3 = beta_m
///
/// a_j is the casimir at index_j.  T is Complex or Dual.
template <class T>
std::vector<std::array<T, 3>> normal_form_entries(int n, const ChartSpec& chart,
                                                  std::span<const T> beta,
                                                  std::span<const T> q,
                                                  std::span<const T> qp,
                                                  Complex a_j) {
  T beta_sum{}, q_sum{}, qp_sum{};
  for (std::size_t m = 0; m < beta.size(); ++m) {
    beta_sum = beta_sum + beta[m];
    q_sum = q_sum + q[m];
    qp_sum = qp_sum + qp[m];
  }
  const T s = beta_sum + (chart.root0 + chart.root_i);
  std::vector<std::array<T, 3>> out(n + 1);
  const auto slots = interior_slots(n, chart);
  for (std::size_t m = 0; m < slots.size(); ++m) {
    out[slots[m]] = {q[m], qp[m], beta[m]};
  }
  out[0] = {T{}, -qp_sum + s * s - 0.5 * a_j, T{chart.root0}};
  out[chart.index_i] = {-(q_sum + 1.0), T{}, T{chart.root_i}};
  out[chart.index_j] = {T{1.0}, -(s * s) + 0.5 * a_j, -s};
  return out;
}

/// Trace pairing of two entry triples: 2 x3 y3 + x1 y2 + x2 y1.
template <class T>
T pair_invariant(const std::array<T, 3>& x, const std::array<T, 3>& y) {
  return 2.0 * x[2] * y[2] + x[0] * y[1] + x[1] * y[0];
}

/// Polynomial section of the reduction: rebuilds the n+1 normal-form orbit
/// points from a reduced point.  reduce(lift(r), r.chart) == r identically.
std::vector<OrbitPoint> lift(const ReducedPoint& r);

/// <A_i, A_k> of the lifted configuration, evaluated directly on the
/// normal-form polynomials without building orbit points.
Complex hamiltonian_value(const ReducedPoint& r, int i, int k);

/// Same evaluation on raw interior coordinates (no quadric membership is
/// required); used by polynomiality checks and derivative evaluations.
Complex invariant_pair_value(int n, const ChartSpec& chart,
                             std::span<const Complex> beta,
                             std::span<const Complex> q,
                             std::span<const Complex> qp, Complex a_j, int i,
                             int k);

/// Conic coordinates of a divisor point against two independent reference
/// elements: (<P,r1> : <P,r2> : <P,[r1,r2]>), max-modulus normalized.
/// Throws DegenerateReference for dependent references, ValidationError off
/// the divisor.
std::array<Complex, 3> divisor_conic_coords(const OrbitPoint& pt,
                                            const Sl2Element& ref1,
                                            const Sl2Element& ref2);

}  // namespace schlesinger
