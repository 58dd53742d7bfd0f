#pragma once

#include <span>
#include <vector>

#include "schlesinger/orbit.hpp"

namespace schlesinger {

/// Basis (sigma_minus, sigma_plus, sigma_3) of sl(2,C) adapted to a
/// configuration: sigma_-/sigma_+ span the lowering/raising eigendirections
/// of the distinguished elements and sigma_3 completes them so that
///
///   [s3,s+] = 2 s+,  [s3,s-] = -2 s-,  [s+,s-] = s3,
///   <s+,s+> = <s-,s-> = 0,  <s3,s3> = 2,  <s3,s+> = <s3,s-> = 0,
///   <s+,s-> = 1,
///
/// plus the normalization <sigma_-, a_ref> = 1 against the reference element.
struct StandardBasis {
  Sl2Element sigma_minus, sigma_plus, sigma_3;
};

/// Index data and branch roots fixing one chart of the reduced space:
/// index 0 plays the lowering role, index_i the raising role, index_j the
/// normalization role.  root0 and root_i are the chosen square roots of
/// casimir/2 at those points.
struct ChartSpec {
  int index_i = 0;
  int index_j = 0;
  Complex root0{};
  Complex root_i{};
};

/// Eigendirection of ad at pt with eigenvalue 2*sign*pt.root, extracted by
/// projecting the partner element.  On the divisor (and for any casimir-zero
/// point) the point's own projective direction is returned as an Sl2Element
/// and the partner is ignored.  sign must be +1 or -1.
Sl2Element eig_direction(const OrbitPoint& pt, const Sl2Element& partner, int sign);

/// Max residual of the bracket/pairing relations listed on StandardBasis,
/// including <sigma_-, a_ref> = 1; each term is scale-normalized.
double standard_basis_residual(const StandardBasis& basis, const Sl2Element& a_ref);

/// The two pairings that must stay away from zero for an admissible chart:
/// <dir_minus, dir_plus> and <dir_minus, a_ref>, both modulus-normalized by
/// the participating element norms.  True iff both exceed tol.
bool chart_condition(const Sl2Element& dir_minus, const Sl2Element& dir_plus,
                     const Sl2Element& a_ref, double tol = 1e-9);

/// Orthonormalization: builds the accompanying basis from raw eigendirections,
///
///   s- = dm / <dm, a_ref>,  s+ = dp <dm, a_ref> / <dm, dp>,
///   s3 = [dp, dm] / <dm, dp>.
///
/// Scale-free in dm and dp.  Throws ChartConditionViolated when the pairings
/// degenerate.
StandardBasis accompany(const Sl2Element& dir_minus, const Sl2Element& dir_plus,
                        const Sl2Element& a_ref);

/// Most transverse partner for the ad-eigenprojection at points[target]:
/// maximizes ||projection|| / (||a_target|| ||a_k||) over k != target.  For a
/// casimir-zero target returns its projective direction directly.  Throws
/// DegenerateDirection when every partner projects to (numerically) zero.
Sl2Element best_partner_direction(std::span<const OrbitPoint> points, int target,
                                  int sign);

/// A selected chart together with its robustness score (the smaller of the
/// two normalized chart-condition pairings) and the eigendirections that
/// realized it.
struct ChartChoice {
  ChartSpec spec;
  double score = 0.0;
  Sl2Element dir_minus, dir_plus;
};

/// Scans all admissible (index_i, index_j) pairs and returns the choice with
/// the best robustness score; ties within 1% resolve to the lexicographically
/// smallest (index_i, index_j).  Throws NoChartFound when no pair satisfies
/// the chart condition (e.g. simultaneously triangularizable input).
ChartChoice select_chart(std::span<const OrbitPoint> points);

/// Robustness score of one specific chart on a configuration (the same
/// quantity select_chart maximizes); 0.0 when the chart degenerates.
double chart_score(std::span<const OrbitPoint> points, const ChartSpec& chart);

}  // namespace schlesinger
