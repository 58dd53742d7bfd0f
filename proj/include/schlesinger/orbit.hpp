#pragma once

#include <array>

#include "schlesinger/sl2.hpp"

namespace schlesinger {

/// The two affine charts of the blown-up orbit quadric.
enum class ChartId { primary, secondary };

inline ChartId other_chart(ChartId c) {
  return c == ChartId::primary ? ChartId::secondary : ChartId::primary;
}
inline const char* chart_name(ChartId c) {
  return c == ChartId::primary ? "primary" : "secondary";
}

/// Point of the blown-up quadric surface
///
///   X1 X2 + X3^2 = R^2/2,  root^2 = R^2/2,
///
/// carrying both the affine coordinates (as an Sl2Element, entries X1,X2,X3)
/// and a projective representative (x1:x2:x3).  Off the exceptional divisor
/// the projective triple is the ray of the affine one; on the divisor the
/// affine part is exactly zero, root = 0, and the projective triple lies on
/// the cone x1 x2 + x3^2 = 0.  The projective triple is normalized so its
/// first entry of maximal modulus equals 1.
struct OrbitPoint {
  Sl2Element affine;
  std::array<Complex, 3> projective{};
  Complex casimir{};  ///< <affine,affine> = 2(X1 X2 + X3^2)
  Complex root{};     ///< chosen square root of casimir/2

  bool on_divisor() const { return is_zero(affine); }
};

/// Divide by the first entry of maximal modulus (that entry becomes 1).
/// Throws DegenerateDirection on the zero triple.
std::array<Complex, 3> normalize_projective(const std::array<Complex, 3>& x);

/// Build a point off the divisor.  Validates root^2 = <a,a>/2 (RootMismatch)
/// and non-vanishing of a (use the projective overload for divisor points).
OrbitPoint make_orbit_point(const Sl2Element& affine, Complex root);

/// Build a point with an explicit projective representative.  For a nonzero
/// affine part the triple must be parallel to it; for the zero affine part
/// the point lies on the divisor: root must be 0 and the triple must satisfy
/// the cone equation x1 x2 + x3^2 = 0 (ConeViolation otherwise).
OrbitPoint make_orbit_point(const Sl2Element& affine,
                            const std::array<Complex, 3>& projective,
                            Complex root);

/// |X1 X2 + X3^2 - root^2| of the affine part (0 for divisor points).
double quadric_residual(const OrbitPoint& pt);

/// Conjugate both representatives by g.  The casimir is recomputed from the
/// conjugated entries and the root realigned with it on the same branch (the
/// casimir is invariant in exact arithmetic only).
OrbitPoint conjugate(const GroupElement& g, const OrbitPoint& pt);

/// Coordinates of a point in one chart of the blow-up atlas.
struct ChartCoords {
  ChartId chart{ChartId::primary};
  Complex p{}, q{};
};

/// Variation (dX1, dX2, dX3) of the affine coordinates; tangent to the
/// quadric when X2 dX1 + X1 dX2 + 2 X3 dX3 = 0.
struct OrbitTangent {
  Complex d1{}, d2{}, d3{};
};

/// Tangent expressed in chart coordinates (needed on the divisor, where the
/// affine coordinates degenerate).
struct ChartTangent {
  ChartId chart{ChartId::primary};
  Complex dp{}, dq{};
};

/// Affine coordinates (X1, X2, X3) parametrized by chart coordinates.
/// T is Complex or Dual; root enters as a constant.
///
///   primary:   X1 = q,               X2 = -p(pq + 2 root),  X3 = pq + root
///   secondary: X1 = -p(pq + 2 root), X2 = q,                X3 = -pq - root
///
/// Both charts land on the quadric identically in (p,q) and are symplectic
/// for the orbit form (dp ^ dq = omega).
template <class T>
std::array<T, 3> chart_point_entries(ChartId chart, const T& p, const T& q, Complex root) {
  const T x3_off = p * q;
  if (chart == ChartId::primary) {
    return {q, -p * (x3_off + 2.0 * root), x3_off + root};
  }
  return {-p * (x3_off + 2.0 * root), q, -x3_off - root};
}

/// Chart coordinates of pt.  In the primary chart p = (X3 - root)/X1 with
/// fallback p = -X2/(X3 + root) and q = X1; in the secondary chart
/// p = X1/(X3 - root) with fallback p = -(X3 + root)/X2 and q = X2.  On the
/// divisor the same ratios are taken on the projective triple and q = 0.
/// Throws ChartSingular when both denominators degenerate.
ChartCoords to_chart(const OrbitPoint& pt, ChartId chart);

/// Inverse of to_chart; q = 0 with root = 0 produces a divisor point.
OrbitPoint from_chart(const ChartCoords& c, Complex root);

/// Chart transition (valid for p != 0, both directions):
///
///   p' = 1/p,   q' = -p (p q + 2 root)
///
/// An involution; equals to_chart(from_chart(.)) on its domain.
ChartCoords transition(const ChartCoords& c, Complex root);

/// Pushforward of a chart tangent through from_chart (exact Jacobian).
OrbitTangent push_chart_tangent(const ChartCoords& at, Complex root,
                                Complex dp, Complex dq);

/// Orbit symplectic form omega(pt; u, v) evaluated through the best
/// conditioned of four equivalent representations (denominators X1, X2,
/// root - X3, root + X3).  Tangency of u and v is the caller's contract.
/// Throws FormSingular at the cone vertex / divisor (use the chart overload).
Complex omega(const OrbitPoint& pt, const OrbitTangent& u, const OrbitTangent& v);

/// Chart-coordinate form: omega = dp ^ dq, so the value is up*vq - uq*vp.
/// Valid everywhere in the chart, including on the divisor.
Complex omega(const OrbitPoint& pt, const ChartTangent& u, const ChartTangent& v);

/// |omega(e_p, e_q) - 1| at the point with coordinates c: the chart is
/// symplectic and correctly oriented iff this vanishes.  On the divisor the
/// form is evaluated through the blow-up ratio parametrization.
double chart_omega_check(const ChartCoords& c, Complex root);

}  // namespace schlesinger
