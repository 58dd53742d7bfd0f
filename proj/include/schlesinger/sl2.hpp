#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>

#include "schlesinger/errors.hpp"

namespace schlesinger {

using Complex = std::complex<double>;

/// Traceless complex 2x2 matrix stored by its three independent entries:
///
///     [[ x3,  x1 ],
///      [ x2, -x3 ]]
///
/// Tracelessness is structural, not a runtime invariant.
struct Sl2Element {
  Complex x1{};  ///< upper-right entry
  Complex x2{};  ///< lower-left entry
  Complex x3{};  ///< upper-left diagonal entry (lower-right is -x3)
};

inline Sl2Element operator+(const Sl2Element& a, const Sl2Element& b) {
  return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
}
inline Sl2Element operator-(const Sl2Element& a, const Sl2Element& b) {
  return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
}
inline Sl2Element operator-(const Sl2Element& a) { return {-a.x1, -a.x2, -a.x3}; }
inline Sl2Element operator*(const Complex& c, const Sl2Element& a) {
  return {c * a.x1, c * a.x2, c * a.x3};
}
inline Sl2Element operator*(const Sl2Element& a, const Complex& c) { return c * a; }
inline Sl2Element operator/(const Sl2Element& a, const Complex& c) {
  return {a.x1 / c, a.x2 / c, a.x3 / c};
}
inline Sl2Element& operator+=(Sl2Element& a, const Sl2Element& b) {
  a.x1 += b.x1;
  a.x2 += b.x2;
  a.x3 += b.x3;
  return a;
}

/// Max modulus of the three stored entries.
inline double norm_max(const Sl2Element& a) {
  return std::max({std::abs(a.x1), std::abs(a.x2), std::abs(a.x3)});
}

/// Exact zero test (all three entries are 0.0 + 0.0i bit-for-bit).
inline bool is_zero(const Sl2Element& a) {
  return a.x1 == Complex{} && a.x2 == Complex{} && a.x3 == Complex{};
}

/// Trace-form pairing <a,b> = tr(ab) = 2*a3*b3 + a1*b2 + a2*b1.
/// Symmetric, bilinear, invariant under conjugation.
inline Complex killing(const Sl2Element& a, const Sl2Element& b) {
  return 2.0 * a.x3 * b.x3 + a.x1 * b.x2 + a.x2 * b.x1;
}

/// <a,a> = 2*(x1*x2 + x3^2) = -2*det(a).
inline Complex casimir(const Sl2Element& a) { return killing(a, a); }

/// Matrix commutator [a,b] = ab - ba, again traceless.
inline Sl2Element bracket(const Sl2Element& a, const Sl2Element& b) {
  return {2.0 * (a.x3 * b.x1 - a.x1 * b.x3),   // x1
          2.0 * (a.x2 * b.x3 - a.x3 * b.x2),   // x2
          a.x1 * b.x2 - a.x2 * b.x1};          // x3
}

/// Invertible 2x2 complex matrix with det g = 1 (checked on construction).
struct GroupElement {
  Complex g11{1.0}, g12{}, g21{}, g22{1.0};

  Complex det() const { return g11 * g22 - g12 * g21; }
  GroupElement inverse() const { return {g22, -g12, -g21, g11}; }
};

/// Validates |det g - 1| <= 1e-12 * max(1, entry magnitudes squared).
GroupElement make_group_element(Complex g11, Complex g12, Complex g21, Complex g22);

/// Adjoint action g a g^{-1}; preserves the pairing and the bracket.
Sl2Element conjugate(const GroupElement& g, const Sl2Element& a);

/// For semisimple a with root^2 = <a,a>/2, projects b onto the ad(a)
/// eigenspace of eigenvalue 2*root:
///
///   sigma = <a,a> b - <a,b> a + root [a,b]
///
/// The result satisfies [a, sigma] = 2 root sigma, <sigma,sigma> = 0 and
/// <a,sigma> = 0.  Throws RootMismatch when root^2 differs from <a,a>/2,
/// DegenerateDirection when the projection vanishes (b lies in the
/// complementary invariant subspace).
Sl2Element ad_eigenvector(const Sl2Element& a, const Sl2Element& b, Complex root);

/// True iff all nonzero elements share a common eigenvector within tol.
/// Candidate eigenvectors come from the first nonzero element; an element
/// list with at most one nonzero member is trivially triangularizable.
bool simultaneously_triangularizable(std::span<const Sl2Element> elements,
                                     double tol = 1e-9);

}  // namespace schlesinger
