#include "schlesinger/sl2.hpp"

#include <array>
#include <vector>

namespace schlesinger {

GroupElement make_group_element(Complex g11, Complex g12, Complex g21, Complex g22) {
  GroupElement g{g11, g12, g21, g22};
  const double scale = std::max({1.0, std::abs(g11) * std::abs(g22),
                                 std::abs(g12) * std::abs(g21)});
  if (std::abs(g.det() - 1.0) > 1e-12 * scale) {
    throw ValidationError("group element must have determinant 1");
  }
  return g;
}

Sl2Element conjugate(const GroupElement& g, const Sl2Element& a) {
  // Expand g A g^{-1} with A = [[x3,x1],[x2,-x3]] and g^{-1} = [[g22,-g12],[-g21,g11]].
  const Complex m11 = g.g11 * a.x3 + g.g12 * a.x2;
  const Complex m12 = g.g11 * a.x1 - g.g12 * a.x3;
  const Complex m21 = g.g21 * a.x3 + g.g22 * a.x2;
  const Complex m22 = g.g21 * a.x1 - g.g22 * a.x3;
  Sl2Element r;
  r.x3 = m11 * g.g22 - m12 * g.g21;
  r.x1 = -m11 * g.g12 + m12 * g.g11;
  r.x2 = m21 * g.g22 - m22 * g.g21;
  return r;
}

Sl2Element ad_eigenvector(const Sl2Element& a, const Sl2Element& b, Complex root) {
  const Complex ca = casimir(a);
  const double root_scale = std::max(1.0, std::abs(ca));
  if (std::abs(root * root - 0.5 * ca) > 1e-10 * root_scale) {
    throw RootMismatch("root^2 must equal <a,a>/2");
  }
  const Sl2Element sigma =
      ca * b - killing(a, b) * a + root * bracket(a, b);
  const double na = norm_max(a);
  const double nb = norm_max(b);
  if (norm_max(sigma) <= 1e-12 * std::max(1.0, na * na * nb)) {
    throw DegenerateDirection("ad eigenprojection vanished");
  }
  return sigma;
}

namespace {

// Row-built eigenvector candidates of [[x3,x1],[x2,-x3]] for eigenvalue mu:
// (x1, mu - x3) and (mu + x3, x2); the larger one is numerically reliable.
std::array<Complex, 2> eigvec_for(const Sl2Element& a, Complex mu) {
  const std::array<Complex, 2> v1{a.x1, mu - a.x3};
  const std::array<Complex, 2> v2{mu + a.x3, a.x2};
  const double n1 = std::max(std::abs(v1[0]), std::abs(v1[1]));
  const double n2 = std::max(std::abs(v2[0]), std::abs(v2[1]));
  return n1 >= n2 ? v1 : v2;
}

// |cross(A v, v)| scaled by ||A|| ||v||^2: zero iff v is an eigenvector.
double eigen_residual(const Sl2Element& a, const std::array<Complex, 2>& v) {
  const Complex w1 = a.x3 * v[0] + a.x1 * v[1];
  const Complex w2 = a.x2 * v[0] - a.x3 * v[1];
  const Complex cross = w1 * v[1] - w2 * v[0];
  const double nv = std::max(std::abs(v[0]), std::abs(v[1]));
  const double scale = std::max(norm_max(a) * nv * nv, 1e-300);
  return std::abs(cross) / scale;
}

}  // namespace

bool simultaneously_triangularizable(std::span<const Sl2Element> elements, double tol) {
  const Sl2Element* ref = nullptr;
  for (const auto& a : elements) {
    if (norm_max(a) > 0.0) {
      ref = &a;
      break;
    }
  }
  if (ref == nullptr) return true;  // all zero

  const Complex mu = std::sqrt(ref->x3 * ref->x3 + ref->x1 * ref->x2);
  std::vector<std::array<Complex, 2>> candidates;
  candidates.push_back(eigvec_for(*ref, mu));
  if (std::abs(mu) > 0.0) candidates.push_back(eigvec_for(*ref, -mu));

  for (const auto& v : candidates) {
    if (std::max(std::abs(v[0]), std::abs(v[1])) == 0.0) continue;
    bool common = true;
    for (const auto& a : elements) {
      if (norm_max(a) == 0.0) continue;  // zero commutes with everything
      if (eigen_residual(a, v) > tol) {
        common = false;
        break;
      }
    }
    if (common) return true;
  }
  return false;
}

}  // namespace schlesinger
