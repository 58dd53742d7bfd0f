#pragma once

// Test-side reference implementations: full 2x2 matrices for checking the
// three-entry algebra against direct matrix arithmetic, plus a small
// deterministic value source independent of the library's samplers.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "schlesinger/sl2.hpp"

namespace oracle {

using schlesinger::Complex;
using schlesinger::GroupElement;
using schlesinger::Sl2Element;

struct Mat2 {
  Complex a, b, c, d;  // [[a, b], [c, d]]
};

inline Mat2 mat(const Sl2Element& x) { return {x.x3, x.x1, x.x2, -x.x3}; }
inline Mat2 mat(const GroupElement& g) { return {g.g11, g.g12, g.g21, g.g22}; }

inline Mat2 mul(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
inline Mat2 sub(const Mat2& x, const Mat2& y) {
  return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}
inline Complex trace(const Mat2& x) { return x.a + x.d; }
inline Complex det(const Mat2& x) { return x.a * x.d - x.b * x.c; }
inline Mat2 inverse(const Mat2& x) {
  const Complex dd = det(x);
  return {x.d / dd, -x.b / dd, -x.c / dd, x.a / dd};
}
inline double dist(const Mat2& x, const Mat2& y) {
  const Mat2 d = sub(x, y);
  return std::max({std::abs(d.a), std::abs(d.b), std::abs(d.c), std::abs(d.d)});
}
inline Sl2Element to_sl2(const Mat2& x) { return {x.b, x.c, x.a}; }

// splitmix64: deterministic scalar stream detached from the library Rng.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  double real() {  // roughly uniform in [-1, 1]
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * (2.0 / 9007199254740992.0) - 1.0;
  }
  Complex cplx() {
    const double re = real();
    return {re, real()};
  }
  Sl2Element elem() { return {cplx(), cplx(), cplx()}; }

 private:
  std::uint64_t state_;
};

inline double rel(Complex got, Complex want) {
  return std::abs(got - want) / (1.0 + std::max(std::abs(got), std::abs(want)));
}

}  // namespace oracle
