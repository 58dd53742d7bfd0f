#pragma once

#include <complex>

namespace schlesinger {

/// Forward-mode dual number over std::complex<double>.  Arithmetic carries a
/// single directional derivative alongside the value; used to differentiate
/// the polynomial lift/chart formulas exactly (no finite differencing).
struct Dual {
  std::complex<double> v{};  ///< value
  std::complex<double> d{};  ///< directional derivative

  Dual() = default;
  Dual(double x) : v(x) {}                                    // NOLINT(google-explicit-constructor)
  Dual(std::complex<double> x) : v(x) {}                      // NOLINT(google-explicit-constructor)
  Dual(std::complex<double> x, std::complex<double> dx) : v(x), d(dx) {}
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

}  // namespace schlesinger
