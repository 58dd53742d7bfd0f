#pragma once

#include <cstdint>
#include <random>

#include "schlesinger/reduction.hpp"

namespace schlesinger {

/// Deterministic random source.  Every distribution is derived by hand from
/// the raw mt19937_64 stream (std:: distributions are implementation-defined
/// and would break cross-platform reproducibility of seeded reports).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal via Box-Muller on the uniform stream.
  double gauss();
  /// Independent N(0,1) real and imaginary parts.
  Complex cgauss();
  /// Uniform integer in [0, bound).
  std::uint64_t integer(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

Sl2Element random_sl2(Rng& rng);

/// Random determinant-one matrix (entries resampled until well-conditioned).
GroupElement random_group_element(Rng& rng);

/// Square root of `square` with a randomly chosen branch.
Complex random_root(Rng& rng, Complex square);

/// Generic point: random affine part away from the cone, random branch.
OrbitPoint random_orbit_point(Rng& rng);

/// Random point on the quadric of the given root (chart parametrization).
OrbitPoint random_orbit_point_with_root(Rng& rng, Complex root);

/// Random point of the exceptional divisor.
OrbitPoint random_divisor_point(Rng& rng);

/// Random tangent to the quadric at pt (exact tangency, unit-scale entries).
OrbitTangent random_quadric_tangent(Rng& rng, const OrbitPoint& pt);

/// Random configuration with distinct well-separated poles near 0..n.
/// divisor_slot in 1..n forces that point onto the divisor; -1 for none.
Configuration random_configuration(Rng& rng, int n, int divisor_slot = -1);

/// Random reduced point with generic factors (optionally one on the divisor).
ReducedPoint random_reduced_point(Rng& rng, int n, bool divisor_factor = false);

}  // namespace schlesinger
