#include "schlesinger/sampling.hpp"

#include <cmath>
#include <numbers>

namespace schlesinger {

double Rng::uniform() {
  return std::ldexp(static_cast<double>(engine_() >> 11), -53);
}

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Complex Rng::cgauss() {
  const double re = gauss();
  return {re, gauss()};
}

std::uint64_t Rng::integer(std::uint64_t bound) { return engine_() % bound; }

Sl2Element random_sl2(Rng& rng) {
  return {rng.cgauss(), rng.cgauss(), rng.cgauss()};
}

GroupElement random_group_element(Rng& rng) {
  for (;;) {
    const Complex g11 = rng.cgauss(), g12 = rng.cgauss();
    const Complex g21 = rng.cgauss(), g22 = rng.cgauss();
    const Complex det = g11 * g22 - g12 * g21;
    if (std::abs(det) < 0.1) continue;
    const Complex s = std::sqrt(det);
    return make_group_element(g11 / s, g12 / s, g21 / s, g22 / s);
  }
}

Complex random_root(Rng& rng, Complex square) {
  const Complex r = std::sqrt(square);
  return rng.uniform() < 0.5 ? r : -r;
}

OrbitPoint random_orbit_point(Rng& rng) {
  for (;;) {
    const Sl2Element a = random_sl2(rng);
    if (norm_max(a) < 0.3 || std::abs(casimir(a)) < 0.1) continue;
    return make_orbit_point(a, random_root(rng, 0.5 * casimir(a)));
  }
}

OrbitPoint random_orbit_point_with_root(Rng& rng, Complex root) {
  for (;;) {
    ChartCoords c;
    c.chart = rng.uniform() < 0.5 ? ChartId::primary : ChartId::secondary;
    c.p = rng.cgauss();
    c.q = rng.cgauss();
    if (std::abs(c.q) < 0.2) continue;
    return from_chart(c, root);
  }
}

OrbitPoint random_divisor_point(Rng& rng) {
  ChartCoords c;
  c.chart = rng.uniform() < 0.5 ? ChartId::primary : ChartId::secondary;
  c.p = rng.cgauss();
  c.q = Complex{};
  return from_chart(c, Complex{});
}

OrbitTangent random_quadric_tangent(Rng& rng, const OrbitPoint& pt) {
  if (pt.on_divisor()) {
    throw ValidationError("affine tangents degenerate on the divisor");
  }
  // Solve X2 d1 + X1 d2 + 2 X3 d3 = 0 for the best-conditioned component.
  const auto& a = pt.affine;
  const Complex coef[3] = {a.x2, a.x1, 2.0 * a.x3};
  int solve_for = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(coef[i]) > std::abs(coef[solve_for])) solve_for = i;
  }
  Complex d[3];
  for (int i = 0; i < 3; ++i) d[i] = rng.cgauss();
  Complex rhs{};
  for (int i = 0; i < 3; ++i) {
    if (i != solve_for) rhs += coef[i] * d[i];
  }
  d[solve_for] = -rhs / coef[solve_for];
  return {d[0], d[1], d[2]};
}

Configuration random_configuration(Rng& rng, int n, int divisor_slot) {
  if (divisor_slot == 0 || divisor_slot > n) {
    throw ValidationError("divisor slot must be -1 or in 1..n");
  }
  for (;;) {
    std::vector<Sl2Element> a(n + 1);
    for (int j = 1; j <= n; ++j) {
      a[j] = (divisor_slot == j) ? Sl2Element{} : random_sl2(rng);
    }
    Sl2Element sum{};
    for (int j = 1; j <= n; ++j) sum += a[j];
    a[0] = -sum;

    bool ok = true;
    std::vector<OrbitPoint> points(n + 1);
    for (int j = 0; j <= n && ok; ++j) {
      if (divisor_slot == j) {
        points[j] = random_divisor_point(rng);
        continue;
      }
      if (norm_max(a[j]) < 0.3 || std::abs(casimir(a[j])) < 0.1) {
        ok = false;
        break;
      }
      points[j] = make_orbit_point(a[j], random_root(rng, 0.5 * casimir(a[j])));
    }
    if (!ok) continue;
    if (simultaneously_triangularizable(a)) continue;

    std::vector<Complex> lambdas(n + 1);
    double min_gap = 1e30;
    for (int j = 0; j <= n; ++j) {
      lambdas[j] = Complex(double(j), 0.0) + 0.25 * rng.cgauss();
    }
    for (int i = 0; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        min_gap = std::min(min_gap, std::abs(lambdas[i] - lambdas[j]));
      }
    }
    if (min_gap < 0.3) continue;
    return make_configuration(std::move(points), std::move(lambdas));
  }
}

ReducedPoint random_reduced_point(Rng& rng, int n, bool divisor_factor) {
  ReducedPoint r;
  r.n = n;
  const int i = 1 + static_cast<int>(rng.integer(n));
  int j = i;
  while (j == i) j = 1 + static_cast<int>(rng.integer(n));
  r.chart.index_i = i;
  r.chart.index_j = j;

  r.casimirs.assign(n + 1, Complex{});
  r.roots.assign(n + 1, Complex{});
  auto set_root = [&](int idx, Complex root) {
    r.roots[idx] = root;
    r.casimirs[idx] = 2.0 * root * root;
  };
  for (int idx = 0; idx <= n; ++idx) {
    Complex root = rng.cgauss();
    while (std::abs(root) < 0.2) root = rng.cgauss();
    set_root(idx, root);
  }
  const auto slots = interior_slots(n, r.chart);
  const int divisor_at =
      divisor_factor ? static_cast<int>(rng.integer(slots.size())) : -1;
  for (std::size_t m = 0; m < slots.size(); ++m) {
    if (static_cast<int>(m) == divisor_at) {
      set_root(slots[m], Complex{});
      r.factors.push_back(random_divisor_point(rng));
    } else {
      r.factors.push_back(random_orbit_point_with_root(rng, r.roots[slots[m]]));
    }
  }
  r.chart.root0 = r.roots[0];
  r.chart.root_i = r.roots[i];
  return r;
}

}  // namespace schlesinger
