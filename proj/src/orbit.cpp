#include "schlesinger/orbit.hpp"

#include <cmath>

#include "schlesinger/dual.hpp"

namespace schlesinger {

std::array<Complex, 3> normalize_projective(const std::array<Complex, 3>& x) {
  int best = 0;
  double mod = std::abs(x[0]);
  for (int i = 1; i < 3; ++i) {
    if (std::abs(x[i]) > mod) {
      mod = std::abs(x[i]);
      best = i;
    }
  }
  if (mod == 0.0) throw DegenerateDirection("zero projective triple");
  const Complex pivot = x[best];
  return {x[0] / pivot, x[1] / pivot, x[2] / pivot};
}

namespace {

void check_root(Complex root, Complex cas) {
  const double scale = std::max(1.0, std::abs(cas));
  if (std::abs(root * root - 0.5 * cas) > 1e-10 * scale) {
    throw RootMismatch("root^2 must equal casimir/2");
  }
}

}  // namespace

OrbitPoint make_orbit_point(const Sl2Element& affine, Complex root) {
  if (is_zero(affine)) {
    throw MissingDirection("divisor point needs an explicit projective direction");
  }
  OrbitPoint pt;
  pt.affine = affine;
  pt.casimir = casimir(affine);
  check_root(root, pt.casimir);
  pt.root = root;
  pt.projective = normalize_projective({affine.x1, affine.x2, affine.x3});
  return pt;
}

OrbitPoint make_orbit_point(const Sl2Element& affine,
                            const std::array<Complex, 3>& projective,
                            Complex root) {
  if (is_zero(affine)) {
    if (std::abs(root) > 1e-12) {
      throw RootMismatch("divisor points carry root = 0");
    }
    OrbitPoint pt;
    pt.affine = affine;
    pt.casimir = Complex{};
    pt.root = Complex{};
    pt.projective = normalize_projective(projective);
    const auto& x = pt.projective;
    if (std::abs(x[0] * x[1] + x[2] * x[2]) > 1e-10) {
      throw ConeViolation("projective direction is off the cone x1 x2 + x3^2 = 0");
    }
    return pt;
  }
  // Off the divisor the triple must be the affine ray.
  const std::array<Complex, 3> a{affine.x1, affine.x2, affine.x3};
  const double na = norm_max(affine);
  double np = std::max({std::abs(projective[0]), std::abs(projective[1]),
                        std::abs(projective[2])});
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(a[i] * projective[j] - a[j] * projective[i]) > 1e-9 * na * np) {
        throw ValidationError("projective triple is not parallel to the affine part");
      }
    }
  }
  return make_orbit_point(affine, root);
}

double quadric_residual(const OrbitPoint& pt) {
  const auto& a = pt.affine;
  return std::abs(a.x1 * a.x2 + a.x3 * a.x3 - pt.root * pt.root);
}

OrbitPoint conjugate(const GroupElement& g, const OrbitPoint& pt) {
  const Sl2Element pr{pt.projective[0], pt.projective[1], pt.projective[2]};
  const Sl2Element pr_g = conjugate(g, pr);
  if (pt.on_divisor()) {
    return make_orbit_point(Sl2Element{}, {pr_g.x1, pr_g.x2, pr_g.x3}, Complex{});
  }
  // The casimir is invariant in exact arithmetic only; realign the root with
  // the rounded casimir of the conjugated element, keeping its branch.
  const Sl2Element aff_g = conjugate(g, pt.affine);
  const Complex fresh = std::sqrt(0.5 * casimir(aff_g));
  const Complex root =
      std::abs(fresh - pt.root) <= std::abs(fresh + pt.root) ? fresh : -fresh;
  return make_orbit_point(aff_g, {pr_g.x1, pr_g.x2, pr_g.x3}, root);
}

namespace {

// Larger-denominator choice between two ratio representations p = num/den.
Complex best_ratio(Complex num1, Complex den1, Complex num2, Complex den2,
                   double threshold) {
  if (std::abs(den1) >= std::abs(den2)) {
    if (std::abs(den1) <= threshold) throw ChartSingular("chart denominators vanish");
    return num1 / den1;
  }
  if (std::abs(den2) <= threshold) throw ChartSingular("chart denominators vanish");
  return num2 / den2;
}

}  // namespace

ChartCoords to_chart(const OrbitPoint& pt, ChartId chart) {
  ChartCoords c;
  c.chart = chart;
  if (pt.on_divisor()) {
    // Ratios of the projective triple; q = 0 on the exceptional curve.
    const auto& x = pt.projective;
    c.q = Complex{};
    if (chart == ChartId::primary) {
      c.p = best_ratio(x[2], x[0], -x[1], x[2], 1e-12);
    } else {
      c.p = best_ratio(x[0], x[2], -x[2], x[1], 1e-12);
    }
    return c;
  }
  const auto& a = pt.affine;
  const Complex root = pt.root;
  const double threshold =
      1e-12 * std::max({1.0, norm_max(a), std::abs(root)});
  if (chart == ChartId::primary) {
    c.q = a.x1;
    c.p = best_ratio(a.x3 - root, a.x1, -a.x2, a.x3 + root, threshold);
  } else {
    c.q = a.x2;
    c.p = best_ratio(a.x1, a.x3 - root, -(a.x3 + root), a.x2, threshold);
  }
  return c;
}

OrbitPoint from_chart(const ChartCoords& c, Complex root) {
  const auto x = chart_point_entries<Complex>(c.chart, c.p, c.q, root);
  const Sl2Element affine{x[0], x[1], x[2]};
  if (c.q == Complex{} && root == Complex{}) {
    // Blow-up divisor: affine part vanishes identically, direction from p.
    const std::array<Complex, 3> dir =
        c.chart == ChartId::primary
            ? std::array<Complex, 3>{1.0, -c.p * c.p, c.p}
            : std::array<Complex, 3>{-c.p * c.p, 1.0, -c.p};
    return make_orbit_point(Sl2Element{}, dir, Complex{});
  }
  return make_orbit_point(affine, root);
}

ChartCoords transition(const ChartCoords& c, Complex root) {
  // 1/p must stay representable; treat vanishing p as off-domain.
  if (std::abs(c.p) < 1e-150) {
    throw ChartSingular("transition undefined at p = 0");
  }
  ChartCoords out;
  out.chart = other_chart(c.chart);
  out.p = 1.0 / c.p;
  out.q = -c.p * (c.p * c.q + 2.0 * root);
  return out;
}

OrbitTangent push_chart_tangent(const ChartCoords& at, Complex root,
                                Complex dp, Complex dq) {
  const Complex p = at.p, q = at.q;
  OrbitTangent t;
  if (at.chart == ChartId::primary) {
    // X = (q, -p^2 q - 2 p root, p q + root)
    t.d1 = dq;
    t.d2 = dp * (-2.0 * p * q - 2.0 * root) + dq * (-p * p);
    t.d3 = dp * q + dq * p;
  } else {
    // X = (-p^2 q - 2 p root, q, -p q - root)
    t.d1 = dp * (-2.0 * p * q - 2.0 * root) + dq * (-p * p);
    t.d2 = dq;
    t.d3 = -dp * q - dq * p;
  }
  return t;
}

Complex omega(const OrbitPoint& pt, const OrbitTangent& u, const OrbitTangent& v) {
  if (pt.on_divisor()) {
    throw FormSingular("affine representations degenerate on the divisor");
  }
  const auto& a = pt.affine;
  const Complex root = pt.root;
  const double scale = std::max({1.0, norm_max(a), std::abs(root)});

  const Complex dens[4] = {a.x1, a.x2, root - a.x3, root + a.x3};
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (std::abs(dens[i]) > std::abs(dens[best])) best = i;
  }
  if (std::abs(dens[best]) <= 1e-12 * scale) {
    throw FormSingular("all form representations are singular here");
  }
  switch (best) {
    case 0:
      return (u.d3 * v.d1 - v.d3 * u.d1) / a.x1;
    case 1:
      return -(u.d3 * v.d2 - v.d3 * u.d2) / a.x2;
    case 2: {
      // d(X2/(root - X3)) ^ dX1
      const Complex den = root - a.x3;
      const Complex dfu = (u.d2 * den + a.x2 * u.d3) / (den * den);
      const Complex dfv = (v.d2 * den + a.x2 * v.d3) / (den * den);
      return dfu * v.d1 - dfv * u.d1;
    }
    default: {
      // d(X1/(root + X3)) ^ dX2
      const Complex den = root + a.x3;
      const Complex dgu = (u.d1 * den - a.x1 * u.d3) / (den * den);
      const Complex dgv = (v.d1 * den - a.x1 * v.d3) / (den * den);
      return dgu * v.d2 - dgv * u.d2;
    }
  }
}

Complex omega(const OrbitPoint& pt, const ChartTangent& u, const ChartTangent& v) {
  (void)pt;
  if (u.chart != v.chart) {
    throw ValidationError("chart tangents must live in the same chart");
  }
  return u.dp * v.dq - u.dq * v.dp;
}

double chart_omega_check(const ChartCoords& c, Complex root) {
  const OrbitPoint pt = from_chart(c, root);
  if (!pt.on_divisor()) {
    const OrbitTangent u = push_chart_tangent(c, root, 1.0, 0.0);
    const OrbitTangent v = push_chart_tangent(c, root, 0.0, 1.0);
    return std::abs(omega(pt, u, v) - 1.0);
  }
  // Exceptional curve: the chart coordinates are (ratio, X-coordinate) of the
  // blow-up, so the form evaluates through the ratio of the direction triple.
  const Dual pd{c.p, 1.0};
  Dual ratio;
  if (c.chart == ChartId::primary) {
    const Dual x1{1.0}, x3 = pd;
    ratio = x3 / x1;
  } else {
    const Dual x2{1.0}, x3 = -pd;
    ratio = -x3 / x2;  // x1/x3 = (-p^2)/(-p) = p, computed via cone relation
  }
  return std::abs(ratio.d - 1.0);
}

}  // namespace schlesinger
