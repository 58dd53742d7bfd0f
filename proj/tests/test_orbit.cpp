#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "schlesinger/orbit.hpp"
#include "schlesinger/sampling.hpp"

using namespace schlesinger;

TEST_CASE("point construction stores the casimir and validates the root") {
  const Sl2Element a{1.0, 1.0, 0.0};  // casimir 2, roots +-1
  const OrbitPoint pt = make_orbit_point(a, 1.0);
  CHECK(std::abs(pt.casimir - 2.0) < 1e-15);
  CHECK(quadric_residual(pt) < 1e-15);
  CHECK_FALSE(pt.on_divisor());
  CHECK_THROWS_AS(make_orbit_point(a, 1.1), RootMismatch);
  CHECK_THROWS_AS(make_orbit_point(a, -1.0 + 1e-4), RootMismatch);
  CHECK_NOTHROW(make_orbit_point(a, -1.0));
  CHECK_THROWS_AS(make_orbit_point(Sl2Element{}, 0.0), MissingDirection);
}

TEST_CASE("divisor points: cone membership and zero root") {
  const std::array<Complex, 3> ray{1.0, -4.0, 2.0};  // 1*(-4) + 4 = 0
  const OrbitPoint pt = make_orbit_point(Sl2Element{}, ray, 0.0);
  CHECK(pt.on_divisor());
  CHECK(pt.casimir == Complex{});
  CHECK(pt.root == Complex{});
  CHECK_THROWS_AS(make_orbit_point(Sl2Element{}, ray, 0.5), RootMismatch);
  const std::array<Complex, 3> off{1.0, 1.0, 1.0};
  CHECK_THROWS_AS(make_orbit_point(Sl2Element{}, off, 0.0), ConeViolation);
}

TEST_CASE("explicit projective triple must be parallel to the affine part") {
  const Sl2Element a{1.0, 1.0, 0.0};
  CHECK_NOTHROW(make_orbit_point(a, {2.0, 2.0, 0.0}, 1.0));
  CHECK_THROWS_AS(make_orbit_point(a, {1.0, 2.0, 0.0}, 1.0), ValidationError);
}

TEST_CASE("projective normalization pivots on the first max-modulus entry") {
  const auto n1 = normalize_projective({2.0, Complex{0.0, 4.0}, 1.0});
  CHECK(std::abs(n1[1] - 1.0) < 1e-15);
  CHECK(std::abs(n1[0] - Complex{0.0, -0.5}) < 1e-15);
  CHECK(std::abs(n1[2] - Complex{0.0, -0.25}) < 1e-15);
  const auto n2 = normalize_projective({1.0, -1.0, 0.0});  // tie: first wins
  CHECK(std::abs(n2[0] - 1.0) < 1e-15);
  CHECK(std::abs(n2[1] + 1.0) < 1e-15);
  CHECK_THROWS_AS(normalize_projective({0.0, 0.0, 0.0}), DegenerateDirection);
}

TEST_CASE("conjugation keeps the point on its quadric") {
  Rng rng(31);
  for (int s = 0; s < 100; ++s) {
    const OrbitPoint pt = random_orbit_point(rng);
    const GroupElement g = random_group_element(rng);
    const OrbitPoint ct = conjugate(g, pt);
    CHECK(oracle::rel(ct.casimir, pt.casimir) < 1e-10);
    CHECK(oracle::rel(ct.root, pt.root) < 1e-10);
    CHECK(quadric_residual(ct) < 1e-12 * (1.0 + std::abs(ct.casimir)));
    // The projective triple stays the affine ray.
    const auto& x = ct.projective;
    const Sl2Element dir{x[0], x[1], x[2]};
    CHECK(norm_max(bracket(dir, ct.affine)) < 1e-9 * norm_max(ct.affine));
  }
  // Divisor points stay on the divisor.
  const OrbitPoint d = random_divisor_point(rng);
  const GroupElement g = random_group_element(rng);
  const OrbitPoint cd = conjugate(g, d);
  CHECK(cd.on_divisor());
  CHECK(std::abs(cd.projective[0] * cd.projective[1] +
                 cd.projective[2] * cd.projective[2]) < 1e-10);
}

TEST_CASE("chart parametrization lands on the quadric in both charts") {
  oracle::Stream st(32);
  for (int s = 0; s < 100; ++s) {
    const Complex p = st.cplx(), q = st.cplx(), root = st.cplx();
    for (ChartId id : {ChartId::primary, ChartId::secondary}) {
      const auto x = chart_point_entries<Complex>(id, p, q, root);
      CHECK(std::abs(x[0] * x[1] + x[2] * x[2] - root * root) <
            1e-13 * (1.0 + std::abs(root * root)));
    }
  }
}

TEST_CASE("to_chart inverts from_chart") {
  oracle::Stream st(33);
  for (int s = 0; s < 200; ++s) {
    const Complex p = st.cplx(), q = st.cplx(), root = st.cplx();
    for (ChartId id : {ChartId::primary, ChartId::secondary}) {
      ChartCoords c{id, p, q};
      OrbitPoint pt;
      try {
        pt = from_chart(c, root);
      } catch (const MissingDirection&) {
        continue;  // q = 0 with nonzero p*root can leave the quadric cone
      }
      ChartCoords back;
      try {
        back = to_chart(pt, id);
      } catch (const ChartSingular&) {
        continue;
      }
      const double tol = 1e-9 * (1.0 + std::abs(p) + std::abs(q));
      CHECK(std::abs(back.p - p) < tol);
      CHECK(std::abs(back.q - q) < tol);
    }
  }
}

TEST_CASE("chart fallback covers a vanishing primary denominator") {
  // X1 = 0, X3 = root: p comes from the fallback -X2/(X3 + root), q = 0.
  const Complex root{1.0, 0.5};
  const Sl2Element a{0.0, 3.0, root};
  const OrbitPoint pt = make_orbit_point(a, root);
  const ChartCoords c = to_chart(pt, ChartId::primary);
  CHECK(std::abs(c.q) < 1e-15);
  CHECK(std::abs(c.p - (-3.0 / (2.0 * root))) < 1e-14);
  const OrbitPoint again = from_chart(c, root);
  CHECK(norm_max(again.affine - a) < 1e-13);
}

TEST_CASE("transition hand value and involution") {
  const Complex root{0.7, -0.2};
  const ChartCoords c{ChartId::primary, 1.0, 0.0};
  const ChartCoords t = transition(c, root);
  CHECK(t.chart == ChartId::secondary);
  CHECK(std::abs(t.p - 1.0) < 1e-15);
  CHECK(std::abs(t.q - (-2.0 * root)) < 1e-15);

  oracle::Stream st(34);
  for (int s = 0; s < 100; ++s) {
    const ChartCoords c2{ChartId::secondary, st.cplx() + Complex{2.0, 0.0},
                         st.cplx()};
    const ChartCoords round = transition(transition(c2, root), root);
    CHECK(std::abs(round.p - c2.p) < 1e-12);
    CHECK(std::abs(round.q - c2.q) < 1e-12 * (1.0 + std::abs(c2.q)));
    CHECK(round.chart == c2.chart);
  }
  CHECK_THROWS_AS(transition(ChartCoords{ChartId::primary, 0.0, 1.0}, root),
                  ChartSingular);
}

TEST_CASE("transition agrees with changing charts through the point") {
  Rng rng(35);
  for (int s = 0; s < 100; ++s) {
    const OrbitPoint pt = random_orbit_point(rng);
    ChartCoords c1, c2;
    try {
      c1 = to_chart(pt, ChartId::primary);
      c2 = to_chart(pt, ChartId::secondary);
    } catch (const ChartSingular&) {
      continue;
    }
    if (std::abs(c1.p) < 1e-3) continue;
    const ChartCoords t = transition(c1, pt.root);
    CHECK(std::abs(t.p - c2.p) < 1e-9 * (1.0 + std::abs(c2.p)));
    CHECK(std::abs(t.q - c2.q) < 1e-9 * (1.0 + std::abs(c2.q)));
  }
}

TEST_CASE("divisor chart coordinates follow the blow-up ratios") {
  const Complex t{0.8, 0.3};
  const std::array<Complex, 3> ray{1.0, -t * t, t};
  const OrbitPoint pt = make_orbit_point(Sl2Element{}, ray, 0.0);
  const ChartCoords c = to_chart(pt, ChartId::primary);
  CHECK(std::abs(c.p - t) < 1e-14);
  CHECK(c.q == Complex{});
  const OrbitPoint back = from_chart(c, Complex{});
  CHECK(back.on_divisor());
  // Same ray up to normalization.
  const auto& x = back.projective;
  CHECK(std::abs(x[0] * ray[1] - x[1] * ray[0]) < 1e-12);
  CHECK(std::abs(x[0] * ray[2] - x[2] * ray[0]) < 1e-12);
}

TEST_CASE("orbit form: hand value, antisymmetry, bilinearity") {
  // At (1, 1, 0), root 1: u, v tangent; omega = (u3 v1 - v3 u1)/X1 = -1.
  const OrbitPoint pt = make_orbit_point(Sl2Element{1.0, 1.0, 0.0}, 1.0);
  const OrbitTangent u{1.0, -1.0, 0.0};
  const OrbitTangent v{0.0, 0.0, 1.0};
  CHECK(std::abs(omega(pt, u, v) - (-1.0)) < 1e-14);
  CHECK(std::abs(omega(pt, v, u) - 1.0) < 1e-14);

  Rng rng(36);
  for (int s = 0; s < 100; ++s) {
    const OrbitPoint p2 = random_orbit_point(rng);
    const OrbitTangent a = random_quadric_tangent(rng, p2);
    const OrbitTangent b = random_quadric_tangent(rng, p2);
    const Complex w = omega(p2, a, b);
    CHECK(std::abs(w + omega(p2, b, a)) < 1e-11 * (1.0 + std::abs(w)));
    const Complex lam = rng.cgauss();
    const OrbitTangent ab{a.d1 + lam * b.d1, a.d2 + lam * b.d2,
                          a.d3 + lam * b.d3};
    const Complex lin = omega(p2, ab, b);
    CHECK(std::abs(lin - w) < 1e-10 * (1.0 + std::abs(w) + std::abs(lam)));
  }
}

TEST_CASE("the four form representations agree where all are regular") {
  Rng rng(37);
  int used = 0;
  while (used < 50) {
    const OrbitPoint pt = random_orbit_point(rng);
    const auto& a = pt.affine;
    const Complex r = pt.root;
    const double scale = std::max({1.0, norm_max(a), std::abs(r)});
    const double floor = 0.3 * scale;
    if (std::abs(a.x1) < floor || std::abs(a.x2) < floor ||
        std::abs(r - a.x3) < floor || std::abs(r + a.x3) < floor) {
      continue;
    }
    ++used;
    const OrbitTangent u = random_quadric_tangent(rng, pt);
    const OrbitTangent v = random_quadric_tangent(rng, pt);
    const Complex rep1 = (u.d3 * v.d1 - v.d3 * u.d1) / a.x1;
    const Complex rep2 = -(u.d3 * v.d2 - v.d3 * u.d2) / a.x2;
    const Complex den3 = r - a.x3, den4 = r + a.x3;
    const Complex rep3 = ((u.d2 * den3 + a.x2 * u.d3) * v.d1 -
                          (v.d2 * den3 + a.x2 * v.d3) * u.d1) /
                         (den3 * den3);
    const Complex rep4 = ((u.d1 * den4 - a.x1 * u.d3) * v.d2 -
                          (v.d1 * den4 - a.x1 * v.d3) * u.d2) /
                         (den4 * den4);
    const Complex w = omega(pt, u, v);
    const double tol = 1e-10 * (1.0 + std::abs(w));
    CHECK(std::abs(rep1 - w) < tol);
    CHECK(std::abs(rep2 - w) < tol);
    CHECK(std::abs(rep3 - w) < tol);
    CHECK(std::abs(rep4 - w) < tol);
  }
}

TEST_CASE("affine form overload is singular on the divisor") {
  Rng rng(38);
  const OrbitPoint d = random_divisor_point(rng);
  CHECK_THROWS_AS(omega(d, OrbitTangent{1.0, 0.0, 0.0}, OrbitTangent{0.0, 1.0, 0.0}),
                  FormSingular);
}

TEST_CASE("chart tangents: dp ^ dq and the pushforward match the affine form") {
  Rng rng(39);
  for (int s = 0; s < 100; ++s) {
    const OrbitPoint pt = random_orbit_point(rng);
    ChartCoords c;
    try {
      c = to_chart(pt, ChartId::primary);
    } catch (const ChartSingular&) {
      continue;
    }
    const Complex up = rng.cgauss(), uq = rng.cgauss();
    const Complex vp = rng.cgauss(), vq = rng.cgauss();
    const ChartTangent cu{ChartId::primary, up, uq};
    const ChartTangent cv{ChartId::primary, vp, vq};
    const Complex chart_val = omega(pt, cu, cv);
    CHECK(std::abs(chart_val - (up * vq - uq * vp)) < 1e-14);
    const OrbitTangent au = push_chart_tangent(c, pt.root, up, uq);
    const OrbitTangent av = push_chart_tangent(c, pt.root, vp, vq);
    Complex affine_val;
    try {
      affine_val = omega(pt, au, av);
    } catch (const FormSingular&) {
      continue;
    }
    CHECK(std::abs(affine_val - chart_val) < 1e-8 * (1.0 + std::abs(chart_val)));
  }
}

TEST_CASE("charts are symplectic everywhere, including the cone and divisor") {
  oracle::Stream st(40);
  for (int s = 0; s < 100; ++s) {
    const Complex p = st.cplx(), q = st.cplx(), root = st.cplx();
    for (ChartId id : {ChartId::primary, ChartId::secondary}) {
      CHECK(chart_omega_check(ChartCoords{id, p, q}, root) < 1e-8);
      CHECK(chart_omega_check(ChartCoords{id, p, q}, Complex{}) < 1e-8);
      CHECK(chart_omega_check(ChartCoords{id, p, Complex{}}, Complex{}) < 1e-8);
    }
  }
}
