#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "oracle.hpp"
#include "schlesinger/flow.hpp"
#include "schlesinger/sampling.hpp"

using namespace schlesinger;

namespace {

Complex hamiltonian_oracle(const Configuration& c, int k) {
  Complex h{};
  for (int i = 0; i <= c.n(); ++i) {
    if (i == k) continue;
    h += killing(c.points[i].affine, c.points[k].affine) /
         (c.lambdas[k] - c.lambdas[i]);
  }
  return kHamiltonianSign * h;
}

}  // namespace

TEST_CASE("isomonodromic velocities match the commutator formula") {
  Rng rng(61);
  for (int s = 0; s < 30; ++s) {
    const Configuration c = random_configuration(rng, 4);
    const int k = static_cast<int>(rng.integer(5));
    const std::vector<Sl2Element> v = schlesinger_rhs(c, k);
    REQUIRE(v.size() == 5);

    Sl2Element sum{};
    double scale = 1.0;
    for (int j = 0; j <= 4; ++j) {
      sum += v[j];
      scale = std::max(scale, norm_max(v[j]));
      if (j == k) continue;
      const oracle::Mat2 mk = oracle::mat(c.points[k].affine);
      const oracle::Mat2 mj = oracle::mat(c.points[j].affine);
      const oracle::Mat2 comm =
          oracle::sub(oracle::mul(mk, mj), oracle::mul(mj, mk));
      const Complex coef = 1.0 / (c.lambdas[k] - c.lambdas[j]);
      const oracle::Mat2 want{coef * comm.a, coef * comm.b, coef * comm.c,
                              coef * comm.d};
      CHECK(oracle::dist(oracle::mat(v[j]), want) < 1e-11 * scale);
      // Tangency: each point stays on its own orbit.
      CHECK(std::abs(killing(c.points[j].affine, v[j])) <
            1e-11 * scale * norm_max(c.points[j].affine));
    }
    CHECK(norm_max(sum) < 1e-11 * scale);
    CHECK(std::abs(killing(c.points[k].affine, v[k])) <
          1e-10 * scale * norm_max(c.points[k].affine));
  }
}

TEST_CASE("hamiltonian equals the weighted pairing sum") {
  Rng rng(62);
  for (int s = 0; s < 30; ++s) {
    const Configuration c = random_configuration(rng, 3);
    for (int k = 0; k <= 3; ++k) {
      CHECK(oracle::rel(hamiltonian_k(c, k), hamiltonian_oracle(c, k)) < 1e-12);
    }
  }
}

TEST_CASE("hamiltonian refuses colliding poles") {
  Rng rng(63);
  Configuration c = random_configuration(rng, 3);
  c.lambdas[1] = c.lambdas[0];  // aggregate edit bypasses validation
  CHECK_THROWS_AS(hamiltonian_k(c, 0), PoleCollision);
}

TEST_CASE("integration bookkeeping: degenerate path and checkpoints") {
  Rng rng(64);
  const Configuration c = random_configuration(rng, 3);
  const int k = 1;

  FlowParams stay;
  stay.t_path = {c.lambdas[k]};
  const auto fixed = integrate(FlowState{c, k}, stay);
  REQUIRE(fixed.size() == 1);
  CHECK(norm_max(fixed[0].config.points[2].affine - c.points[2].affine) == 0.0);

  FlowParams leg;
  leg.t_path = {c.lambdas[k] + Complex{0.0, 0.1}};
  leg.checkpoints_per_segment = 4;
  const auto traj = integrate(FlowState{c, k}, leg);
  REQUIRE(traj.size() == 5);
  CHECK(std::abs(traj.back().t - leg.t_path[0]) < 1e-14);
  // Only lambda_k moves.
  CHECK(traj.back().config.lambdas[0] == c.lambdas[0]);
  CHECK(traj.back().config.lambdas[2] == c.lambdas[2]);
}

TEST_CASE("integration conserves casimirs and the moment on a short leg") {
  Rng rng(65);
  for (int s = 0; s < 10; ++s) {
    const Configuration c = random_configuration(rng, 4);
    const int k = static_cast<int>(rng.integer(5));
    FlowParams params;
    params.t_path = {c.lambdas[k] + Complex{0.05, 0.1}};
    params.checkpoints_per_segment = 2;
    const auto traj = integrate(FlowState{c, k}, params);
    const Configuration& fin = traj.back().config;
    double scale = 1.0;
    for (const auto& pt : c.points) scale = std::max(scale, norm_max(pt.affine));
    for (int i = 0; i <= 4; ++i) {
      CHECK(std::abs(casimir(fin.points[i].affine) - c.points[i].casimir) <
            1e-9 * scale * scale);
      // Trajectory points satisfy their own root invariant after realignment.
      CHECK(quadric_residual(fin.points[i]) < 1e-12 * scale * scale);
    }
    CHECK(moment_residual(fin.points) < 1e-10);
  }
}

TEST_CASE("integrating there and back returns the configuration") {
  Rng rng(66);
  const Configuration c = random_configuration(rng, 3);
  const int k = 0;
  FlowParams params;
  params.t_path = {c.lambdas[k] + Complex{0.0, 0.3}, c.lambdas[k]};
  params.tol_local = 1e-12;
  params.checkpoints_per_segment = 1;
  const auto traj = integrate(FlowState{c, k}, params);
  const Configuration& fin = traj.back().config;
  double scale = 1.0;
  for (const auto& pt : c.points) scale = std::max(scale, norm_max(pt.affine));
  for (int i = 0; i <= 3; ++i) {
    CHECK(norm_max(fin.points[i].affine - c.points[i].affine) < 1e-9 * scale);
  }
}

TEST_CASE("paths through another pole are rejected up front") {
  Rng rng(67);
  const Configuration c = random_configuration(rng, 3);
  FlowParams params;
  params.t_path = {c.lambdas[2]};  // aim straight at a fixed pole
  CHECK_THROWS_AS(integrate(FlowState{c, 0}, params), PoleCollision);
}

TEST_CASE("a floor on the step size surfaces as StepUnderflow") {
  Rng rng(68);
  const Configuration c = random_configuration(rng, 3);
  FlowParams params;
  params.t_path = {c.lambdas[0] + Complex{0.0, 0.2}};
  params.h_min = 0.5;  // larger than the initial step: controller cannot start
  CHECK_THROWS_AS(integrate(FlowState{c, 0}, params), StepUnderflow);
}

TEST_CASE("reduced hamiltonian equals the full hamiltonian of the lift") {
  Rng rng(69);
  for (int s = 0; s < 20; ++s) {
    const int n = 3 + static_cast<int>(rng.integer(3));
    const ReducedPoint r = random_reduced_point(rng, n);
    std::vector<Complex> lambdas;
    for (int i = 0; i <= n; ++i) {
      lambdas.emplace_back(static_cast<double>(i), 0.3 * rng.gauss());
    }
    const Configuration lifted{lift(r), lambdas};
    for (int k = 0; k <= n; ++k) {
      CHECK(oracle::rel(reduced_hamiltonian(r, lambdas, k),
                        hamiltonian_k(lifted, k)) < 1e-11);
    }
  }
}

TEST_CASE("reduced velocities are the symplectic gradient (finite differences)") {
  Rng rng(70);
  const double h = 1e-6;
  for (int s = 0; s < 10; ++s) {
    const int n = 3 + static_cast<int>(rng.integer(2));
    const ReducedPoint r = random_reduced_point(rng, n);
    std::vector<Complex> lambdas;
    for (int i = 0; i <= n; ++i) {
      lambdas.emplace_back(static_cast<double>(i), 0.2 * rng.gauss());
    }
    const int k = static_cast<int>(rng.integer(n + 1));
    const ReducedVelocity vel = reduced_rhs(r, lambdas, k);
    REQUIRE(vel.at.size() == r.factors.size());

    const auto slots = interior_slots(n, r.chart);
    for (std::size_t f = 0; f < r.factors.size(); ++f) {
      const ChartCoords at = vel.at[f];
      const Complex root = r.roots[slots[f]];
      auto ham_at = [&](Complex p, Complex q) {
        ReducedPoint moved = r;
        moved.factors[f] = from_chart(ChartCoords{at.chart, p, q}, root);
        return reduced_hamiltonian(moved, lambdas, k);
      };
      const Complex dh_dp = (ham_at(at.p + h, at.q) - ham_at(at.p - h, at.q)) /
                            (2.0 * h);
      const Complex dh_dq = (ham_at(at.p, at.q + h) - ham_at(at.p, at.q - h)) /
                            (2.0 * h);
      const double scale = 1.0 + std::max(std::abs(dh_dp), std::abs(dh_dq));
      CHECK(std::abs(vel.dq[f] - dh_dp) < 1e-5 * scale);
      CHECK(std::abs(vel.dp[f] + dh_dq) < 1e-5 * scale);
    }
  }
}

TEST_CASE("reduced and full integrations track each other") {
  Rng rng(71);
  for (int s = 0; s < 5; ++s) {
    const Configuration c = random_configuration(rng, 4);
    const int k = static_cast<int>(rng.integer(5));
    const ChartChoice choice = select_chart(c.points);
    const ReducedPoint r0 = reduce(c.points, choice.spec);

    FlowParams params;
    params.t_path = {c.lambdas[k] + Complex{0.0, 0.1}};
    params.checkpoints_per_segment = 1;
    const auto full = integrate(FlowState{c, k}, params);
    const auto red = integrate_reduced(r0, c.lambdas, k, params);
    REQUIRE(full.size() == red.size());

    // Reduce the full endpoint in the same chart, with the chart's reference
    // roots refreshed from the realigned trajectory points.
    ChartSpec spec = choice.spec;
    const auto& pts = full.back().config.points;
    spec.root0 = pts[0].root;
    spec.root_i = pts[spec.index_i].root;
    const ReducedPoint via_full = reduce(pts, spec);
    const ReducedPoint& via_reduced = red.back().point;
    for (std::size_t f = 0; f < via_full.factors.size(); ++f) {
      CHECK(oracle::rel(via_full.q(f), via_reduced.q(f)) < 1e-7);
      CHECK(oracle::rel(via_full.qp(f), via_reduced.qp(f)) < 1e-7);
      CHECK(oracle::rel(via_full.beta(f), via_reduced.beta(f)) < 1e-7);
    }
  }
}

TEST_CASE("form values restrict through the lift") {
  Rng rng(72);
  for (int s = 0; s < 20; ++s) {
    const int n = 3 + static_cast<int>(rng.integer(3));
    const ReducedPoint r = random_reduced_point(rng, n);
    std::vector<OrbitTangent> u, v;
    for (const OrbitPoint& f : r.factors) {
      u.push_back(random_quadric_tangent(rng, f));
      v.push_back(random_quadric_tangent(rng, f));
    }
    const FormAgreement fa = form_restriction_check(r, u, v);
    CHECK(fa.total_residual < 1e-8 * fa.scale);
    CHECK(fa.special_0 < 1e-9 * fa.scale);
    CHECK(fa.special_i < 1e-9 * fa.scale);
    CHECK(fa.special_j < 1e-9 * fa.scale);
  }
}

TEST_CASE("cross-validation of full and reduced flows on a short path") {
  Rng rng(73);
  for (int s = 0; s < 5; ++s) {
    const Configuration c = random_configuration(rng, 3);
    const int k = static_cast<int>(rng.integer(4));
    FlowParams params;
    params.t_path = {c.lambdas[k] + Complex{0.0, 0.2}};
    const CompareReport rep = compare_flows(c, k, params);
    CHECK(rep.checkpoints >= 8);
    CHECK(rep.sup_distance < 1e-7);
    CHECK(rep.invariant_mismatch < 1e-7);
  }
}
