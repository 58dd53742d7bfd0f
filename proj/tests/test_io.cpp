#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "schlesinger/flow.hpp"
#include "schlesinger/io.hpp"
#include "schlesinger/sampling.hpp"

using namespace schlesinger;

TEST_CASE("complex literals") {
  CHECK(parse_complex("0.6") == Complex{0.6, 0.0});
  CHECK(parse_complex("-1.2+0.5i") == Complex{-1.2, 0.5});
  CHECK(parse_complex("2i") == Complex{0.0, 2.0});
  CHECK(parse_complex("i") == Complex{0.0, 1.0});
  CHECK(parse_complex("-i") == Complex{0.0, -1.0});
  CHECK(parse_complex("1-i") == Complex{1.0, -1.0});
  CHECK(parse_complex(" 3.5 - 2e-3i ") == Complex{3.5, -2e-3});
  CHECK_THROWS_AS(parse_complex(""), ParseError);
  CHECK_THROWS_AS(parse_complex("1+"), ParseError);
  CHECK_THROWS_AS(parse_complex("abc"), ParseError);
  CHECK_THROWS_AS(parse_complex("1+2j"), ParseError);

  const auto list = parse_complex_list("0.1+0i, 0.6i");
  REQUIRE(list.size() == 2);
  CHECK(list[0] == Complex{0.1, 0.0});
  CHECK(list[1] == Complex{0.0, 0.6});
}

TEST_CASE("complex json round trip") {
  oracle::Stream st(81);
  for (int s = 0; s < 50; ++s) {
    const Complex z = st.cplx();
    CHECK(complex_from_json(complex_to_json(z)) == z);
  }
  CHECK_THROWS_AS(complex_from_json(nlohmann::json::array({1.0})), ParseError);
}

TEST_CASE("instance json round trip preserves every field") {
  Rng rng(82);
  for (int s = 0; s < 20; ++s) {
    const int n = 3 + static_cast<int>(rng.integer(3));
    const Configuration c =
        random_configuration(rng, n, s % 4 == 0 ? 1 + (s % n) : -1);
    const auto j = instance_to_json(c, std::make_pair(1, 2));
    const InstanceData back = instance_from_json(j);
    REQUIRE(back.config.n() == n);
    REQUIRE(back.chart.has_value());
    CHECK(back.chart->first == 1);
    CHECK(back.chart->second == 2);
    for (int i = 0; i <= n; ++i) {
      CHECK(back.config.lambdas[i] == c.lambdas[i]);
      CHECK(back.config.points[i].affine.x1 == c.points[i].affine.x1);
      CHECK(back.config.points[i].affine.x2 == c.points[i].affine.x2);
      CHECK(back.config.points[i].affine.x3 == c.points[i].affine.x3);
      CHECK(back.config.points[i].root == c.points[i].root);
      CHECK(back.config.points[i].on_divisor() == c.points[i].on_divisor());
      if (c.points[i].on_divisor()) {
        CHECK(back.config.points[i].projective == c.points[i].projective);
      }
    }
  }
}

TEST_CASE("instance json validation failures") {
  Rng rng(83);
  const Configuration c = random_configuration(rng, 3);
  auto j = instance_to_json(c);

  auto missing = j;
  missing.erase("roots");
  CHECK_THROWS_AS(instance_from_json(missing), ParseError);

  auto short_roots = j;
  short_roots["roots"].erase(3);
  CHECK_THROWS_AS(instance_from_json(short_roots), ParseError);

  auto bad_point = j;
  bad_point["matrices"][0] = nlohmann::json::object();
  CHECK_THROWS_AS(instance_from_json(bad_point), ParseError);

  // Breaking the moment constraint trips configuration validation.
  auto moved = j;
  moved["matrices"][0]["affine"][0] = complex_to_json(Complex{100.0, 0.0});
  CHECK_THROWS_AS(instance_from_json(moved), ValidationError);

  CHECK_THROWS_AS(load_instance("/nonexistent/path.json"), ParseError);
}

TEST_CASE("reduced json round trip preserves every field") {
  Rng rng(84);
  for (int s = 0; s < 20; ++s) {
    const int n = 3 + static_cast<int>(rng.integer(3));
    const ReducedPoint r = random_reduced_point(rng, n, s % 3 == 0);
    std::vector<Complex> lambdas;
    for (int i = 0; i <= n; ++i) lambdas.emplace_back(i, 0.25 * rng.gauss());
    const auto j = reduced_to_json(r, lambdas, 0.375);
    const ReducedData back = reduced_from_json(j);
    CHECK(back.score == 0.375);
    REQUIRE(back.lambdas.has_value());
    CHECK(*back.lambdas == lambdas);
    CHECK(back.point.n == n);
    CHECK(back.point.chart.index_i == r.chart.index_i);
    CHECK(back.point.chart.index_j == r.chart.index_j);
    CHECK(back.point.chart.root0 == r.chart.root0);
    CHECK(back.point.chart.root_i == r.chart.root_i);
    REQUIRE(back.point.factors.size() == r.factors.size());
    for (std::size_t f = 0; f < r.factors.size(); ++f) {
      CHECK(back.point.factors[f].affine.x1 == r.factors[f].affine.x1);
      CHECK(back.point.factors[f].affine.x2 == r.factors[f].affine.x2);
      CHECK(back.point.factors[f].affine.x3 == r.factors[f].affine.x3);
      CHECK(back.point.factors[f].on_divisor() == r.factors[f].on_divisor());
    }
    CHECK(back.point.casimirs == r.casimirs);
    CHECK(back.point.roots == r.roots);
  }
}

TEST_CASE("reduced json validation failures") {
  Rng rng(85);
  const ReducedPoint r = random_reduced_point(rng, 4);
  auto j = reduced_to_json(r);

  auto bad_chart = j;
  bad_chart["chart"]["i"] = 0;
  CHECK_THROWS_AS(reduced_from_json(bad_chart), ParseError);

  auto same = j;
  same["chart"]["j"] = same["chart"]["i"];
  CHECK_THROWS_AS(reduced_from_json(same), ParseError);

  auto wrong_count = j;
  wrong_count["factors"].erase(0);
  CHECK_THROWS_AS(reduced_from_json(wrong_count), ParseError);
}

TEST_CASE("trajectory csv layout and determinism") {
  Rng rng(86);
  const Configuration c = random_configuration(rng, 3);
  FlowParams params;
  params.t_path = {c.lambdas[0] + Complex{0.0, 0.1}};
  params.checkpoints_per_segment = 3;
  const auto traj = integrate(FlowState{c, 0}, params);

  std::ostringstream s1, s2;
  write_trajectory_csv(s1, traj, 0);
  write_trajectory_csv(s2, traj, 0);
  CHECK(s1.str() == s2.str());

  std::istringstream lines(s1.str());
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header.rfind("t_re,t_im,", 0) == 0);
  CHECK(header.find("casimir_drift") != std::string::npos);
  CHECK(header.find("moment_residual") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 4);
  CHECK(s1.str().find('\r') == std::string::npos);

  // Reduced trajectories: same determinism contract.
  const ChartChoice choice = select_chart(c.points);
  const ReducedPoint r0 = reduce(c.points, choice.spec);
  const auto red = integrate_reduced(r0, c.lambdas, 0, params);
  std::ostringstream r1, r2;
  write_reduced_trajectory_csv(r1, red);
  write_reduced_trajectory_csv(r2, red);
  CHECK(r1.str() == r2.str());
  CHECK(r1.str().rfind("t_re,t_im,", 0) == 0);
}

TEST_CASE("file loading reports the failing path") {
  const char* path = "/tmp/schlesinger_io_test_malformed.json";
  {
    std::ofstream os(path);
    os << "{ not json";
  }
  CHECK_THROWS_AS(load_instance(path), ParseError);
  std::remove(path);
}
