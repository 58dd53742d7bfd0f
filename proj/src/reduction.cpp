#include "schlesinger/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace schlesinger {

double moment_residual(std::span<const OrbitPoint> points) {
  Sl2Element sum{};
  double scale = 1.0;
  for (const auto& pt : points) {
    sum += pt.affine;
    scale = std::max(scale, norm_max(pt.affine));
  }
  return norm_max(sum) / scale;
}

Configuration make_configuration(std::vector<OrbitPoint> points,
                                 std::vector<Complex> lambdas) {
  if (points.size() < 4) {
    throw ValidationError("configuration needs n >= 3 (at least four points)");
  }
  if (lambdas.size() != points.size()) {
    throw ValidationError("one pole position per point required");
  }
  if (moment_residual(points) > 1e-9) {
    throw ValidationError("moment constraint violated: points do not sum to zero");
  }
  double lambda_scale = 1.0;
  for (const auto& l : lambdas) lambda_scale = std::max(lambda_scale, std::abs(l));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    for (std::size_t j = i + 1; j < lambdas.size(); ++j) {
      if (std::abs(lambdas[i] - lambdas[j]) <= 1e-9 * lambda_scale) {
        throw ValidationError("pole positions must be pairwise distinct");
      }
    }
  }
  Configuration c;
  c.points = std::move(points);
  c.lambdas = std::move(lambdas);
  return c;
}

Configuration conjugate(const GroupElement& g, const Configuration& config) {
  std::vector<OrbitPoint> moved;
  moved.reserve(config.points.size());
  for (const OrbitPoint& pt : config.points) moved.push_back(conjugate(g, pt));
  return make_configuration(std::move(moved), config.lambdas);
}

InvariantTable invariants(std::span<const OrbitPoint> points) {
  InvariantTable t;
  t.n = static_cast<int>(points.size()) - 1;
  const int m = t.n + 1;
  t.pair.resize(m * m);
  t.triple.resize(m * m * m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      t.pair[i * m + k] = killing(points[i].affine, points[k].affine);
      const Sl2Element br = bracket(points[i].affine, points[k].affine);
      for (int l = 0; l < m; ++l) {
        t.triple[(i * m + k) * m + l] = killing(br, points[l].affine);
      }
    }
  }
  return t;
}

std::vector<int> interior_slots(int n, const ChartSpec& chart) {
  std::vector<int> slots;
  slots.reserve(n - 2);
  for (int idx = 1; idx <= n; ++idx) {
    if (idx != chart.index_i && idx != chart.index_j) slots.push_back(idx);
  }
  return slots;
}

namespace {

void validate_chart_indices(int n, const ChartSpec& chart) {
  if (chart.index_i < 1 || chart.index_i > n || chart.index_j < 1 ||
      chart.index_j > n || chart.index_i == chart.index_j) {
    throw ValidationError("chart indices must be distinct and in 1..n");
  }
}

void check_root_consistency(Complex stored, Complex expected, const char* what) {
  if (std::abs(stored - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
    throw ValidationError(std::string("chart root disagrees with the point's ") +
                          what);
  }
}

// Coordinates of an arbitrary element in the accompanying basis, ordered as
// the quadric chart stores them: (q, q', beta) = (<e,s->, <e,s+>, <e,s3>/2).
std::array<Complex, 3> basis_coords(const Sl2Element& e, const StandardBasis& b) {
  return {killing(e, b.sigma_minus), killing(e, b.sigma_plus),
          0.5 * killing(e, b.sigma_3)};
}

}  // namespace

ReducedPoint reduce(std::span<const OrbitPoint> points, const ChartSpec& chart) {
  const int n = static_cast<int>(points.size()) - 1;
  if (n < 3) throw ValidationError("need at least four points");
  validate_chart_indices(n, chart);
  check_root_consistency(chart.root0, points[0].root, "branch at index 0");
  check_root_consistency(chart.root_i, points[chart.index_i].root,
                         "branch at index_i");
  if (moment_residual(points) > 1e-9) {
    throw ValidationError("moment constraint violated");
  }

  std::vector<Sl2Element> affines(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) affines[i] = points[i].affine;
  if (simultaneously_triangularizable(affines)) {
    throw RestrictionViolated("configuration is simultaneously triangularizable");
  }

  const Sl2Element dir_minus = best_partner_direction(points, 0, -1);
  const Sl2Element dir_plus = best_partner_direction(points, chart.index_i, +1);
  const Sl2Element& a_ref = points[chart.index_j].affine;
  const StandardBasis basis = accompany(dir_minus, dir_plus, a_ref);

  ReducedPoint r;
  r.n = n;
  r.chart = chart;
  r.casimirs.resize(n + 1);
  r.roots.resize(n + 1);
  for (int idx = 0; idx <= n; ++idx) {
    r.casimirs[idx] = points[idx].casimir;
    r.roots[idx] = points[idx].root;
  }

  for (int slot : interior_slots(n, chart)) {
    const OrbitPoint& src = points[slot];
    if (src.on_divisor()) {
      const Sl2Element ray{src.projective[0], src.projective[1], src.projective[2]};
      const auto coords = basis_coords(ray, basis);
      r.factors.push_back(make_orbit_point(Sl2Element{}, coords, Complex{}));
    } else {
      const auto coords = basis_coords(src.affine, basis);
      r.factors.push_back(
          make_orbit_point(Sl2Element{coords[0], coords[1], coords[2]}, src.root));
    }
  }

  // The distinguished points must take their constrained normal forms.
  const auto c0 = basis_coords(points[0].affine, basis);
  const auto ci = basis_coords(points[chart.index_i].affine, basis);
  const auto cj = basis_coords(a_ref, basis);
  const double s0 = std::max(1.0, norm_max(points[0].affine) * norm_max(basis.sigma_minus));
  const double si = std::max(1.0, norm_max(points[chart.index_i].affine) *
                                      norm_max(basis.sigma_plus));
  const double sj = std::max(1.0, norm_max(a_ref) * norm_max(basis.sigma_minus));
  if (std::abs(c0[0]) > 1e-8 * s0 ||
      std::abs(c0[2] - chart.root0) > 1e-8 * std::max(1.0, std::abs(chart.root0)) ||
      std::abs(ci[1]) > 1e-8 * si ||
      std::abs(ci[2] - chart.root_i) > 1e-8 * std::max(1.0, std::abs(chart.root_i)) ||
      std::abs(cj[0] - 1.0) > 1e-8 * sj) {
    throw NumericError("normal form of the distinguished points degraded");
  }
  return r;
}

ReducedPoint reduce(const Configuration& config, const ChartSpec& chart) {
  return reduce(std::span<const OrbitPoint>(config.points), chart);
}

namespace {

void validate_reduced(const ReducedPoint& r) {
  if (r.n < 3) throw ValidationError("reduced point needs n >= 3");
  validate_chart_indices(r.n, r.chart);
  if (static_cast<int>(r.factors.size()) != r.n - 2 ||
      static_cast<int>(r.casimirs.size()) != r.n + 1 ||
      static_cast<int>(r.roots.size()) != r.n + 1) {
    throw ValidationError("reduced point has inconsistent sizes");
  }
  check_root_consistency(r.chart.root0, r.roots[0], "branch at index 0");
  check_root_consistency(r.chart.root_i, r.roots[r.chart.index_i],
                         "branch at index_i");
}

}  // namespace

std::vector<OrbitPoint> lift(const ReducedPoint& r) {
  validate_reduced(r);
  const int n = r.n;
  std::vector<Complex> beta(n - 2), q(n - 2), qp(n - 2);
  for (int m = 0; m < n - 2; ++m) {
    beta[m] = r.beta(m);
    q[m] = r.q(m);
    qp[m] = r.qp(m);
  }
  const auto entries = normal_form_entries<Complex>(
      n, r.chart, beta, q, qp, r.casimirs[r.chart.index_j]);

  const auto slots = interior_slots(n, r.chart);
  std::vector<OrbitPoint> out;
  out.reserve(n + 1);
  for (int idx = 0; idx <= n; ++idx) {
    const Sl2Element affine{entries[idx][0], entries[idx][1], entries[idx][2]};
    if (is_zero(affine)) {
      std::array<Complex, 3> dir;
      if (idx == 0) {
        dir = {0.0, 1.0, 0.0};  // lowering ray of the model basis
      } else if (idx == r.chart.index_i) {
        dir = {1.0, 0.0, 0.0};  // raising ray
      } else {
        const auto it = std::find(slots.begin(), slots.end(), idx);
        dir = r.factors[it - slots.begin()].projective;
      }
      out.push_back(make_orbit_point(affine, dir, r.roots[idx]));
    } else {
      out.push_back(make_orbit_point(affine, r.roots[idx]));
    }
  }
  return out;
}

Complex invariant_pair_value(int n, const ChartSpec& chart,
                             std::span<const Complex> beta,
                             std::span<const Complex> q,
                             std::span<const Complex> qp, Complex a_j, int i,
                             int k) {
  validate_chart_indices(n, chart);
  if (i < 0 || i > n || k < 0 || k > n) {
    throw ValidationError("invariant indices out of range");
  }
  const auto entries = normal_form_entries<Complex>(n, chart, beta, q, qp, a_j);
  return pair_invariant(entries[i], entries[k]);
}

Complex hamiltonian_value(const ReducedPoint& r, int i, int k) {
  validate_reduced(r);
  const int n = r.n;
  std::vector<Complex> beta(n - 2), q(n - 2), qp(n - 2);
  for (int m = 0; m < n - 2; ++m) {
    beta[m] = r.beta(m);
    q[m] = r.q(m);
    qp[m] = r.qp(m);
  }
  return invariant_pair_value(n, r.chart, beta, q, qp,
                              r.casimirs[r.chart.index_j], i, k);
}

std::array<Complex, 3> divisor_conic_coords(const OrbitPoint& pt,
                                            const Sl2Element& ref1,
                                            const Sl2Element& ref2) {
  if (!pt.on_divisor()) {
    throw ValidationError("conic coordinates are defined on the divisor only");
  }
  const double n1 = norm_max(ref1), n2 = norm_max(ref2);
  const std::array<Complex, 3> u{ref1.x1, ref1.x2, ref1.x3};
  const std::array<Complex, 3> v{ref2.x1, ref2.x2, ref2.x3};
  double cross = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      cross = std::max(cross, std::abs(u[i] * v[j] - u[j] * v[i]));
    }
  }
  if (cross <= 1e-12 * std::max(1.0, n1 * n2)) {
    throw DegenerateReference("reference elements are linearly dependent");
  }
  const Sl2Element ray{pt.projective[0], pt.projective[1], pt.projective[2]};
  return normalize_projective(
      {killing(ray, ref1), killing(ray, ref2), killing(ray, bracket(ref1, ref2))});
}

}  // namespace schlesinger
