#include "schlesinger/basis.hpp"

#include <cmath>
#include <string>

namespace schlesinger {

Sl2Element eig_direction(const OrbitPoint& pt, const Sl2Element& partner, int sign) {
  if (sign != 1 && sign != -1) {
    throw ValidationError("sign must be +1 or -1");
  }
  if (std::abs(pt.root) == 0.0) {
    // Nilpotent ray: the unique eigendirection is the point itself.
    return {pt.projective[0], pt.projective[1], pt.projective[2]};
  }
  return ad_eigenvector(pt.affine, partner, double(sign) * pt.root);
}

double standard_basis_residual(const StandardBasis& basis, const Sl2Element& a_ref) {
  const auto& sm = basis.sigma_minus;
  const auto& sp = basis.sigma_plus;
  const auto& s3 = basis.sigma_3;
  const double nm = norm_max(sm), np = norm_max(sp), n3 = norm_max(s3);
  const double na = norm_max(a_ref);

  double r = 0.0;
  auto upd_elem = [&r](const Sl2Element& e, double scale) {
    r = std::max(r, norm_max(e) / std::max(1.0, scale));
  };
  auto upd_val = [&r](Complex z, double scale) {
    r = std::max(r, std::abs(z) / std::max(1.0, scale));
  };

  upd_elem(bracket(s3, sp) - 2.0 * sp, n3 * np);
  upd_elem(bracket(s3, sm) + 2.0 * sm, n3 * nm);
  upd_elem(bracket(sp, sm) - s3, np * nm);
  upd_val(killing(sp, sp), np * np);
  upd_val(killing(sm, sm), nm * nm);
  upd_val(killing(s3, s3) - 2.0, n3 * n3);
  upd_val(killing(s3, sp), n3 * np);
  upd_val(killing(s3, sm), n3 * nm);
  upd_val(killing(sp, sm) - 1.0, np * nm);
  upd_val(killing(sm, a_ref) - 1.0, nm * na);
  return r;
}

bool chart_condition(const Sl2Element& dir_minus, const Sl2Element& dir_plus,
                     const Sl2Element& a_ref, double tol) {
  const double nm = norm_max(dir_minus);
  const double np = norm_max(dir_plus);
  const double na = norm_max(a_ref);
  if (nm == 0.0 || np == 0.0 || na == 0.0) return false;
  const double pairing_a = std::abs(killing(dir_minus, dir_plus)) / (nm * np);
  const double pairing_b = std::abs(killing(dir_minus, a_ref)) / (nm * na);
  return pairing_a > tol && pairing_b > tol;
}

StandardBasis accompany(const Sl2Element& dir_minus, const Sl2Element& dir_plus,
                        const Sl2Element& a_ref) {
  if (!chart_condition(dir_minus, dir_plus, a_ref)) {
    throw ChartConditionViolated("eigendirection pairings degenerate");
  }
  const Complex with_ref = killing(dir_minus, a_ref);
  const Complex with_plus = killing(dir_minus, dir_plus);
  StandardBasis b;
  b.sigma_minus = dir_minus / with_ref;
  b.sigma_plus = (with_ref / with_plus) * dir_plus;
  b.sigma_3 = bracket(dir_plus, dir_minus) / with_plus;
  return b;
}

Sl2Element best_partner_direction(std::span<const OrbitPoint> points, int target,
                                  int sign) {
  if (target < 0 || target >= static_cast<int>(points.size())) {
    throw ValidationError("partner target index out of range");
  }
  const OrbitPoint& pt = points[target];
  if (std::abs(pt.root) == 0.0) {
    return eig_direction(pt, Sl2Element{}, sign);
  }
  const double nt = norm_max(pt.affine);
  Sl2Element best{};
  double best_score = -1.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (static_cast<int>(k) == target) continue;
    const Sl2Element& partner = points[k].affine;
    const double nk = norm_max(partner);
    if (nk == 0.0) continue;
    Sl2Element sigma;
    try {
      sigma = ad_eigenvector(pt.affine, partner, double(sign) * pt.root);
    } catch (const DegenerateDirection&) {
      continue;
    }
    const double score = norm_max(sigma) / (nt * nk);
    if (score > best_score) {
      best_score = score;
      best = sigma;
    }
  }
  // The projection scales with ||a_target||^2 ||partner||, so degeneracy is
  // judged against one extra factor of the target norm.
  if (best_score <= 1e-10 * nt) {
    throw DegenerateDirection("no partner yields a usable eigendirection");
  }
  return best;
}

ChartChoice select_chart(std::span<const OrbitPoint> points) {
  const int n = static_cast<int>(points.size()) - 1;
  if (n < 3) throw ValidationError("need at least four points");

  Sl2Element dir_minus;
  try {
    dir_minus = best_partner_direction(points, 0, -1);
  } catch (const DegenerateDirection& e) {
    throw NoChartFound(std::string("lowering direction at index 0 degenerates: ") +
                       e.what());
  }
  const double nm = norm_max(dir_minus);

  ChartChoice best;
  best.score = -1.0;
  for (int i = 1; i <= n; ++i) {
    Sl2Element dir_plus;
    try {
      dir_plus = best_partner_direction(points, i, +1);
    } catch (const DegenerateDirection&) {
      continue;
    }
    const double np = norm_max(dir_plus);
    const double pairing_a = std::abs(killing(dir_minus, dir_plus)) / (nm * np);
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      const double na = norm_max(points[j].affine);
      if (na == 0.0) continue;
      const double pairing_b =
          std::abs(killing(dir_minus, points[j].affine)) / (nm * na);
      const double score = std::min(pairing_a, pairing_b);
      if (score <= 1e-9) continue;
      // Prefer the higher score; ties within 1% resolve lexicographically.
      const bool tie = best.score > 0.0 && score <= best.score * 1.01 &&
                       score >= best.score * 0.99;
      const bool lex_smaller =
          i < best.spec.index_i ||
          (i == best.spec.index_i && j < best.spec.index_j);
      if (score > best.score * 1.01 || (tie && lex_smaller)) {
        best.score = score;
        best.spec = ChartSpec{i, j, points[0].root, points[i].root};
        best.dir_minus = dir_minus;
        best.dir_plus = dir_plus;
      }
    }
  }
  if (best.score <= 0.0) {
    throw NoChartFound("no index pair satisfies the chart condition");
  }
  return best;
}

double chart_score(std::span<const OrbitPoint> points, const ChartSpec& chart) {
  Sl2Element dir_minus, dir_plus;
  try {
    dir_minus = best_partner_direction(points, 0, -1);
    dir_plus = best_partner_direction(points, chart.index_i, +1);
  } catch (const DegenerateDirection&) {
    return 0.0;
  }
  const Sl2Element& a_ref = points[chart.index_j].affine;
  const double nm = norm_max(dir_minus);
  const double np = norm_max(dir_plus);
  const double na = norm_max(a_ref);
  if (nm == 0.0 || np == 0.0 || na == 0.0) return 0.0;
  return std::min(std::abs(killing(dir_minus, dir_plus)) / (nm * np),
                  std::abs(killing(dir_minus, a_ref)) / (nm * na));
}

}  // namespace schlesinger
