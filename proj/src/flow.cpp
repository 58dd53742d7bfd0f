#include "schlesinger/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "schlesinger/dual.hpp"
#include "schlesinger/log.hpp"

namespace schlesinger {

namespace {

double lambda_scale(const std::vector<Complex>& lambdas) {
  double s = 1.0;
  for (const auto& l : lambdas) s = std::max(s, std::abs(l));
  return s;
}

void check_pole_gap(Complex lk, Complex li, double scale) {
  if (std::abs(lk - li) <= 1e-12 * scale) {
    throw PoleCollision("deformation parameter ran into another pole");
  }
}

// Distance from z to the segment [a, b].
double segment_distance(Complex z, Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  double t = ((z - a) * std::conj(d)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

// Straight waypoint legs starting from `from`; zero-length legs are dropped.
std::vector<std::pair<Complex, Complex>> path_segments(
    Complex from, const std::vector<Complex>& waypoints, double scale) {
  std::vector<std::pair<Complex, Complex>> segs;
  Complex cur = from;
  for (const Complex& w : waypoints) {
    if (std::abs(w - cur) > 1e-15 * scale) segs.emplace_back(cur, w);
    cur = w;
  }
  return segs;
}

void precheck_path(const std::vector<std::pair<Complex, Complex>>& segs,
                   const std::vector<Complex>& lambdas, int k,
                   double margin, double scale) {
  for (const auto& [a, b] : segs) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      if (static_cast<int>(i) == k) continue;
      if (segment_distance(lambdas[i], a, b) <= margin * scale) {
        std::ostringstream os;
        os << "path passes within the pole margin of lambda_" << i;
        throw PoleCollision(os.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Embedded Dormand-Prince 5(4) with PI step control over complex state
// vectors.  tau runs over [0, 1]; `targets` are mandatory landing points
// (ascending, ending at 1.0).  `post_accept` may mutate the state (chart
// changes) and returns true when it did; `record` is called at each target,
// or at every accepted step when record_steps is set.
// ---------------------------------------------------------------------------

using State = std::vector<Complex>;
using RhsFn = std::function<void(double, const State&, State&)>;
using PostFn = std::function<bool(double, State&)>;
using RecordFn = std::function<void(double, const State&)>;

struct Dopri5Options {
  double tol = 1e-10;
  double h_init = 1e-2;
  double h_min = 1e-13;
  bool record_steps = false;
};

void dopri5(const RhsFn& rhs, State& y, const std::vector<double>& targets,
            const Dopri5Options& opt, const PostFn& post_accept,
            const RecordFn& record) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat (5th minus embedded 4th order weights)
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600;
  static constexpr double e3 = 500.0 / 1113 - 7571.0 / 16695;
  static constexpr double e4 = 125.0 / 192 - 393.0 / 640;
  static constexpr double e5 = -2187.0 / 6784 + 92097.0 / 339200;
  static constexpr double e6 = 11.0 / 84 - 187.0 / 2100;
  static constexpr double e7 = -1.0 / 40;

  const std::size_t dim = y.size();
  State k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  State ytmp(dim), ynew(dim);

  double tau = 0.0;
  double h = std::min(opt.h_init, 1.0);
  double err_prev = 1.0;
  bool have_k1 = false;
  std::size_t next_target = 0;

  while (next_target < targets.size()) {
    const double target = targets[next_target];
    bool hit = false;
    if (tau + h >= target - 1e-15) {
      h = target - tau;
      hit = true;
    }
    if (h < opt.h_min) throw StepUnderflow("step size collapsed");

    if (!have_k1) {
      rhs(tau, y, k1);
      have_k1 = true;
    }
    for (std::size_t c = 0; c < dim; ++c) ytmp[c] = y[c] + h * (a21 * k1[c]);
    rhs(tau + c2 * h, ytmp, k2);
    for (std::size_t c = 0; c < dim; ++c)
      ytmp[c] = y[c] + h * (a31 * k1[c] + a32 * k2[c]);
    rhs(tau + c3 * h, ytmp, k3);
    for (std::size_t c = 0; c < dim; ++c)
      ytmp[c] = y[c] + h * (a41 * k1[c] + a42 * k2[c] + a43 * k3[c]);
    rhs(tau + c4 * h, ytmp, k4);
    for (std::size_t c = 0; c < dim; ++c)
      ytmp[c] = y[c] + h * (a51 * k1[c] + a52 * k2[c] + a53 * k3[c] + a54 * k4[c]);
    rhs(tau + c5 * h, ytmp, k5);
    for (std::size_t c = 0; c < dim; ++c)
      ytmp[c] = y[c] + h * (a61 * k1[c] + a62 * k2[c] + a63 * k3[c] +
                            a64 * k4[c] + a65 * k5[c]);
    rhs(tau + h, ytmp, k6);
    for (std::size_t c = 0; c < dim; ++c)
      ynew[c] = y[c] + h * (b1 * k1[c] + b3 * k3[c] + b4 * k4[c] + b5 * k5[c] +
                            b6 * k6[c]);
    rhs(tau + h, ynew, k7);

    double err = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex ec = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] +
                              e5 * k5[c] + e6 * k6[c] + e7 * k7[c]);
      const double w =
          opt.tol * (1.0 + std::max(std::abs(y[c]), std::abs(ynew[c])));
      err = std::max(err, std::abs(ec) / w);
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      tau = hit ? target : tau + h;
      std::swap(y, ynew);
      std::swap(k1, k7);  // first-same-as-last
      const bool mutated = post_accept ? post_accept(tau, y) : false;
      if (mutated) have_k1 = false;
      if (opt.record_steps || hit) record(tau, y);
      if (hit) ++next_target;
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.14) * std::pow(err_prev, 0.08);
      fac = std::clamp(fac, 0.2, 5.0);
      err_prev = e;
      h = std::min(h * fac, 1.0);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
}

std::vector<double> checkpoint_targets(int per_segment) {
  std::vector<double> t;
  const int c = std::max(per_segment, 1);
  for (int i = 1; i <= c; ++i) t.push_back(double(i) / c);
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Full system
// ---------------------------------------------------------------------------

std::vector<Sl2Element> schlesinger_rhs(const Configuration& config, int k) {
  const int n = config.n();
  if (k < 0 || k > n) throw ValidationError("flow index out of range");
  const double scale = lambda_scale(config.lambdas);
  std::vector<Sl2Element> out(n + 1);
  Sl2Element dk{};
  for (int j = 0; j <= n; ++j) {
    if (j == k) continue;
    check_pole_gap(config.lambdas[k], config.lambdas[j], scale);
    const Complex coef = 1.0 / (config.lambdas[k] - config.lambdas[j]);
    out[j] = coef * bracket(config.points[k].affine, config.points[j].affine);
    dk += -out[j];  // velocities sum to zero identically
  }
  out[k] = dk;
  return out;
}

Complex hamiltonian_k(const Configuration& config, int k) {
  const int n = config.n();
  if (k < 0 || k > n) throw ValidationError("flow index out of range");
  const double scale = lambda_scale(config.lambdas);
  Complex h{};
  for (int i = 0; i <= n; ++i) {
    if (i == k) continue;
    check_pole_gap(config.lambdas[k], config.lambdas[i], scale);
    h += killing(config.points[i].affine, config.points[k].affine) /
         (config.lambdas[k] - config.lambdas[i]);
  }
  return kHamiltonianSign * h;
}

namespace {

// Full-flow state layout: affine triples of all points, then projective
// triples (the latter carry the divisor directions through the flow; for
// regular points they are redundant but evolve consistently).
struct FullSystem {
  int n;
  int k;
  std::vector<Complex> lambdas;  // lambdas[k] replaced along the path
  std::vector<Complex> cas0;    // initial casimirs
  std::vector<Complex> roots;
  std::vector<bool> divisor;
  double drift_scale = 1.0;
  double lscale = 1.0;

  static Sl2Element elem(const State& y, int base3) {
    return {y[3 * base3], y[3 * base3 + 1], y[3 * base3 + 2]};
  }

  State pack(const Configuration& c) const {
    State y(6 * (n + 1));
    for (int j = 0; j <= n; ++j) {
      y[3 * j] = c.points[j].affine.x1;
      y[3 * j + 1] = c.points[j].affine.x2;
      y[3 * j + 2] = c.points[j].affine.x3;
      const int b = 3 * (n + 1) + 3 * j;
      y[b] = c.points[j].projective[0];
      y[b + 1] = c.points[j].projective[1];
      y[b + 2] = c.points[j].projective[2];
    }
    return y;
  }

  Configuration unpack(const State& y, Complex lk) const {
    Configuration c;
    c.lambdas = lambdas;
    c.lambdas[k] = lk;
    c.points.resize(n + 1);
    for (int j = 0; j <= n; ++j) {
      OrbitPoint& pt = c.points[j];
      const int b = 3 * (n + 1) + 3 * j;
      if (divisor[j]) {
        pt.affine = Sl2Element{};
        pt.projective = normalize_projective({y[b], y[b + 1], y[b + 2]});
        pt.casimir = Complex{};
        pt.root = Complex{};
      } else {
        pt.affine = {y[3 * j], y[3 * j + 1], y[3 * j + 2]};
        pt.projective =
            normalize_projective({pt.affine.x1, pt.affine.x2, pt.affine.x3});
        pt.casimir = casimir(pt.affine);
        // The casimir drifts within the integration tolerance; keep the root
        // on the same branch but aligned with the current casimir so the
        // point satisfies root^2 = casimir / 2 exactly as stored.
        const Complex fresh = std::sqrt(0.5 * pt.casimir);
        pt.root = std::abs(fresh - roots[j]) <= std::abs(fresh + roots[j])
                      ? fresh
                      : -fresh;
      }
    }
    return c;
  }

  void rhs(Complex lk, Complex dl, const State& y, State& dy) const {
    const Sl2Element ak = elem(y, k);
    Sl2Element dk{};
    Sl2Element dpk{};
    const Sl2Element pk{y[3 * (n + 1) + 3 * k], y[3 * (n + 1) + 3 * k + 1],
                        y[3 * (n + 1) + 3 * k + 2]};
    for (int j = 0; j <= n; ++j) {
      if (j == k) continue;
      check_pole_gap(lk, lambdas[j], lscale);
      const Complex coef = dl / (lk - lambdas[j]);
      const Sl2Element aj = elem(y, j);
      const Sl2Element daj = coef * bracket(ak, aj);
      dy[3 * j] = daj.x1;
      dy[3 * j + 1] = daj.x2;
      dy[3 * j + 2] = daj.x3;
      dk += -daj;
      const int b = 3 * (n + 1) + 3 * j;
      const Sl2Element pj{y[b], y[b + 1], y[b + 2]};
      const Sl2Element dpj = coef * bracket(ak, pj);
      dy[b] = dpj.x1;
      dy[b + 1] = dpj.x2;
      dy[b + 2] = dpj.x3;
      // d(proj_k) = sum_{i != k} [A_i, proj_k]/(lambda_k - lambda_i)
      dpk += coef * bracket(aj, pk);
    }
    dy[3 * k] = dk.x1;
    dy[3 * k + 1] = dk.x2;
    dy[3 * k + 2] = dk.x3;
    const int bk = 3 * (n + 1) + 3 * k;
    dy[bk] = dpk.x1;
    dy[bk + 1] = dpk.x2;
    dy[bk + 2] = dpk.x3;
  }

  void monitor(const State& y, double tol_drift) const {
    Sl2Element sum{};
    double worst = 0.0;
    for (int j = 0; j <= n; ++j) {
      const Sl2Element aj = elem(y, j);
      sum += aj;
      worst = std::max(worst, std::abs(casimir(aj) - cas0[j]));
    }
    if (worst > tol_drift * drift_scale ||
        norm_max(sum) > tol_drift * drift_scale) {
      std::ostringstream os;
      os << "conserved quantities drifted beyond tolerance (casimir "
         << worst << ", moment " << norm_max(sum) << ")";
      throw DriftAlarm(os.str());
    }
  }
};

}  // namespace

std::vector<TrajectoryPoint> integrate(const FlowState& state,
                                       const FlowParams& params) {
  const Configuration& config = state.config;
  const int n = config.n();
  const int k = state.k;
  if (k < 0 || k > n) throw ValidationError("flow index out of range");

  FullSystem sys;
  sys.n = n;
  sys.k = k;
  sys.lambdas = config.lambdas;
  sys.lscale = lambda_scale(config.lambdas);
  for (const Complex& w : params.t_path) {
    sys.lscale = std::max(sys.lscale, std::abs(w));
  }
  sys.cas0.resize(n + 1);
  sys.roots.resize(n + 1);
  sys.divisor.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    sys.cas0[j] = config.points[j].casimir;
    sys.roots[j] = config.points[j].root;
    sys.divisor[j] = config.points[j].on_divisor();
    sys.drift_scale = std::max(sys.drift_scale, norm_max(config.points[j].affine));
    sys.drift_scale = std::max(sys.drift_scale, std::abs(sys.cas0[j]));
  }

  const auto segs = path_segments(config.lambdas[k], params.t_path, sys.lscale);
  precheck_path(segs, config.lambdas, k, params.pole_margin, sys.lscale);

  std::vector<TrajectoryPoint> traj;
  traj.push_back({config.lambdas[k], config});

  State y = sys.pack(config);
  Dopri5Options opt;
  opt.tol = params.tol_local;
  opt.h_init = params.step_init;
  opt.h_min = params.h_min;
  opt.record_steps = params.checkpoints_per_segment == 0;
  const auto targets = checkpoint_targets(params.checkpoints_per_segment);

  for (const auto& [a, b] : segs) {
    auto rhs = [&](double tau, const State& yy, State& dy) {
      sys.rhs(a + tau * (b - a), b - a, yy, dy);
    };
    auto post = [&](double, State& yy) {
      sys.monitor(yy, params.tol_drift);
      return false;
    };
    auto rec = [&](double tau, const State& yy) {
      traj.push_back({a + tau * (b - a), sys.unpack(yy, a + tau * (b - a))});
    };
    dopri5(rhs, y, targets, opt, post, rec);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Reduced system
// ---------------------------------------------------------------------------

namespace {

// Conditioning-based chart choice for one quadric factor.
ChartId choose_factor_chart(const OrbitPoint& pt) {
  double primary, secondary;
  if (pt.on_divisor()) {
    primary = std::max(std::abs(pt.projective[0]), std::abs(pt.projective[2]));
    secondary = std::max(std::abs(pt.projective[1]), std::abs(pt.projective[2]));
  } else {
    const auto& a = pt.affine;
    primary = std::max(std::abs(a.x1), std::abs(a.x3 + pt.root));
    secondary = std::max(std::abs(a.x2), std::abs(a.x3 - pt.root));
  }
  return primary >= secondary ? ChartId::primary : ChartId::secondary;
}

// Static data of a reduced Hamiltonian system (everything except the moving
// coordinates and lambda_k).
struct ReducedSystem {
  int n;
  int k;
  ChartSpec chart;
  Complex a_j;
  std::vector<Complex> lambdas;
  std::vector<Complex> slot_roots;   // per factor
  std::vector<Complex> casimirs;     // original indexing (for rebuilds)
  std::vector<Complex> all_roots;
  std::vector<ChartId> charts;       // active chart per factor (mutable)
  double lscale = 1.0;

  int factors() const { return n - 2; }

  // H(lambda_k) with directional derivatives wrt one chart coordinate.
  Dual hamiltonian(const State& y, Complex lk, int seed_var) const {
    const int m = factors();
    std::vector<Dual> beta(m), q(m), qp(m);
    for (int f = 0; f < m; ++f) {
      Dual p{y[2 * f], seed_var == 2 * f ? 1.0 : 0.0};
      Dual qq{y[2 * f + 1], seed_var == 2 * f + 1 ? 1.0 : 0.0};
      const auto x = chart_point_entries<Dual>(charts[f], p, qq, slot_roots[f]);
      q[f] = x[0];
      qp[f] = x[1];
      beta[f] = x[2];
    }
    const auto entries = normal_form_entries<Dual>(
        n, chart, std::span<const Dual>(beta), std::span<const Dual>(q),
        std::span<const Dual>(qp), a_j);
    Dual h{};
    for (int i = 0; i <= n; ++i) {
      if (i == k) continue;
      check_pole_gap(lk, lambdas[i], lscale);
      h = h + pair_invariant(entries[i], entries[k]) / Dual(lk - lambdas[i]);
    }
    return kHamiltonianSign * h;
  }

  // dq/dlambda = dH/dp, dp/dlambda = -dH/dq, scaled by dl.
  void rhs(Complex lk, Complex dl, const State& y, State& dy) const {
    const int m = factors();
    for (int f = 0; f < m; ++f) {
      const Dual hp = hamiltonian(y, lk, 2 * f);
      const Dual hq = hamiltonian(y, lk, 2 * f + 1);
      dy[2 * f] = -dl * hq.d;
      dy[2 * f + 1] = dl * hp.d;
    }
  }

  bool rechart(State& y) {
    bool mutated = false;
    for (int f = 0; f < factors(); ++f) {
      if (std::abs(y[2 * f]) > 100.0) {
        const ChartCoords cc =
            transition({charts[f], y[2 * f], y[2 * f + 1]}, slot_roots[f]);
        charts[f] = cc.chart;
        y[2 * f] = cc.p;
        y[2 * f + 1] = cc.q;
        mutated = true;
        log_debug("reduced factor moved to the other chart");
      }
    }
    return mutated;
  }

  ReducedPoint rebuild(const State& y) const {
    ReducedPoint r;
    r.n = n;
    r.chart = chart;
    r.casimirs = casimirs;
    r.roots = all_roots;
    for (int f = 0; f < factors(); ++f) {
      r.factors.push_back(
          from_chart({charts[f], y[2 * f], y[2 * f + 1]}, slot_roots[f]));
    }
    return r;
  }
};

ReducedSystem make_reduced_system(const ReducedPoint& r,
                                  const std::vector<Complex>& lambdas, int k) {
  if (static_cast<int>(lambdas.size()) != r.n + 1) {
    throw ValidationError("one pole position per original point required");
  }
  if (k < 0 || k > r.n) throw ValidationError("flow index out of range");
  ReducedSystem sys;
  sys.n = r.n;
  sys.k = k;
  sys.chart = r.chart;
  sys.a_j = r.casimirs[r.chart.index_j];
  sys.lambdas = lambdas;
  sys.lscale = lambda_scale(lambdas);
  sys.casimirs = r.casimirs;
  sys.all_roots = r.roots;
  for (int f = 0; f < r.n - 2; ++f) {
    sys.slot_roots.push_back(r.factors[f].root);
    sys.charts.push_back(choose_factor_chart(r.factors[f]));
  }
  return sys;
}

State pack_reduced(const ReducedSystem& sys, const ReducedPoint& r) {
  State y(2 * sys.factors());
  for (int f = 0; f < sys.factors(); ++f) {
    const ChartCoords cc = to_chart(r.factors[f], sys.charts[f]);
    y[2 * f] = cc.p;
    y[2 * f + 1] = cc.q;
  }
  return y;
}

}  // namespace

Complex reduced_hamiltonian(const ReducedPoint& r,
                            const std::vector<Complex>& lambdas, int k) {
  if (static_cast<int>(lambdas.size()) != r.n + 1) {
    throw ValidationError("one pole position per original point required");
  }
  if (k < 0 || k > r.n) throw ValidationError("flow index out of range");
  const double lscale = lambda_scale(lambdas);
  Complex h{};
  for (int i = 0; i <= r.n; ++i) {
    if (i == k) continue;
    check_pole_gap(lambdas[k], lambdas[i], lscale);
    h += hamiltonian_value(r, i, k) / (lambdas[k] - lambdas[i]);
  }
  return kHamiltonianSign * h;
}

ReducedVelocity reduced_rhs(const ReducedPoint& r,
                            const std::vector<Complex>& lambdas, int k) {
  ReducedSystem sys = make_reduced_system(r, lambdas, k);
  State y = pack_reduced(sys, r);
  State dy(y.size());
  sys.rhs(lambdas[k], Complex{1.0}, y, dy);
  ReducedVelocity v;
  for (int f = 0; f < sys.factors(); ++f) {
    v.at.push_back({sys.charts[f], y[2 * f], y[2 * f + 1]});
    v.dp.push_back(dy[2 * f]);
    v.dq.push_back(dy[2 * f + 1]);
  }
  return v;
}

std::vector<ReducedTrajectoryPoint> integrate_reduced(
    const ReducedPoint& r0, const std::vector<Complex>& lambdas, int k,
    const FlowParams& params) {
  ReducedSystem sys = make_reduced_system(r0, lambdas, k);
  State y = pack_reduced(sys, r0);

  for (const Complex& w : params.t_path) {
    sys.lscale = std::max(sys.lscale, std::abs(w));
  }
  const auto segs = path_segments(lambdas[k], params.t_path, sys.lscale);
  precheck_path(segs, lambdas, k, params.pole_margin, sys.lscale);

  std::vector<ReducedTrajectoryPoint> traj;
  traj.push_back({lambdas[k], r0});

  Dopri5Options opt;
  opt.tol = params.tol_local;
  opt.h_init = params.step_init;
  opt.h_min = params.h_min;
  opt.record_steps = params.checkpoints_per_segment == 0;
  const auto targets = checkpoint_targets(params.checkpoints_per_segment);

  for (const auto& [a, b] : segs) {
    auto rhs = [&](double tau, const State& yy, State& dy) {
      sys.rhs(a + tau * (b - a), b - a, yy, dy);
    };
    auto post = [&](double, State& yy) { return sys.rechart(yy); };
    auto rec = [&](double tau, const State& yy) {
      traj.push_back({a + tau * (b - a), sys.rebuild(yy)});
    };
    dopri5(rhs, y, targets, opt, post, rec);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Form agreement under the lift
// ---------------------------------------------------------------------------

FormAgreement form_restriction_check(const ReducedPoint& r,
                                     std::span<const OrbitTangent> u,
                                     std::span<const OrbitTangent> v) {
  const int m = r.n - 2;
  if (static_cast<int>(u.size()) != m || static_cast<int>(v.size()) != m) {
    throw ValidationError("one tangent pair per interior factor required");
  }

  Complex reduced_sum{};
  for (int f = 0; f < m; ++f) {
    reduced_sum += omega(r.factors[f], u[f], v[f]);
  }

  // Push both tangent families through the lift polynomials.
  auto lifted_tangents = [&](std::span<const OrbitTangent> w) {
    std::vector<Dual> beta(m), q(m), qp(m);
    for (int f = 0; f < m; ++f) {
      beta[f] = Dual{r.beta(f), w[f].d3};
      q[f] = Dual{r.q(f), w[f].d1};
      qp[f] = Dual{r.qp(f), w[f].d2};
    }
    const auto entries = normal_form_entries<Dual>(
        r.n, r.chart, std::span<const Dual>(beta), std::span<const Dual>(q),
        std::span<const Dual>(qp), r.casimirs[r.chart.index_j]);
    std::vector<OrbitTangent> out(r.n + 1);
    for (int idx = 0; idx <= r.n; ++idx) {
      out[idx] = {entries[idx][0].d, entries[idx][1].d, entries[idx][2].d};
    }
    return out;
  };
  const auto lifted_u = lifted_tangents(u);
  const auto lifted_v = lifted_tangents(v);
  const auto points = lift(r);

  Complex full_sum{};
  double max_term = 0.0;
  FormAgreement fa;
  for (int idx = 0; idx <= r.n; ++idx) {
    const Complex w = omega(points[idx], lifted_u[idx], lifted_v[idx]);
    full_sum += w;
    max_term = std::max(max_term, std::abs(w));
    if (idx == 0) fa.special_0 = std::abs(w);
    if (idx == r.chart.index_i) fa.special_i = std::abs(w);
    if (idx == r.chart.index_j) fa.special_j = std::abs(w);
  }
  fa.total_residual = std::abs(full_sum - reduced_sum);
  fa.scale = std::max({1.0, std::abs(full_sum), std::abs(reduced_sum), max_term});
  return fa;
}

// ---------------------------------------------------------------------------
// Cross-validation of the two integrations
// ---------------------------------------------------------------------------

namespace {

double relative_gap(Complex x, Complex y) {
  return std::abs(x - y) / (1.0 + std::max(std::abs(x), std::abs(y)));
}

double reduced_distance(const ReducedPoint& a, const ReducedPoint& b) {
  double d = 0.0;
  for (std::size_t f = 0; f < a.factors.size(); ++f) {
    d = std::max(d, relative_gap(a.q(f), b.q(f)));
    d = std::max(d, relative_gap(a.qp(f), b.qp(f)));
    d = std::max(d, relative_gap(a.beta(f), b.beta(f)));
  }
  return d;
}

double invariant_distance(const InvariantTable& a, const InvariantTable& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.pair.size(); ++i) {
    d = std::max(d, relative_gap(a.pair[i], b.pair[i]));
  }
  return d;
}

// Trajectory roots track the drifting casimirs, so the chart's reference
// roots must be refreshed from whichever configuration is being reduced.
ChartSpec with_point_roots(ChartSpec spec,
                           std::span<const OrbitPoint> points) {
  spec.root0 = points[0].root;
  spec.root_i = points[spec.index_i].root;
  return spec;
}

ChartSpec with_reduced_roots(ChartSpec spec, const ReducedPoint& r) {
  spec.root0 = r.roots[0];
  spec.root_i = r.roots[spec.index_i];
  return spec;
}

}  // namespace

CompareReport compare_flows(const Configuration& config, int k,
                            const FlowParams& params, const ChartSpec* chart) {
  ChartSpec active = chart ? *chart : select_chart(config.points).spec;
  ReducedPoint r_cur = reduce(config.points, active);

  FlowParams full_params = params;
  if (full_params.checkpoints_per_segment <= 0) {
    full_params.checkpoints_per_segment = 8;
  }
  const auto full = integrate(FlowState{config, k}, full_params);

  CompareReport report;
  report.checkpoints = static_cast<int>(full.size()) - 1;

  for (std::size_t t = 1; t < full.size(); ++t) {
    const Configuration& cfg_prev = full[t - 1].config;
    const Configuration& cfg_next = full[t].config;

    FlowParams leg = params;
    leg.t_path = {full[t].t};
    leg.checkpoints_per_segment = 1;
    const auto red = integrate_reduced(r_cur, cfg_prev.lambdas, k, leg);
    ReducedPoint r_next = red.back().point;

    bool rechart = chart_score(cfg_next.points, active) <= params.rechart_score;
    ReducedPoint r_full;
    if (!rechart) {
      try {
        r_full = reduce(cfg_next.points, with_point_roots(active, cfg_next.points));
      } catch (const ChartConditionViolated&) {
        rechart = true;
      } catch (const RootMismatch&) {
        rechart = true;
      } catch (const NumericError&) {
        rechart = true;
      }
    }
    if (rechart) {
      active = select_chart(cfg_next.points).spec;
      r_next = reduce(lift(r_next), with_reduced_roots(active, r_next));
      r_full = reduce(cfg_next.points, with_point_roots(active, cfg_next.points));
      ++report.rechart_events;
      log_info("compare: re-charted the reduced space mid-path");
    }

    report.sup_distance =
        std::max(report.sup_distance, reduced_distance(r_full, r_next));
    report.invariant_mismatch =
        std::max(report.invariant_mismatch,
                 invariant_distance(invariants(cfg_next.points),
                                    invariants(lift(r_next))));
    r_cur = std::move(r_next);
  }
  return report;
}

}  // namespace schlesinger
