#include "schlesinger/io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace schlesinger {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("complex values must be [re, im] number pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

std::array<Complex, 3> triple_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("expected a three-entry coordinate array");
  }
  return {complex_from_json(j[0]), complex_from_json(j[1]),
          complex_from_json(j[2])};
}

json triple_to_json(const std::array<Complex, 3>& x) {
  return json::array(
      {complex_to_json(x[0]), complex_to_json(x[1]), complex_to_json(x[2])});
}

// One matrix entry: {"affine": 3 pairs} off the divisor or {"divisor": 3
// projective pairs} on it.  The branch root comes from the file's separate
// roots list.
OrbitPoint point_from_json(const json& j, Complex root) {
  if (!j.is_object()) throw ParseError("matrix entries must be objects");
  if (j.contains("divisor")) {
    const auto dir = triple_from_json(j.at("divisor"));
    return make_orbit_point(Sl2Element{}, dir, root);
  }
  if (!j.contains("affine")) {
    throw ParseError("matrix entry needs either \"affine\" or \"divisor\"");
  }
  const auto x = triple_from_json(j.at("affine"));
  return make_orbit_point(Sl2Element{x[0], x[1], x[2]}, root);
}

json point_to_json(const OrbitPoint& pt) {
  json j;
  if (pt.on_divisor()) {
    j["divisor"] = triple_to_json(pt.projective);
  } else {
    j["affine"] = triple_to_json({pt.affine.x1, pt.affine.x2, pt.affine.x3});
  }
  return j;
}

std::vector<Complex> complex_list_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(complex_from_json(e));
  return out;
}

json complex_list_to_json(const std::vector<Complex>& v) {
  json j = json::array();
  for (const auto& z : v) j.push_back(complex_to_json(z));
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

InstanceData instance_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("n") || !j.contains("lambdas") ||
        !j.contains("matrices") || !j.contains("roots")) {
      throw ParseError("instance needs n, lambdas, matrices and roots");
    }
    const int n = j.at("n").get<int>();
    auto lambdas = complex_list_from_json(j.at("lambdas"), "lambdas");
    auto roots = complex_list_from_json(j.at("roots"), "roots");
    const auto& mj = j.at("matrices");
    if (!mj.is_array() || static_cast<int>(mj.size()) != n + 1 ||
        roots.size() != mj.size() || lambdas.size() != mj.size()) {
      throw ParseError("instance sizes disagree with n");
    }
    std::vector<OrbitPoint> points;
    points.reserve(mj.size());
    for (std::size_t idx = 0; idx < mj.size(); ++idx) {
      points.push_back(point_from_json(mj[idx], roots[idx]));
    }
    InstanceData data;
    data.config = make_configuration(std::move(points), std::move(lambdas));
    if (j.contains("chart")) {
      const auto& cj = j.at("chart");
      data.chart = {cj.at("i").get<int>(), cj.at("j").get<int>()};
    }
    return data;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed instance: ") + e.what());
  }
}

json instance_to_json(const Configuration& config,
                      const std::optional<std::pair<int, int>>& chart) {
  json j;
  j["n"] = config.n();
  j["lambdas"] = complex_list_to_json(config.lambdas);
  json mats = json::array();
  std::vector<Complex> roots;
  for (const auto& pt : config.points) {
    mats.push_back(point_to_json(pt));
    roots.push_back(pt.root);
  }
  j["matrices"] = mats;
  j["roots"] = complex_list_to_json(roots);
  if (chart) {
    j["chart"] = {{"i", chart->first}, {"j", chart->second}};
  }
  return j;
}

InstanceData load_instance(const std::string& path) {
  return instance_from_json(load_json_file(path));
}

ReducedData reduced_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("n") || !j.contains("chart") ||
        !j.contains("factors") || !j.contains("casimirs") ||
        !j.contains("roots")) {
      throw ParseError("reduced point needs n, chart, factors, casimirs, roots");
    }
    ReducedData data;
    ReducedPoint& r = data.point;
    r.n = j.at("n").get<int>();
    const auto& cj = j.at("chart");
    r.chart.index_i = cj.at("i").get<int>();
    r.chart.index_j = cj.at("j").get<int>();
    r.chart.root0 = complex_from_json(cj.at("root0"));
    r.chart.root_i = complex_from_json(cj.at("root_i"));
    r.casimirs = complex_list_from_json(j.at("casimirs"), "casimirs");
    r.roots = complex_list_from_json(j.at("roots"), "roots");
    if (static_cast<int>(r.casimirs.size()) != r.n + 1 ||
        r.roots.size() != r.casimirs.size()) {
      throw ParseError("reduced point sizes disagree with n");
    }
    if (r.chart.index_i < 1 || r.chart.index_i > r.n || r.chart.index_j < 1 ||
        r.chart.index_j > r.n || r.chart.index_i == r.chart.index_j) {
      throw ParseError("chart indices must be distinct values in 1..n");
    }
    const std::vector<int> slots = interior_slots(r.n, r.chart);
    const auto& fj = j.at("factors");
    if (!fj.is_array() || fj.size() != slots.size()) {
      throw ParseError("reduced point needs one factor per interior slot");
    }
    for (std::size_t s = 0; s < fj.size(); ++s) {
      r.factors.push_back(point_from_json(fj[s], r.roots[slots[s]]));
    }
    if (j.contains("lambdas")) {
      data.lambdas = complex_list_from_json(j.at("lambdas"), "lambdas");
      if (data.lambdas->size() != r.casimirs.size()) {
        throw ParseError("lambdas must list one pole per original index");
      }
    }
    if (j.contains("score")) data.score = j.at("score").get<double>();
    // Surface inconsistent data now rather than on first use.
    lift(r);
    return data;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed reduced point: ") + e.what());
  }
}

json reduced_to_json(const ReducedPoint& r,
                     const std::optional<std::vector<Complex>>& lambdas,
                     double score) {
  json j;
  j["n"] = r.n;
  j["chart"] = {{"i", r.chart.index_i},
                {"j", r.chart.index_j},
                {"root0", complex_to_json(r.chart.root0)},
                {"root_i", complex_to_json(r.chart.root_i)}};
  json factors = json::array();
  for (const auto& f : r.factors) factors.push_back(point_to_json(f));
  j["factors"] = factors;
  j["casimirs"] = complex_list_to_json(r.casimirs);
  j["roots"] = complex_list_to_json(r.roots);
  if (lambdas) j["lambdas"] = complex_list_to_json(*lambdas);
  j["score"] = score;
  return j;
}

ReducedData load_reduced(const std::string& path) {
  return reduced_from_json(load_json_file(path));
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryPoint>& traj, int k) {
  (void)k;
  if (traj.empty()) return;
  const int n = traj.front().config.n();
  os << "t_re,t_im";
  for (int j = 0; j <= n; ++j) {
    for (const char* c : {"x1", "x2", "x3"}) {
      os << ",A" << j << "_" << c << "_re,A" << j << "_" << c << "_im";
    }
  }
  for (int i = 0; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      os << ",a" << i << j << "_re,a" << i << j << "_im";
    }
  }
  os << ",casimir_drift,moment_residual\n";

  std::vector<Complex> cas0;
  for (const auto& pt : traj.front().config.points) cas0.push_back(pt.casimir);
  for (const auto& row : traj) {
    os << fmt(row.t.real()) << "," << fmt(row.t.imag());
    Sl2Element sum{};
    double drift = 0.0;
    double scale = 1.0;
    for (int j = 0; j <= n; ++j) {
      const auto& a = row.config.points[j].affine;
      for (const Complex& z : {a.x1, a.x2, a.x3}) {
        os << "," << fmt(z.real()) << "," << fmt(z.imag());
      }
      sum += a;
      drift = std::max(drift, std::abs(casimir(a) - cas0[j]));
      scale = std::max(scale, norm_max(a));
    }
    for (int i = 0; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        const Complex aij = killing(row.config.points[i].affine,
                                    row.config.points[j].affine);
        os << "," << fmt(aij.real()) << "," << fmt(aij.imag());
      }
    }
    os << "," << fmt(drift) << "," << fmt(norm_max(sum) / scale) << "\n";
  }
}

void write_reduced_trajectory_csv(
    std::ostream& os, const std::vector<ReducedTrajectoryPoint>& traj) {
  if (traj.empty()) return;
  const int m = static_cast<int>(traj.front().point.factors.size());
  os << "t_re,t_im";
  for (int f = 0; f < m; ++f) {
    os << ",factor" << f << "_chart,factor" << f << "_p_re,factor" << f
       << "_p_im,factor" << f << "_q_re,factor" << f << "_q_im";
  }
  os << "\n";
  for (const auto& row : traj) {
    os << fmt(row.t.real()) << "," << fmt(row.t.imag());
    for (const auto& factor : row.point.factors) {
      ChartId id = ChartId::primary;
      ChartCoords cc;
      try {
        cc = to_chart(factor, id);
      } catch (const ChartSingular&) {
        id = ChartId::secondary;
        cc = to_chart(factor, id);
      }
      os << "," << chart_name(id) << "," << fmt(cc.p.real()) << ","
         << fmt(cc.p.imag()) << "," << fmt(cc.q.real()) << ","
         << fmt(cc.q.imag());
    }
    os << "\n";
  }
}

namespace {

double parse_double_full(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("trailing characters in number: " + s);
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseError("cannot parse number: " + s);
  } catch (const std::out_of_range&) {
    throw ParseError("number out of range: " + s);
  }
}

}  // namespace

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw ParseError("empty complex literal");
  if (s.back() != 'i' && s.back() != 'I') {
    return {parse_double_full(s), 0.0};
  }
  s.pop_back();
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  // Split "a+bi" at the last sign that is not an exponent sign.
  std::size_t split = std::string::npos;
  for (std::size_t p = s.size() - 1; p >= 1; --p) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) {
    return {0.0, parse_double_full(s)};  // pure imaginary, e.g. "2i"
  }
  const double real = parse_double_full(s.substr(0, split));
  const std::string imag_str = s.substr(split);
  if (imag_str == "+") return {real, 1.0};
  if (imag_str == "-") return {real, -1.0};
  return {real, parse_double_full(imag_str)};
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) throw ParseError("empty entry in complex list");
    out.push_back(parse_complex(token));
  }
  if (out.empty()) throw ParseError("empty complex list");
  return out;
}

}  // namespace schlesinger
