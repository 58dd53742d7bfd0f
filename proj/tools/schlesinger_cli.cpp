// Command-line front-end: instance I/O, seeded property suites, reduce/lift
// conversions, flow integration with CSV export, and full-vs-reduced
// comparison.  Exit codes: 0 success, 1 property failure, 2 input error,
// 3 numeric/integration failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "schlesinger/flow.hpp"
#include "schlesinger/io.hpp"
#include "schlesinger/log.hpp"
#include "schlesinger/verify.hpp"

namespace {

using namespace schlesinger;

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + out_path);
  os << j.dump(2) << "\n";
}

ChartSpec chart_from_pair(const Configuration& c, std::pair<int, int> ij) {
  const int n = c.n();
  if (ij.first < 1 || ij.first > n || ij.second < 1 || ij.second > n ||
      ij.first == ij.second) {
    throw ValidationError("chart indices must be distinct values in 1..n");
  }
  ChartSpec spec;
  spec.index_i = ij.first;
  spec.index_j = ij.second;
  spec.root0 = c.points[0].root;
  spec.root_i = c.points[ij.first].root;
  return spec;
}

// Painleve-6 style pinning for n=3: poles 1..3 moved to 0, 1, 2 (index 0
// keeps its file value).  The configuration is revalidated afterwards.
void apply_pin(Configuration& c) {
  if (c.n() != 3) throw ValidationError("--pin-012 requires n = 3");
  std::vector<Complex> lambdas = c.lambdas;
  lambdas[1] = Complex{0.0, 0.0};
  lambdas[2] = Complex{1.0, 0.0};
  lambdas[3] = Complex{2.0, 0.0};
  c = make_configuration(std::vector<OrbitPoint>(c.points), std::move(lambdas));
}

int run_verify(std::uint64_t seed, const std::vector<int>& ns, int samples) {
  const RunReport rep = run_property_suites(seed, ns, samples);
  nlohmann::json j;
  j["suite"] = "property-suites";
  j["seed"] = rep.seed;
  j["n_values"] = rep.n_values;
  j["samples"] = rep.samples;
  nlohmann::json props = nlohmann::json::array();
  for (const PropertyResult& p : rep.properties) {
    props.push_back({{"name", p.name},
                     {"samples", p.samples},
                     {"max_residual", p.max_residual},
                     {"tolerance", p.tolerance},
                     {"pass", p.pass}});
  }
  j["properties"] = props;
  j["pass"] = rep.pass();
  std::cout << j.dump(2) << "\n";
  std::cerr << "wall_ms " << rep.wall_ms << "\n";  // timing kept off stdout
  return rep.pass() ? 0 : 1;
}

int run_reduce(const std::string& in, const std::string& out) {
  const InstanceData data = load_instance(in);
  ChartSpec spec;
  if (data.chart) {
    spec = chart_from_pair(data.config, *data.chart);
  } else {
    spec = select_chart(data.config.points).spec;
  }
  const ReducedPoint r = reduce(data.config, spec);
  const double score = chart_score(data.config.points, spec);
  emit_json(reduced_to_json(r, data.config.lambdas, score), out);
  return 0;
}

int run_lift(const std::string& in, const std::string& out) {
  const ReducedData data = load_reduced(in);
  std::vector<Complex> lambdas;
  if (data.lambdas) {
    lambdas = *data.lambdas;
  } else {
    for (int i = 0; i <= data.point.n; ++i) {
      lambdas.emplace_back(static_cast<double>(i), 0.0);
    }
  }
  const Configuration config = make_configuration(lift(data.point), std::move(lambdas));
  emit_json(instance_to_json(config, std::make_pair(data.point.chart.index_i,
                                                    data.point.chart.index_j)),
            out);
  return 0;
}

FlowParams flow_params(const std::string& path_text, double tol, int checkpoints) {
  FlowParams params;
  params.t_path = parse_complex_list(path_text);
  if (params.t_path.empty()) {
    throw ValidationError("path must contain at least one waypoint");
  }
  params.tol_local = tol;
  params.checkpoints_per_segment = checkpoints;
  return params;
}

int run_flow(const std::string& in, int k, const std::string& path_text,
             bool pin012, double tol, int checkpoints, const std::string& out) {
  InstanceData data = load_instance(in);
  if (pin012) apply_pin(data.config);
  if (k < 0 || k > data.config.n()) throw ValidationError("k must be in 0..n");
  const FlowParams params = flow_params(path_text, tol, checkpoints);
  const std::vector<TrajectoryPoint> traj = integrate(FlowState{data.config, k}, params);

  double drift = 0.0, moment = 0.0;
  const Configuration& first = traj.front().config;
  for (const TrajectoryPoint& row : traj) {
    for (std::size_t i = 0; i < row.config.points.size(); ++i) {
      drift = std::max(drift, std::abs(casimir(row.config.points[i].affine) -
                                       first.points[i].casimir));
    }
    moment = std::max(moment, moment_residual(row.config.points));
  }
  nlohmann::json summary;
  summary["command"] = "flow";
  summary["k"] = k;
  summary["rows"] = traj.size();
  summary["t_final"] = complex_to_json(traj.back().t);
  summary["max_casimir_drift"] = drift;
  summary["max_moment_residual"] = moment;

  if (!out.empty()) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + out);
    write_trajectory_csv(os, traj, k);
    std::cout << summary.dump(2) << "\n";
  } else {
    write_trajectory_csv(std::cout, traj, k);
    std::cerr << summary.dump(2) << "\n";
  }
  return 0;
}

int run_compare(const std::string& in, int k, const std::string& path_text,
                bool pin012, double tol, int checkpoints) {
  InstanceData data = load_instance(in);
  if (pin012) apply_pin(data.config);
  if (k < 0 || k > data.config.n()) throw ValidationError("k must be in 0..n");
  const FlowParams params = flow_params(path_text, tol, checkpoints);
  ChartSpec spec;
  const ChartSpec* chart_ptr = nullptr;
  if (data.chart) {
    spec = chart_from_pair(data.config, *data.chart);
    chart_ptr = &spec;
  }
  const CompareReport rep = compare_flows(data.config, k, params, chart_ptr);
  nlohmann::json summary;
  summary["command"] = "compare";
  summary["k"] = k;
  summary["sup_distance"] = rep.sup_distance;
  summary["invariant_mismatch"] = rep.invariant_mismatch;
  summary["rechart_events"] = rep.rechart_events;
  summary["checkpoints"] = rep.checkpoints;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbit-quadric reduction toolkit for 2x2 isomonodromic systems"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  std::vector<int> n_values{3, 4, 5};
  int samples = 100;
  CLI::App* verify = app.add_subcommand("verify", "run the seeded property suites");
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--n", n_values, "configuration sizes, comma separated")
      ->delimiter(',');
  verify->add_option("--samples", samples, "samples per property")
      ->check(CLI::PositiveNumber);

  std::string reduce_in, reduce_out;
  CLI::App* reduce_cmd =
      app.add_subcommand("reduce", "reduce an instance to chart coordinates");
  reduce_cmd->add_option("-i,--input", reduce_in, "instance JSON")->required();
  reduce_cmd->add_option("-o,--output", reduce_out, "output path (default stdout)");

  std::string lift_in, lift_out;
  CLI::App* lift_cmd =
      app.add_subcommand("lift", "rebuild a normal-form instance from reduced data");
  lift_cmd->add_option("-i,--input", lift_in, "reduced JSON")->required();
  lift_cmd->add_option("-o,--output", lift_out, "output path (default stdout)");

  std::string flow_in, flow_path, flow_out;
  int flow_k = 0;
  bool flow_pin = false;
  double flow_tol = 1e-10;
  int flow_checkpoints = 0;
  CLI::App* flow_cmd =
      app.add_subcommand("flow", "integrate the full system along a pole path");
  flow_cmd->add_option("-i,--input", flow_in, "instance JSON")->required();
  flow_cmd->add_option("--k", flow_k, "index of the moving pole")->required();
  flow_cmd->add_option("--path", flow_path, "comma-separated complex waypoints")
      ->required();
  flow_cmd->add_flag("--pin-012", flow_pin, "pin poles 1..3 to 0,1,2 (n=3 only)");
  flow_cmd->add_option("--tol", flow_tol, "local error tolerance per step");
  flow_cmd->add_option("--checkpoints", flow_checkpoints,
                       "rows per path segment (0: every accepted step)");
  flow_cmd->add_option("--out", flow_out, "write the CSV here (summary to stdout)");

  std::string cmp_in, cmp_path;
  int cmp_k = 0;
  bool cmp_pin = false;
  double cmp_tol = 1e-10;
  int cmp_checkpoints = 8;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "cross-validate the full flow against the reduced flow");
  cmp_cmd->add_option("-i,--input", cmp_in, "instance JSON")->required();
  cmp_cmd->add_option("--k", cmp_k, "index of the moving pole")->required();
  cmp_cmd->add_option("--path", cmp_path, "comma-separated complex waypoints")
      ->required();
  cmp_cmd->add_flag("--pin-012", cmp_pin, "pin poles 1..3 to 0,1,2 (n=3 only)");
  cmp_cmd->add_option("--tol", cmp_tol, "local error tolerance per step");
  cmp_cmd->add_option("--checkpoints", cmp_checkpoints, "checkpoints per segment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems are input errors
  }

  try {
    if (verify->parsed()) return run_verify(seed, n_values, samples);
    if (reduce_cmd->parsed()) return run_reduce(reduce_in, reduce_out);
    if (lift_cmd->parsed()) return run_lift(lift_in, lift_out);
    if (flow_cmd->parsed()) {
      return run_flow(flow_in, flow_k, flow_path, flow_pin, flow_tol,
                      flow_checkpoints, flow_out);
    }
    if (cmp_cmd->parsed()) {
      return run_compare(cmp_in, cmp_k, cmp_path, cmp_pin, cmp_tol, cmp_checkpoints);
    }
  } catch (const ValidationError& e) {
    log_error(e.what());
    return 2;
  } catch (const NumericError& e) {
    log_error(e.what());
    return 3;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 3;
  }
  return 0;
}
