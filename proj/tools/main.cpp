#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ringmpc/config.hpp"
#include "ringmpc/io.hpp"
#include "ringmpc/mechanism.hpp"
#include "ringmpc/simulator.hpp"
#include "ringmpc/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ringmpc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_root;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file")
      ->required();
  cmd->add_option("--out", opts.out_root,
                  "output root directory (default: $RINGMPC_OUT or ./out)");
  cmd->add_option("--seed", opts.seed, "override the noise seed");
  cmd->add_option("--jobs", opts.jobs, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--override", opts.overrides,
                  "config override as path.to.key=value (repeatable)");
}

void fail_json(const std::string& kind, const std::string& message) {
  json err;
  err["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

fs::path prepare_out_dir(const CommonOpts& opts, const std::string& label) {
  fs::path root;
  if (!opts.out_root.empty()) {
    root = opts.out_root;
  } else if (const char* env = std::getenv("RINGMPC_OUT")) {
    root = env;
  } else {
    root = "out";
  }
  const fs::path dir = root / label;
  fs::create_directories(dir);
  return dir;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << "\n";
}

ResolvedConfig resolve(const CommonOpts& opts) {
  const json raw = load_config_file(opts.config_path);
  const std::string stem = fs::path(opts.config_path).stem().string();
  return resolve_config(raw, opts.overrides, stem);
}

void apply_seed(ScenarioConfig& cfg, const CommonOpts& opts) {
  if (opts.seed.has_value()) cfg.noise.seed = *opts.seed;
}

json summary_common(const ScenarioConfig& cfg, const RunSummary& s) {
  json j;
  j["config"] = scenario_to_json(cfg);
  j["order"] = {{"mean_velocity", s.order.mean_velocity},
                {"amplitude", s.order.amplitude}};
  j["steps"] = s.steps;
  j["min_clearance"] = s.min_clearance;
  j["safety_event_count"] = s.safety_event_count;
  if (s.first_event.has_value())
    j["first_safety_event"] = {{"step", s.first_event->step},
                               {"vehicle", s.first_event->vehicle},
                               {"clearance", s.first_event->clearance}};
  j["final_round_delta_mean"] = s.final_round_delta_mean;
  j["final_round_delta_max"] = s.final_round_delta_max;
  return j;
}

int run_simulate(const CommonOpts& opts) {
  SimulatePlan plan;
  fs::path dir;
  try {
    const ResolvedConfig rc = resolve(opts);
    plan = simulate_plan_from_json(rc.doc);
    for (auto& r : plan.runs) apply_seed(r.scenario, opts);
    dir = prepare_out_dir(opts, rc.label);
  } catch (const std::exception& e) {
    fail_json("config", e.what());
    return kExitConfig;
  }
  try {
    for (const NamedRun& r : plan.runs) {
      const RunResult res = run_scenario(r.scenario);
      write_json_file(dir / (r.name + ".summary.json"),
                      summary_common(r.scenario, res.summary));
      {
        CsvWriter csv(dir / (r.name + ".speeds.csv"));
        csv.row("t", "v_mean", "v_min", "v_max");
        for (std::size_t s = 0; s < res.v_mean.size(); ++s)
          csv.row(s * r.scenario.vehicle.dt, res.v_mean[s], res.v_min[s],
                  res.v_max[s]);
      }
      if (res.trajectory.has_value()) {
        const FleetTrajectory& tr = *res.trajectory;
        CsvWriter csv(dir / (r.name + ".trajectory.csv"));
        csv.row("t", "vehicle", "x", "v", "a", "u", "gap");
        for (std::int64_t s = 0; s < tr.steps; ++s)
          for (int i = 0; i < tr.n; ++i) {
            const std::size_t k = static_cast<std::size_t>(s) * tr.n + i;
            csv.row(s * tr.dt, i, tr.x[k], tr.v[k], tr.a[k], tr.u[k],
                    tr.gap[k]);
          }
      }
      if (!r.scenario.tau_probes.empty()) {
        CsvWriter csv(dir / (r.name + ".probes.csv"));
        csv.row("t", "vehicle", "depth", "u");
        const int n = r.scenario.geometry.vehicle_count;
        for (std::size_t p = 0; p < r.scenario.tau_probes.size(); ++p) {
          const auto& actions = res.probe_actions[p];
          for (std::size_t k = 0; k < actions.size(); ++k)
            csv.row((k / n) * r.scenario.vehicle.dt,
                    static_cast<int>(k % n), r.scenario.tau_probes[p],
                    actions[k]);
        }
      }
      std::cout << r.name
                << ": V=" << format_double(res.summary.order.mean_velocity)
                << " A=" << format_double(res.summary.order.amplitude)
                << " min_clearance="
                << format_double(res.summary.min_clearance) << "\n";
    }
    std::cout << "wrote " << dir.string() << "\n";
  } catch (const std::exception& e) {
    fail_json("runtime", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

int run_sweep(const CommonOpts& opts) {
  SweepSpec spec;
  fs::path dir;
  try {
    const ResolvedConfig rc = resolve(opts);
    spec = sweep_from_json(rc.doc);
    apply_seed(spec.base, opts);
    spec.jobs = opts.jobs;
    dir = prepare_out_dir(opts, rc.label);
  } catch (const std::exception& e) {
    fail_json("config", e.what());
    return kExitConfig;
  }
  try {
    const SweepResult res = optimize_v_star(spec);
    {
      CsvWriter csv(dir / "points.csv");
      csv.row("algorithm", "n", "rho", "v_star", "mean_velocity", "amplitude",
              "feasible");
      for (const SweepPoint& p : res.points)
        csv.row(p.algorithm, p.n, p.rho, p.v_star, p.mean_velocity,
                p.amplitude, p.feasible);
    }
    {
      CsvWriter csv(dir / "choices.csv");
      csv.row("algorithm", "n", "rho", "found", "v_star", "mean_velocity",
              "amplitude");
      for (const VStarChoice& c : res.choices)
        csv.row(c.algorithm, c.n, c.rho, c.found, c.v_star, c.mean_velocity,
                c.amplitude);
    }
    json summary;
    summary["choices"] = json::array();
    for (const VStarChoice& c : res.choices)
      summary["choices"].push_back({{"algorithm", c.algorithm},
                                    {"n", c.n},
                                    {"rho", c.rho},
                                    {"found", c.found},
                                    {"v_star", c.v_star},
                                    {"mean_velocity", c.mean_velocity},
                                    {"amplitude", c.amplitude}});
    if (!res.baseline.empty()) {
      CsvWriter csv(dir / "baseline.csv");
      csv.row("algorithm", "n", "rho", "v_star", "mean_velocity", "amplitude");
      summary["baseline"] = json::array();
      summary["benefit"] = json::array();
      for (const SweepPoint& p : res.baseline) {
        csv.row(p.algorithm, p.n, p.rho, p.v_star, p.mean_velocity,
                p.amplitude);
        summary["baseline"].push_back({{"algorithm", p.algorithm},
                                       {"n", p.n},
                                       {"rho", p.rho},
                                       {"v_star", p.v_star},
                                       {"mean_velocity", p.mean_velocity},
                                       {"amplitude", p.amplitude}});
        for (const VStarChoice& c : res.choices) {
          if (c.n != p.n || !c.found || p.mean_velocity <= 0.0) continue;
          summary["benefit"].push_back(
              {{"algorithm", c.algorithm},
               {"n", c.n},
               {"rho", c.rho},
               {"velocity_ratio", c.mean_velocity / p.mean_velocity}});
        }
      }
    }
    write_json_file(dir / "summary.json", summary);
    for (const VStarChoice& c : res.choices)
      std::cout << c.algorithm << " n=" << c.n << ": "
                << (c.found ? "v_star=" + format_double(c.v_star) +
                                  " V=" + format_double(c.mean_velocity)
                            : std::string("no feasible point"))
                << "\n";
    std::cout << "wrote " << dir.string() << "\n";
  } catch (const std::exception& e) {
    fail_json("runtime", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

int run_stability(const CommonOpts& opts) {
  StabilityPlan plan;
  fs::path dir;
  try {
    const ResolvedConfig rc = resolve(opts);
    plan = stability_plan_from_json(rc.doc);
    apply_seed(plan.scenario, opts);
    dir = prepare_out_dir(opts, rc.label);
  } catch (const std::exception& e) {
    fail_json("config", e.what());
    return kExitConfig;
  }
  try {
    json summary;
    summary["results"] = json::array();
    for (const AlgorithmSpec& alg : plan.algorithms) {
      ScenarioConfig cfg = plan.scenario;
      cfg.algorithm = alg;
      cfg.grid.order = alg.curve_order;
      const StabilityAnalysis a = analyze_stability(cfg);
      json r;
      r["algorithm"] = alg.name;
      r["iterations"] = alg.iterations;
      r["n"] = a.n;
      r["rho"] = a.rho;
      r["v_star"] = a.v_star;
      r["verdict"] = to_string(a.result.verdict);
      if (a.fixed_point.has_value()) {
        r["fixed_point"] = {{"velocity", a.fixed_point->velocity},
                            {"spacing", a.fixed_point->spacing},
                            {"action_residual", a.fixed_point->action_residual}};
        r["max_magnitude"] = a.result.max_magnitude;
        r["argmax_k"] = a.result.argmax_k;
        r["translational_root"] = {
            {"re", a.result.translational_root.real()},
            {"im", a.result.translational_root.imag()}};
        r["beta_x_sum"] = a.jacobian.beta_x_sum();
        r["fd_flagged"] = a.jacobian.any_flag();
        json betas;
        for (int l = -a.jacobian.reach; l <= a.jacobian.reach; ++l) {
          betas["x"].push_back(a.jacobian.beta_x(l));
          betas["v"].push_back(a.jacobian.beta_v(l));
          betas["a"].push_back(a.jacobian.beta_a(l));
        }
        betas["first_offset"] = -a.jacobian.reach;
        r["sensitivities"] = betas;

        CsvWriter csv(dir / (alg.name + "_T" +
                             std::to_string(alg.iterations) + ".modes.csv"));
        csv.row("k", "re_bx", "im_bx", "re_bv", "im_bv", "re_ba", "im_ba",
                "re_z1", "im_z1", "re_z2", "im_z2", "max_mag");
        for (const ModeRoots& m : a.spectrum.modes)
          csv.row(m.k, m.bx.real(), m.bx.imag(), m.bv.real(), m.bv.imag(),
                  m.ba.real(), m.ba.imag(), m.z1.real(), m.z1.imag(),
                  m.z2.real(), m.z2.imag(),
                  std::max(std::abs(m.z1), std::abs(m.z2)));
      }
      summary["results"].push_back(r);
      std::cout << alg.name << " T=" << alg.iterations << ": "
                << to_string(a.result.verdict);
      if (a.fixed_point.has_value())
        std::cout << " (|z|max=" << format_double(a.result.max_magnitude)
                  << " at k=" << a.result.argmax_k
                  << ", v_bar=" << format_double(a.fixed_point->velocity)
                  << ")";
      std::cout << "\n";
    }
    write_json_file(dir / "summary.json", summary);
    std::cout << "wrote " << dir.string() << "\n";
  } catch (const std::exception& e) {
    fail_json("runtime", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

int run_benchmark(const CommonOpts& opts) {
  BenchmarkPlan plan;
  fs::path dir;
  try {
    const ResolvedConfig rc = resolve(opts);
    plan = benchmark_plan_from_json(rc.doc);
    apply_seed(plan.scenario, opts);
    dir = prepare_out_dir(opts, rc.label);
  } catch (const std::exception& e) {
    fail_json("config", e.what());
    return kExitConfig;
  }
  try {
    const BenchmarkResult r =
        benchmark_scenario(plan.scenario, plan.warmup_steps);
    json j;
    j["config"] = scenario_to_json(plan.scenario);
    j["n"] = r.n;
    j["steps"] = r.steps;
    j["mean_ms"] = r.mean_ms;
    j["p50_ms"] = r.p50_ms;
    j["p90_ms"] = r.p90_ms;
    j["p99_ms"] = r.p99_ms;
    j["max_ms"] = r.max_ms;
    write_json_file(dir / "benchmark.json", j);
    std::cout << "n=" << r.n << " steps=" << r.steps
              << " mean=" << format_double(r.mean_ms)
              << "ms p50=" << format_double(r.p50_ms)
              << "ms p90=" << format_double(r.p90_ms)
              << "ms p99=" << format_double(r.p99_ms) << "ms\n";
    std::cout << "wrote " << dir.string() << "\n";
  } catch (const std::exception& e) {
    fail_json("runtime", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

int run_list() {
  for (const std::string& name : experiment_names()) {
    const json doc = experiment_config(name);
    std::cout << name << "\t" << to_string(config_kind(doc)) << "\t"
              << experiment_summary(name) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ring-road traffic simulation with utility-maximizing drivers"};
  app.require_subcommand(1);

  CommonOpts sim_opts, sweep_opts, stab_opts, bench_opts;
  CLI::App* sim =
      app.add_subcommand("simulate", "run one or more closed-loop scenarios");
  add_common(sim, sim_opts);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "score ideal-speed candidates across densities");
  add_common(sweep, sweep_opts);
  CLI::App* stab = app.add_subcommand(
      "stability", "linear stability of homogeneous flow");
  add_common(stab, stab_opts);
  CLI::App* bench =
      app.add_subcommand("benchmark", "wall-clock cost per step");
  add_common(bench, bench_opts);
  CLI::App* list =
      app.add_subcommand("list-experiments", "show canned experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (sim->parsed()) return run_simulate(sim_opts);
  if (sweep->parsed()) return run_sweep(sweep_opts);
  if (stab->parsed()) return run_stability(stab_opts);
  if (bench->parsed()) return run_benchmark(bench_opts);
  if (list->parsed()) return run_list();
  return kExitConfig;
}
