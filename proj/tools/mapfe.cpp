#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "mapfe/bench.hpp"
#include "mapfe/cbs.hpp"
#include "mapfe/conflict.hpp"
#include "mapfe/oracle.hpp"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kTimeout = 2, kUsage = 3 };

bool on_off(const std::string& s) { return s == "on"; }

int run_solve(const std::string& map, const std::string& scen, const std::string& ec, const std::string& mdde,
              double time_limit, const std::string& out_path) {
  const auto instance = mapfe::load_instance(map, scen);
  mapfe::SolverConfig cfg;
  cfg.ec_enabled = on_off(ec);
  cfg.mdde_enabled = on_off(mdde);
  cfg.time_limit = time_limit;
  const auto sol = mapfe::solve(instance, cfg);
  const auto& st = sol.stats;
  if (sol.status == mapfe::SolveStatus::Solved) {
    std::cout << "g: " << sol.soc << '\n';
    mapfe::write_plan(std::cout, sol.paths);
  } else {
    std::cout << (sol.status == mapfe::SolveStatus::Timeout ? "timeout" : "infeasible") << '\n';
  }
  std::cout << "expanded: " << st.expanded << "\ngenerated: " << st.generated << "\nbypasses: " << st.bypasses
            << "\nruntime_s: " << st.runtime << "\nmdde_time_fraction: " << st.mdde_time_fraction << '\n';
  if (sol.status == mapfe::SolveStatus::Timeout) return kTimeout;
  if (sol.status == mapfe::SolveStatus::Infeasible) return kInvalid;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    mapfe::write_plan(out, sol.paths);
  }
  return kOk;
}

int run_validate(const std::string& map, const std::string& scen, const std::string& plan_path) {
  const auto instance = mapfe::load_instance(map, scen);
  std::ifstream in(plan_path);
  if (!in) throw std::runtime_error("cannot read " + plan_path);
  const auto paths = mapfe::parse_plan(in);
  const auto report = mapfe::validate(instance, paths);
  for (const auto& msg : report.invalid) std::cout << "invalid path: " << msg << '\n';
  for (const auto& c : report.conflicts) std::cout << c << '\n';
  if (report.ok()) {
    std::cout << "OK\n";
    return kOk;
  }
  return kInvalid;
}

int run_oracle(const std::string& map, const std::string& scen, int horizon, std::size_t cap) {
  const auto instance = mapfe::load_instance(map, scen);
  const auto r = mapfe::oracle_solve(instance, horizon, cap);
  if (r.solved) {
    std::cout << "g: " << r.soc << '\n';
    mapfe::write_plan(std::cout, r.paths);
    return kOk;
  }
  std::cout << (r.exhausted ? "state budget exhausted" : "infeasible within horizon") << '\n';
  return r.exhausted ? kTimeout : kInvalid;
}

int run_gen(const mapfe::GenParams& params, int agents, std::uint64_t seed, const std::string& map_out,
            const std::string& scen_out) {
  const auto instance = mapfe::gen_instance(params, agents, seed);
  std::ofstream m(map_out);
  std::ofstream s(scen_out);
  if (!m || !s) throw std::runtime_error("cannot write output files");
  mapfe::write_map(m, instance.graph());
  mapfe::write_scenario(s, instance);
  return kOk;
}

int run_bench(const std::string& config_path, const std::string& out_path, const std::string& summary_path) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot read " + config_path);
  const auto cfg = mapfe::parse_experiment_config(in);
  const auto records = mapfe::run_suite(cfg);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  mapfe::write_csv(out, records);
  const auto cells = mapfe::summarize(records);
  if (summary_path.empty()) {
    mapfe::write_summary(std::cout, cells);
  } else {
    std::ofstream s(summary_path);
    mapfe::write_summary(s, cells);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal multi-agent path finding with elevators"};
  app.require_subcommand(1);

  std::string map, scen, plan, out, ec = "on", mdde = "on", config, summary, map_out, scen_out;
  double time_limit = 60.0;
  int horizon = 200, agents = 4;
  std::size_t state_cap = mapfe::kDefaultOracleStateCap;
  std::uint64_t seed = 1;
  mapfe::GenParams params;

  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("--map", map, "map file")->required();
  solve->add_option("--scen", scen, "scenario file")->required();
  solve->add_option("--ec", ec, "elevator constraints")->check(CLI::IsMember({"on", "off"}));
  solve->add_option("--mdde", mdde, "MDD-E conflict selection and bypass")->check(CLI::IsMember({"on", "off"}));
  solve->add_option("--time-limit", time_limit, "seconds")->check(CLI::PositiveNumber);
  solve->add_option("--out", out, "write the plan here");

  auto* validate = app.add_subcommand("validate", "check a plan for conflicts");
  validate->add_option("--map", map, "map file")->required();
  validate->add_option("--scen", scen, "scenario file")->required();
  validate->add_option("--plan", plan, "plan file")->required();

  auto* oracle = app.add_subcommand("oracle", "exact optimum by joint-state search");
  oracle->add_option("--map", map, "map file")->required();
  oracle->add_option("--scen", scen, "scenario file")->required();
  oracle->add_option("--horizon", horizon, "largest sum-of-costs considered")->check(CLI::PositiveNumber);
  oracle->add_option("--state-cap", state_cap, "expansion budget")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--width", params.width)->check(CLI::PositiveNumber);
  gen->add_option("--height", params.height)->check(CLI::PositiveNumber);
  gen->add_option("--obstacles", params.obstacle_rate, "obstacle rate in [0,1)")->check(CLI::Range(0.0, 0.999));
  gen->add_option("--floors", params.floors)->check(CLI::PositiveNumber);
  gen->add_option("--elevators", params.elevators)->check(CLI::NonNegativeNumber);
  gen->add_option("--tfloor", params.t_floor)->check(CLI::PositiveNumber);
  gen->add_option("--agents", agents)->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", seed);
  gen->add_option("--map-out", map_out)->required();
  gen->add_option("--scen-out", scen_out)->required();

  auto* bench = app.add_subcommand("bench", "run an experiment suite");
  bench->add_option("--config", config, "experiment config")->required();
  bench->add_option("--out", out, "CSV output")->required();
  bench->add_option("--summary", summary, "per-cell summary CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*solve) return run_solve(map, scen, ec, mdde, time_limit, out);
    if (*validate) return run_validate(map, scen, plan);
    if (*oracle) return run_oracle(map, scen, horizon, state_cap);
    if (*gen) return run_gen(params, agents, seed, map_out, scen_out);
    if (*bench) return run_bench(config, out, summary);
  } catch (const mapfe::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kUsage;
}
