#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mapd/mapd.hpp"

using namespace mapd;

namespace {

enum Exit { kOk = 0, kError = 1, kInfeasible = 2, kTimeoutWithPlan = 3, kTimeoutNoPlan = 4 };

int exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    case SolveStatus::TimeoutWithPlan: return kTimeoutWithPlan;
    case SolveStatus::TimeoutNoPlan: return kTimeoutNoPlan;
  }
  return kError;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_file(path, text);
}

struct SolveOptions {
  std::string instance;
  std::string objective;
  int z = 0;
  bool z_sweep = false;
  std::optional<double> timeout_s;
  std::string backend = "native";
  bool no_intermediates = false;
  std::optional<std::uint64_t> seed;
  std::string plan_out = "-";
  std::string log_out;
};

Instance solve_input(const SolveOptions& o) {
  Instance inst;
  if (!o.instance.empty()) {
    inst = load_instance(o.instance);
  } else {
    GenParams p;
    p.seed = *o.seed;
    inst = generate_random_instance(p);
  }
  if (!o.objective.empty()) inst.objective = parse_objective(o.objective);
  if (o.no_intermediates) inst.workspace = inst.workspace.without_intermediates();
  require_valid(inst);
  return inst;
}

int run_solve(const SolveOptions& o) {
  const Instance inst = solve_input(o);
  IntegratedConfig cfg;
  cfg.z = o.z;
  cfg.timeout_s = o.timeout_s;
  cfg.backend = Backend::parse(o.backend);
  const int base_z = o.z > 0 ? o.z : effective_z(inst);

  std::vector<int> zs{base_z};
  if (o.z_sweep) zs = {base_z, base_z + 2, base_z + 4};
  int code = kError;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    cfg.z = zs[k];
    const SolveResult r = integrated_planner(inst, cfg);
    std::cerr << "z " << r.z << " status " << to_string(r.status) << " cost "
              << (r.cost == kNoPlanCost ? std::string("none") : std::to_string(r.cost)) << " iterations " << r.log.size()
              << " path_calls " << r.path_planner_calls << " time_s " << fixed(r.elapsed_s, 3) << "\n";
    if (k == 0) code = exit_code(r.status);
    if (r.plan) {
      const auto diags = validate_plan(inst, *r.plan);
      if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << "invalid plan: " << d << "\n";
        return kError;
      }
      if (k + 1 == zs.size() || !o.z_sweep) emit(o.plan_out, render_plan_table(*r.plan));
    }
    if (!o.log_out.empty()) {
      std::string path = o.log_out;
      if (o.z_sweep) path += "." + std::to_string(r.z);
      write_file(path, log_to_json(inst, r).dump(2) + "\n");
    }
  }
  return code;
}

std::string overlay(const Instance& inst) {
  std::string text = inst.workspace.to_text();
  const int stride = inst.workspace.width() + 1;
  auto put = [&](Cell c, char g) { text[static_cast<std::size_t>(c.y) * stride + c.x] = g; };
  for (const auto& t : inst.tasks) {
    put(t.pickup, 'P');
    put(t.drop, 'D');
  }
  for (const auto& r : inst.robots) put(r.start, 'R');
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal task and path planning for multi-robot pickup and delivery"};
  app.require_subcommand(1);

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Solve an instance to optimality");
  solve->add_option("instance", so.instance, "Instance JSON file");
  solve->add_option("--objective", so.objective, "makespan or total-cost (default: the instance's)");
  solve->add_option("--z", so.z, "Action-step budget (default: minimum feasible)");
  solve->add_flag("--z-sweep", so.z_sweep, "Solve at Z, Z+2 and Z+4");
  solve->add_option("--timeout-s", so.timeout_s, "Wall-clock limit in seconds (default 3600)");
  solve->add_option("--backend", so.backend, "native or smtlib:<solver command>");
  solve->add_flag("--no-intermediates", so.no_intermediates, "Ignore intermediate cells");
  solve->add_option("--seed", so.seed, "Solve a generated 10x10 instance with this seed instead of a file");
  solve->add_option("-o,--plan-out", so.plan_out, "Where to write the plan table (default stdout)");
  solve->add_option("--log-out", so.log_out, "Write the iteration log as JSON");

  GenParams gp;
  std::string gen_style = "random", gen_objective = "makespan", gen_out = "-";
  int gen_z = 0;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--seed", gp.seed, "Random seed");
  gen->add_option("--width", gp.width, "Map width");
  gen->add_option("--height", gp.height, "Map height");
  gen->add_option("--density", gp.obstacle_density, "Obstacle density for random maps");
  gen->add_option("--robots", gp.robots, "Number of robots");
  gen->add_option("--tasks", gp.tasks, "Number of tasks");
  gen->add_option("--intermediates", gp.intermediates, "Number of intermediate cells");
  gen->add_option("--style", gen_style, "random or warehouse");
  gen->add_option("--capacity", gp.capacity, "Capacity of every robot");
  gen->add_option("--objective", gen_objective, "makespan or total-cost");
  gen->add_option("--z", gen_z, "Action-step budget stored in the instance");
  gen->add_option("-o,--out", gen_out, "Output file (default stdout)");

  std::string val_instance, val_plan;
  auto* validate = app.add_subcommand("validate", "Check a plan table against an instance");
  validate->add_option("instance", val_instance, "Instance JSON file")->required();
  validate->add_option("plan", val_plan, "Plan table file")->required();

  std::string ren_instance, ren_plan;
  auto* render = app.add_subcommand("render", "Draw an instance, or normalise a plan table");
  render->add_option("instance", ren_instance, "Instance JSON file")->required();
  render->add_option("--plan", ren_plan, "Plan table to re-render");

  std::string bench_config, bench_csv_out, bench_table_out;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep");
  bench->add_option("config", bench_config, "Benchmark JSON file")->required();
  bench->add_option("--csv", bench_csv_out, "Write per-run CSV here");
  bench->add_option("--table", bench_table_out, "Write the summary table here (default stdout)");

  std::string smt_instance, smt_out = "-";
  int smt_z = 0, smt_lo = 0;
  std::optional<int> smt_hi;
  auto* smt = app.add_subcommand("emit-smt", "Write the SMT-LIB2 decision problem");
  smt->add_option("instance", smt_instance, "Instance JSON file")->required();
  smt->add_option("--z", smt_z, "Action-step budget");
  smt->add_option("--lo", smt_lo, "Lowest admissible cost");
  smt->add_option("--hi", smt_hi, "Highest admissible cost (default: certified bound)");
  smt->add_option("-o,--out", smt_out, "Output file (default stdout)");

  std::string aud_instance, aud_log;
  double aud_timeout = kDefaultTimeoutSeconds;
  auto* audit = app.add_subcommand("audit", "Re-verify the optimality argument of an iteration log");
  audit->add_option("instance", aud_instance, "Instance JSON file")->required();
  audit->add_option("log", aud_log, "Iteration log JSON")->required();
  audit->add_option("--timeout-s", aud_timeout, "Wall-clock limit in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*solve) {
      if (so.instance.empty() && !so.seed) throw CLI::ValidationError("solve", "give an instance file or --seed");
      return run_solve(so);
    }
    if (*gen) {
      gp.style = parse_map_style(gen_style);
      gp.objective = parse_objective(gen_objective);
      Instance inst = generate_random_instance(gp);
      inst.z = gen_z;
      emit(gen_out, dump_instance(inst));
      return kOk;
    }
    if (*validate) {
      const Instance inst = load_instance(val_instance);
      const auto diags = validate_plan_table(inst, parse_plan_table(read_file(val_plan)));
      for (const auto& d : diags) std::cout << d << "\n";
      if (!diags.empty()) return kError;
      std::cout << "valid\n";
      return kOk;
    }
    if (*render) {
      const Instance inst = load_instance(ren_instance);
      if (ren_plan.empty()) std::cout << overlay(inst);
      else std::cout << render_plan_table(parse_plan_table(read_file(ren_plan)));
      return kOk;
    }
    if (*bench) {
      const BenchSpec spec = bench_spec_from_json(ordered_json::parse(read_file(bench_config)));
      const BenchReport rep = run_benchmark(spec);
      if (!bench_csv_out.empty()) emit(bench_csv_out, bench_csv(rep));
      emit(bench_table_out, bench_table(rep));
      return kOk;
    }
    if (*smt) {
      const Instance inst = load_instance(smt_instance);
      require_valid(inst);
      const TaskModel model(inst);
      const int z = smt_z > 0 ? smt_z : effective_z(inst);
      emit(smt_out, emit_smtlib(model, z, {}, smt_lo, smt_hi.value_or(certified_cost_bound(model, z))));
      return kOk;
    }
    if (*audit) {
      const Instance inst = load_instance(aud_instance);
      const LoadedLog log = log_from_json(ordered_json::parse(read_file(aud_log)));
      const AuditReport rep =
          audit_log(inst, log.z, log.records, log.cost.value_or(kNoPlanCost), Deadline::after(aud_timeout));
      for (const auto& v : rep.violations) std::cout << v << "\n";
      std::cout << rep.probes << " probes, " << rep.violations.size() << " violations\n";
      return rep.ok() ? kOk : kError;
    }
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
