// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--update-goldens] [--only N]

#include <climits>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace mapd;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MAPD_DATA_DIR;

// Pinned limits.
constexpr double kAnchorSeconds = 1.0;
constexpr int kOracleInstances = 200;
constexpr double kOracleSeconds = 600.0;
constexpr int kCorpusSize = 50;
constexpr int kMicroInstances = 100;
constexpr double kMicroSeconds = 300.0;
constexpr double kWarehouseSeconds = 360.0;  // a tenth of the default timeout
constexpr int kSweepSeeds = 10;

// Golden values recorded after the first verified run.
constexpr int kFloorMakespanWith = 24, kFloorTotalWith = 45;
constexpr int kFloorMakespanWithout = 26, kFloorTotalWithout = 42;
constexpr int kMultiOptimumCount = 32;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

void report(int n, const std::string& name, const Outcome& o, double secs) {
  std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << fixed(secs, 2)
            << " s] " << o.detail << std::endl;
}

const AssignedAction& step_of(const TaskAssignment& a, int robot, int step) { return a.robots[robot][step - 1]; }

// ---------------------------------------------------------------------------

Outcome anchors() {
  Outcome o;
  const Instance base = load_instance(kData / "floor_8x7.json");
  const Action s1{ActionKind::Stay, kNone, {7, 3}};

  Instance direct = base;
  direct.workspace = base.workspace.without_intermediates();
  const TaskModel dm(direct);
  auto d = make_assignment(dm, {{{ActionKind::Pick, 1, {1, 6}}, {ActionKind::Pick, 0, {0, 1}}},
                                {{ActionKind::Drop, 1, {0, 3}}, {ActionKind::Drop, 0, {7, 6}}},
                                {{ActionKind::Return, kNone, {0, 0}}, {ActionKind::Return, kNone, {7, 3}}},
                                {{ActionKind::Stay, kNone, {0, 0}}, s1},
                                {{ActionKind::Stay, kNone, {0, 0}}, s1}});
  if (!d) {
    o.fail("direct delivery sequence rejected");
    return o;
  }
  const std::vector<std::pair<int, int>> direct_times{{step_of(*d, 1, 1).time, 10}, {step_of(*d, 1, 2).time, 23},
                                                      {step_of(*d, 1, 3).time, 26}, {step_of(*d, 0, 3).time, 16}};
  for (auto [got, want] : direct_times)
    if (got != want) o.fail("direct: got " + std::to_string(got) + " want " + std::to_string(want));

  const TaskModel tm(base);
  auto t = make_assignment(tm, {{{ActionKind::Pick, 0, {0, 1}}, s1},
                                {{ActionKind::DropIntermediate, 0, {4, 4}}, s1},
                                {{ActionKind::Pick, 1, {1, 6}}, {ActionKind::PickIntermediate, 0, {4, 4}}},
                                {{ActionKind::Drop, 1, {0, 3}}, {ActionKind::Drop, 0, {7, 6}}},
                                {{ActionKind::Return, kNone, {0, 0}}, {ActionKind::Return, kNone, {7, 3}}}});
  if (!t) {
    o.fail("transfer sequence rejected");
    return o;
  }
  const std::vector<std::pair<int, int>> transfer_times{{step_of(*t, 0, 2).time, 10}, {step_of(*t, 1, 3).time, 12},
                                                        {step_of(*t, 1, 4).time, 18}, {step_of(*t, 1, 5).time, 21},
                                                        {step_of(*t, 0, 5).time, 24}};
  for (auto [got, want] : transfer_times)
    if (got != want) o.fail("transfer: got " + std::to_string(got) + " want " + std::to_string(want));

  // The realized plan keeps the same timestamps.
  const PathResult r = cbs_pc(base, *t);
  if (r.status != PathStatus::Solved) {
    o.fail("transfer plan not realized");
    return o;
  }
  const PlanTable table = to_table(*r.plan);
  const std::vector<std::tuple<int, int, std::string>> labels{
      {10, 0, "InterDrop_1"}, {12, 1, "InterPick_1"}, {18, 1, "Drop_1"}, {21, 1, "Return"}, {24, 0, "Return"}};
  for (const auto& [time, robot, label] : labels)
    if (static_cast<int>(table.rows.size()) <= time || table.rows[time][robot].label != label)
      o.fail("plan row " + std::to_string(time) + " r" + std::to_string(robot + 1) + " is not " + label);
  if (o.pass) o.detail = "10/12/18/21/24 and direct 10/26";
  return o;
}

// Mostly two robots on narrow or cluttered floors, so that collisions often
// push the realized cost above the task-level cost.
Instance oracle_instance(std::uint64_t seed, Objective obj) {
  GenParams p;
  p.seed = seed;
  p.width = 2 + static_cast<int>(seed % 5);
  p.height = 3 + static_cast<int>((seed / 5) % 4);
  p.obstacle_density = 0.1 * static_cast<double>(seed % 4);
  p.robots = seed % 4 == 0 ? 1 : 2;
  p.tasks = 1 + static_cast<int>((seed / 2) % 2);
  p.intermediates = static_cast<int>((seed / 3) % 2);
  p.objective = obj;
  Instance inst = generate_random_instance(p);
  if (seed % 5 == 0) inst.tasks[0].deadline = 3 + static_cast<int>(seed % 7);
  return inst;
}

struct OracleRun {
  Instance inst;
  int z = 0;
  SolveResult res;
};

std::vector<OracleRun> oracle_runs;

Outcome oracle_equivalence() {
  Outcome o;
  int solved = 0, infeasible = 0, multi = 0;
  // Seeds whose floor cannot hold every placement are skipped.
  for (std::uint64_t k = 0; static_cast<int>(oracle_runs.size()) < kOracleInstances; ++k) {
    const std::uint64_t seed = 1 + k / 2;
    const Objective obj = k % 2 ? Objective::TotalCost : Objective::Makespan;
    OracleRun run;
    try {
      run.inst = oracle_instance(seed, obj);
    } catch (const std::exception&) {
      continue;
    }
    run.z = effective_z(run.inst);
    const std::string tag = "seed " + std::to_string(seed) + " " + to_string(obj) + ": ";
    if (run.z > 5) o.fail(tag + "z above 5");
    run.res = integrated_planner(run.inst);
    const auto expected = oracle::global_optimum(run.inst, run.z);
    if ((run.res.status == SolveStatus::Optimal) != expected.has_value()) {
      o.fail(tag + "status " + to_string(run.res.status));
    } else if (expected) {
      ++solved;
      if (run.res.cost != *expected)
        o.fail(tag + "cost " + std::to_string(run.res.cost) + " oracle " + std::to_string(*expected));
      const auto diags = validate_plan(run.inst, *run.res.plan);
      if (!diags.empty()) o.fail(tag + diags.front());
    } else {
      ++infeasible;
    }
    multi += run.res.log.size() > 1;
    oracle_runs.push_back(std::move(run));
  }
  if (o.pass) o.detail = std::to_string(solved) + " optimal, " + std::to_string(infeasible) + " infeasible, " + std::to_string(multi) +
                       " needing several probes, 0 mismatches";
  return o;
}

Outcome optimality_audit() {
  Outcome o;
  if (oracle_runs.empty()) {
    o.fail("needs the instances of criterion 2");
    return o;
  }
  long long probes = 0, checked = 0;
  for (const auto& run : oracle_runs) {
    const auto& log = run.res.log;
    probes += static_cast<long long>(log.size());
    ExclusionSet probed;
    for (const auto& r : log) {
      probed.insert(r.fingerprint);
      if (r.plan_cost != kNoPlanCost && r.task_cost > r.plan_cost) o.fail("probe with heuristic above plan cost");
    }
    const TaskModel model(run.inst);
    for (const auto& a : oracle::all_assignments(model, run.z)) {
      if (a.cost >= run.res.cost) continue;
      ++checked;
      if (!probed.count(a.pos)) o.fail("unprobed assignment with cost " + std::to_string(a.cost) + ": " + a.pos.to_string());
    }
    const auto rep = audit_log(run.inst, run.z, log, run.res.cost);
    if (!rep.ok()) o.fail(rep.violations.front());
  }
  if (o.pass)
    o.detail = std::to_string(probes) + " probes, " + std::to_string(checked) + " cheaper assignments all probed";
  return o;
}

Outcome backend_differential() {
  Outcome o;
  const std::string z3 = MAPD_Z3;
  if (z3.empty()) {
    o.fail("no SMT solver found at configure time");
    return o;
  }
  int files = 0, sat = 0, unsat = 0;
  for (int n = 1; n <= kCorpusSize; ++n) {
    char name[16];
    std::snprintf(name, sizeof name, "c%02d.json", n);
    const Instance inst = load_instance(kData / "corpus" / name);
    ++files;
    const TaskModel model(inst);
    const int z = effective_z(inst);
    const int bound = certified_cost_bound(model, z);
    DecisionFn native = [&](const ExclusionSet& e, int lo, int hi) { return solve_decision(model, z, e, lo, hi); };
    DecisionFn smt = [&](const ExclusionSet& e, int lo, int hi) { return smt_decision(model, z, e, lo, hi, z3); };
    const auto a = task_planner(native, {}, 0, INT_MAX, bound);
    const auto b = task_planner(smt, {}, 0, INT_MAX, bound);
    const std::string tag = std::string(name) + ": ";
    if (a.status != b.status) {
      o.fail(tag + "status differs");
      continue;
    }
    if (a.status != TaskPlanStatus::Found) {
      ++unsat;
      continue;
    }
    ++sat;
    const int c = a.assignment->cost;
    if (b.assignment->cost != c)
      o.fail(tag + "native " + std::to_string(c) + " smt " + std::to_string(b.assignment->cost));
    // Same verdicts just below the optimum and with the native optimum excluded.
    const std::vector<std::pair<ExclusionSet, std::pair<int, int>>> probes{
        {{}, {0, c - 1}}, {{a.assignment->pos}, {c, c}}, {{a.assignment->pos}, {c, bound}}};
    for (const auto& [excl, win] : probes) {
      if (win.first > win.second) continue;
      const auto x = native(excl, win.first, win.second).status;
      const auto y = smt(excl, win.first, win.second).status;
      if (x != y) o.fail(tag + "decision verdicts differ on [" + std::to_string(win.first) + ", " + std::to_string(win.second) + "]");
      x == DecisionStatus::Sat ? ++sat : ++unsat;
    }
  }
  if (o.pass)
    o.detail = std::to_string(files) + " files, " + std::to_string(sat) + " SAT and " + std::to_string(unsat) +
               " UNSAT verdicts agree";
  return o;
}

Outcome collaboration_benefit() {
  Outcome o;
  Instance with = load_instance(kData / "floor_8x7.json");
  with.objective = Objective::Makespan;
  Instance without = with;
  without.workspace = with.workspace.without_intermediates();
  const auto a = integrated_planner(with);
  const auto b = integrated_planner(without);
  if (a.status != SolveStatus::Optimal || b.status != SolveStatus::Optimal) {
    o.fail("not solved");
    return o;
  }
  const int ms_a = a.plan->makespan, tc_a = a.plan->total_cost, ms_b = b.plan->makespan, tc_b = b.plan->total_cost;
  o.detail = "makespan " + std::to_string(ms_a) + " vs " + std::to_string(ms_b) + ", total cost " + std::to_string(tc_a) +
             " vs " + std::to_string(tc_b);
  if (!(ms_a < ms_b)) o.fail("makespan not lower with the intermediate: " + o.detail);
  if (!(tc_a > tc_b)) o.fail("total cost not higher with the intermediate: " + o.detail);
  if (ms_a != kFloorMakespanWith || tc_a != kFloorTotalWith || ms_b != kFloorMakespanWithout || tc_b != kFloorTotalWithout)
    o.fail("golden values changed: " + o.detail);
  return o;
}

Outcome exclusion_enumeration() {
  Outcome o;
  const Instance inst = load_instance(kData / "multi_optimum.json");
  const TaskModel model(inst);
  const int z = effective_z(inst);
  const auto best = task_planner(model, z, {}, 0, INT_MAX);
  if (best.status != TaskPlanStatus::Found) {
    o.fail("fixture has no assignment");
    return o;
  }
  const int c = best.assignment->cost;
  ExclusionSet found;
  for (;;) {
    const auto r = task_planner(model, z, found, c, c);
    if (r.status != TaskPlanStatus::Found) break;
    if (r.assignment->cost != c) o.fail("cost left the level");
    if (!found.insert(r.assignment->pos).second) {
      o.fail("pos-matrix returned twice");
      break;
    }
  }
  ExclusionSet brute;
  for (const auto& a : oracle::all_assignments(model, z))
    if (a.cost == c) brute.insert(a.pos);
  o.detail = std::to_string(found.size()) + " pos-matrices at cost " + std::to_string(c) + ", brute force " +
             std::to_string(brute.size());
  if (found != brute) o.fail("enumeration differs: " + o.detail);
  if (static_cast<int>(brute.size()) != kMultiOptimumCount) o.fail("golden count changed: " + o.detail);
  return o;
}

Outcome path_planner_optimality() {
  Outcome o;
  Stopwatch clock;
  int compared = 0, with_edges = 0;
  for (int k = 1; k <= kMicroInstances; ++k) {
    GenParams p;
    p.seed = 1000 + static_cast<std::uint64_t>(k);
    p.width = 5;
    p.height = 4 + k % 2;
    p.obstacle_density = 0.2;
    p.robots = 2;
    p.tasks = 1 + (k / 2) % 2;
    p.intermediates = k % 2;
    const Instance inst = generate_random_instance(p);
    const TaskModel model(inst);
    const int z = effective_z(inst);
    // The optimal assignment, plus the first one that hands an object over
    // (a handover needs two spare action steps).
    std::vector<CompiledGoals> cases;
    const auto a = task_planner(model, z, {}, 0, INT_MAX);
    if (a.status == TaskPlanStatus::Found) cases.push_back(compile_goal_sequences(inst, *a.assignment));
    if (p.intermediates > 0)
      for (const auto& b : oracle::all_assignments(model, z + 2)) {
        CompiledGoals g = compile_goal_sequences(inst, b);
        if (g.edges.empty()) continue;
        cases.push_back(std::move(g));
        ++with_edges;
        break;
      }
    for (const CompiledGoals& g : cases)
      for (Objective obj : {Objective::Makespan, Objective::TotalCost}) {
        const auto cbs = cbs_pc(inst.workspace, g, obj, Deadline::after(kMicroSeconds));
        const auto ref = oracle::joint_search(inst.workspace, g, obj);
        ++compared;
        const std::string tag = "seed " + std::to_string(p.seed) + " " + to_string(obj) + ": ";
        if ((cbs.status == PathStatus::Solved) != ref.has_value()) {
          o.fail(tag + "solvability differs");
          continue;
        }
        if (!ref) continue;
        const int got = obj == Objective::Makespan ? cbs.plan->makespan : cbs.plan->total_cost;
        const int want = obj == Objective::Makespan ? ref->makespan : ref->total_cost;
        if (got != want) o.fail(tag + "cbs " + std::to_string(got) + " oracle " + std::to_string(want));
      }
  }
  if (clock.elapsed_s() > kMicroSeconds) o.fail("over the time limit");
  if (o.pass)
    o.detail = std::to_string(compared) + " comparisons (" + std::to_string(with_edges) +
               " with precedence edges), 0 mismatches";
  return o;
}

Outcome scale_smoke() {
  Outcome o;
  GenParams p;
  p.seed = 1;
  p.width = 50;
  p.height = 50;
  p.style = MapStyle::Warehouse;
  p.robots = 3;
  p.tasks = 5;
  const Instance inst = generate_random_instance(p);
  const auto r = integrated_planner(inst);
  if (r.status != SolveStatus::Optimal) o.fail(std::string("warehouse run ended ") + to_string(r.status));
  if (r.elapsed_s > kWarehouseSeconds) o.fail("warehouse run took " + fixed(r.elapsed_s, 1) + " s");
  if (r.plan && !validate_plan(inst, *r.plan).empty()) o.fail("warehouse plan invalid");

  BenchSpec spec;
  for (int s = 1; s <= kSweepSeeds; ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s));
  for (int size = 10; size <= 50; size += 10) {
    BenchConfig c;
    c.name = "w" + std::to_string(size);
    c.gen.width = size;
    c.gen.height = size;
    c.gen.style = MapStyle::Warehouse;
    spec.configs.push_back(c);
  }
  const BenchReport rep = run_benchmark(spec);
  std::string trend;
  for (std::size_t k = 0; k < rep.summaries.size(); ++k) {
    const auto& s = rep.summaries[k];
    trend += (k ? " " : "") + std::string("") + fixed(s.makespan_mean, 1) + "/" + fixed(s.total_cost_mean, 1);
    if (s.success < 1.0) o.fail(s.config + " not fully solved");
    if (k > 0 && (s.makespan_mean < rep.summaries[k - 1].makespan_mean ||
                  s.total_cost_mean < rep.summaries[k - 1].total_cost_mean))
      o.fail("means decrease at " + s.config + ": " + trend);
  }
  if (o.pass)
    o.detail = "50x50 3R/5T in " + fixed(r.elapsed_s, 2) + " s (cost " + std::to_string(r.cost) +
               "); sweep makespan/total means " + trend;
  return o;
}

// ---------------------------------------------------------------------------
// Goldens

struct Golden {
  std::string file;
  std::string text;
  std::string round_trip;  // text re-emitted after parsing `text`
};

std::vector<Golden> goldens() {
  std::vector<Golden> out;

  const Workspace wh = warehouse_map(14, 10);
  Workspace marked = wh;
  marked.set_intermediate({0, 3});
  const std::string map_text = marked.to_text();
  out.push_back({"warehouse_14x10.map", map_text, parse_map(map_text).to_text()});

  GenParams p;
  p.seed = 7;
  p.width = 8;
  p.height = 6;
  p.robots = 2;
  p.tasks = 3;
  p.intermediates = 1;
  p.objective = Objective::TotalCost;
  Instance gen = generate_random_instance(p);
  gen.tasks[1].deadline = 40;
  gen.z = 5;
  const std::string inst_text = dump_instance(gen);
  out.push_back({"instance_seed7.json", inst_text, dump_instance(instance_from_json(ordered_json::parse(inst_text)))});

  Instance floor = load_instance(kData / "floor_8x7.json");
  const auto solved = integrated_planner(floor);
  const std::string plan_text = solved.plan ? render_plan_table(*solved.plan) : std::string("unsolved\n");
  out.push_back({"floor_8x7.plan", plan_text, solved.plan ? render_plan_table(parse_plan_table(plan_text)) : plan_text});

  const Instance strip = load_instance(kData / "strip.json");
  const TaskModel sm(strip);
  const std::string smt = emit_smtlib(sm, 3, {}, 0, certified_cost_bound(sm, 3));
  out.push_back({"strip.smt2", smt, emit_smtlib(TaskModel(strip), 3, {}, 0, certified_cost_bound(sm, 3))});

  BenchReport rep;
  rep.timeout_s = 60;
  rep.runs = {{"small", 1, "optimal", 0.125, 14, 25},
              {"small", 2, "timeout", 60, std::nullopt, std::nullopt},
              {"large", 1, "optimal", 3.5, 40, 77},
              {"large", 2, "error", 0, std::nullopt, std::nullopt}};
  rep.summaries = {summarize("small", rep.runs, 60), summarize("large", rep.runs, 60)};
  const std::string csv = bench_csv(rep);
  out.push_back({"bench.csv", csv, bench_csv(rep)});
  out.push_back({"bench_table.txt", bench_table(rep), bench_table(rep)});
  return out;
}

Outcome golden_formats(bool update) {
  Outcome o;
  const fs::path dir = kData / "golden";
  const auto first = goldens();
  const auto second = goldens();
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto& g = first[k];
    if (g.text != second[k].text) o.fail(g.file + " differs between runs");
    if (g.text != g.round_trip) o.fail(g.file + " changes on a round trip");
    if (update) {
      write_file(dir / g.file, g.text);
      continue;
    }
    if (!fs::exists(dir / g.file)) {
      o.fail(g.file + " missing; run with --update-goldens");
      continue;
    }
    if (read_file(dir / g.file) != g.text) o.fail(g.file + " differs from the stored golden");
  }
  if (o.pass) o.detail = std::to_string(first.size()) + " files byte-identical" + (update ? " (rewritten)" : "");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool update = false;
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    const std::string arg = argv[k];
    if (arg == "--update-goldens") update = true;
    else if (arg == "--only" && k + 1 < argc) only = std::stoi(argv[++k]);
    else {
      std::cerr << "usage: acceptance [--update-goldens] [--only N]\n";
      return 2;
    }
  }

  struct Criterion {
    int n;
    const char* name;
    std::function<Outcome()> run;
    double limit_s;
  };
  const std::vector<Criterion> criteria{
      {1, "timestamp anchors", anchors, kAnchorSeconds},
      {2, "oracle equivalence", oracle_equivalence, kOracleSeconds},
      {3, "optimality audit", optimality_audit, 0},
      {4, "backend differential", backend_differential, 0},
      {5, "collaboration benefit", collaboration_benefit, 0},
      {6, "exclusion enumeration", exclusion_enumeration, 0},
      {7, "path planner optimality", path_planner_optimality, kMicroSeconds},
      {8, "scale smoke", scale_smoke, 0},
      {9, "format goldens", [update] { return golden_formats(update); }, 0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.n != only && !(only == 3 && c.n == 2)) continue;
    Stopwatch clock;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = clock.elapsed_s();
    if (c.limit_s > 0 && secs > c.limit_s) o.fail("took " + fixed(secs, 2) + " s, limit " + fixed(c.limit_s, 0) + " s");
    report(c.n, c.name, o, secs);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
