#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mapd/cbs.hpp"
#include "mapd/smtlib.hpp"

namespace mapd {

inline constexpr int kNoPlanCost = std::numeric_limits<int>::max();

struct IterationRecord {
  PosMatrix fingerprint;
  std::string assignment;  // dump_assignment text
  int task_cost = 0;
  int plan_cost = kNoPlanCost;
  PathStatus path_status = PathStatus::Infeasible;
};

enum class SolveStatus { Optimal, Infeasible, TimeoutWithPlan, TimeoutNoPlan };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeoutWithPlan: return "timeout_with_plan";
    case SolveStatus::TimeoutNoPlan: return "timeout";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Plan> plan;
  std::optional<TaskAssignment> assignment;
  int cost = kNoPlanCost;
  int z = 0;
  std::vector<IterationRecord> log;
  int task_planner_calls = 0;
  int decision_calls = 0;
  int path_planner_calls = 0;
  double elapsed_s = 0;
};

/// Decision backend: "native" or "smtlib:<solver command>".
struct Backend {
  std::string spec = "native";

  bool native() const { return spec == "native"; }
  std::string solver_command() const { return spec.substr(spec.find(':') + 1); }

  static Backend parse(const std::string& s) {
    if (s == "native") return {s};
    if (s.rfind("smtlib:", 0) == 0 && s.size() > 7) return {s};
    throw std::invalid_argument("unknown backend '" + s + "' (expected native or smtlib:<command>)");
  }
};

inline DecisionFn make_decision_fn(const TaskModel& model, int z, const Backend& backend, Deadline deadline) {
  if (backend.native())
    return [&model, z, deadline](const ExclusionSet& excl, int lo, int hi) {
      return solve_decision(model, z, excl, lo, hi, deadline);
    };
  const std::string cmd = backend.solver_command();
  return [&model, z, deadline, cmd](const ExclusionSet& excl, int lo, int hi) {
    return smt_decision(model, z, excl, lo, hi, cmd, deadline);
  };
}

struct IntegratedConfig {
  int z = 0;  // 0: the instance's z, else min_feasible_z
  std::optional<double> timeout_s;  // overrides the instance timeout
  Backend backend;
};

/// Default path planner: CBS with precedence constraints.
struct CbsPathPlanner {
  const Workspace* ws;
  Objective objective;
  PathResult operator()(const TaskAssignment&, const CompiledGoals& goals, Deadline deadline) const {
    return cbs_pc(*ws, goals, objective, deadline);
  }
};

namespace detail {
inline std::string goals_key(const CompiledGoals& g) {
  std::string k;
  for (const auto& s : g.sequences) {
    k += 'R';
    for (const auto& cp : s.checkpoints)
      k += std::to_string(static_cast<int>(cp.kind)) + ':' + std::to_string(cp.task) + '@' + std::to_string(cp.cell.x) +
           ',' + std::to_string(cp.cell.y) + ';';
  }
  k += 'E';
  for (const auto& e : g.edges)
    k += std::to_string(e.robot_a) + '.' + std::to_string(e.cp_a) + '<' + std::to_string(e.robot_b) + '.' +
         std::to_string(e.cp_b) + ';';
  return k;
}
}  // namespace detail

/// Alternates task-level proposals and collision-free realizations until the
/// cheapest unexamined assignment can no longer beat the best plan.
/// `path_planner(assignment, goals, deadline) -> PathResult`.
template <typename PathPlanner>
SolveResult integrated_planner(const Instance& inst, const IntegratedConfig& config, PathPlanner&& path_planner) {
  Stopwatch clock;
  SolveResult out;
  const double timeout = config.timeout_s.value_or(inst.timeout_s);
  const Deadline deadline = Deadline::after(timeout);
  const int z = config.z > 0 ? config.z : effective_z(inst);
  out.z = z;

  const TaskModel model(inst);
  const DecisionFn decide = make_decision_fn(model, z, config.backend, deadline);
  const int unbounded = certified_cost_bound(model, z);

  int cur_task_cost = 0;
  int opt_plan_cost = kNoPlanCost;
  ExclusionSet excl;
  std::map<std::string, PathResult> memo;
  bool timed_out = false;

  while (cur_task_cost != opt_plan_cost) {
    if (deadline.expired()) {
      timed_out = true;
      break;
    }
    const int ub = opt_plan_cost == kNoPlanCost ? unbounded : opt_plan_cost;
    TaskPlanResult tp = task_planner(decide, excl, cur_task_cost, ub, unbounded);
    ++out.task_planner_calls;
    out.decision_calls += tp.decision_calls;
    if (tp.status == TaskPlanStatus::Timeout) {
      timed_out = true;
      break;
    }
    if (tp.status == TaskPlanStatus::None) break;
    TaskAssignment& L = *tp.assignment;
    if (L.cost > cur_task_cost) {
      cur_task_cost = L.cost;
      excl.clear();
    }
    excl.insert(L.pos);

    const CompiledGoals goals = compile_goal_sequences(inst, L);
    const std::string key = detail::goals_key(goals);
    auto it = memo.find(key);
    if (it == memo.end()) {
      ++out.path_planner_calls;
      PathResult pr = path_planner(std::as_const(L), goals, deadline);
      if (pr.status == PathStatus::Timeout) {
        out.log.push_back({L.pos, dump_assignment(L), L.cost, kNoPlanCost, PathStatus::Timeout});
        timed_out = true;
        break;
      }
      it = memo.emplace(key, std::move(pr)).first;
    }
    const PathResult& pr = it->second;
    IterationRecord rec{L.pos, dump_assignment(L), L.cost, kNoPlanCost, pr.status};
    if (pr.status == PathStatus::Solved) {
      rec.plan_cost = pr.plan->cost(inst.objective);
      if (rec.plan_cost < opt_plan_cost) {
        opt_plan_cost = rec.plan_cost;
        out.plan = pr.plan;
        out.assignment = L;
      }
    }
    out.log.push_back(std::move(rec));
  }

  out.cost = opt_plan_cost;
  if (timed_out) out.status = out.plan ? SolveStatus::TimeoutWithPlan : SolveStatus::TimeoutNoPlan;
  else out.status = out.plan ? SolveStatus::Optimal : SolveStatus::Infeasible;
  out.elapsed_s = clock.elapsed_s();
  return out;
}

inline SolveResult integrated_planner(const Instance& inst, const IntegratedConfig& config = {}) {
  return integrated_planner(inst, config, CbsPathPlanner{&inst.workspace, inst.objective});
}

struct AuditReport {
  std::vector<std::string> violations;
  int probes = 0;
  bool ok() const { return violations.empty(); }
};

/// Re-checks the optimality argument from an iteration log: every probe's
/// plan costs at least its heuristic cost, no fingerprint repeats, the best
/// logged plan cost equals `final_cost`, and no assignment outside the log
/// has a heuristic cost below `final_cost`.
inline AuditReport audit_log(const Instance& inst, int z, const std::vector<IterationRecord>& log, int final_cost,
                             Deadline deadline = Deadline::never()) {
  AuditReport rep;
  rep.probes = static_cast<int>(log.size());
  ExclusionSet seen;
  int best = kNoPlanCost;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const auto& r = log[k];
    if (r.plan_cost != kNoPlanCost && r.plan_cost < r.task_cost)
      rep.violations.push_back("probe " + std::to_string(k) + ": plan cost " + std::to_string(r.plan_cost) +
                               " below heuristic cost " + std::to_string(r.task_cost));
    if (!seen.insert(r.fingerprint).second) rep.violations.push_back("probe " + std::to_string(k) + ": assignment probed twice");
    best = std::min(best, r.plan_cost);
  }
  if (best != final_cost)
    rep.violations.push_back("best logged plan cost " + (best == kNoPlanCost ? std::string("none") : std::to_string(best)) +
                             " differs from the reported cost");
  if (final_cost != kNoPlanCost && final_cost > 0) {
    const TaskModel model(inst);
    DecisionResult d = solve_decision(model, z, seen, 0, final_cost - 1, deadline);
    if (d.status == DecisionStatus::Sat)
      rep.violations.push_back("unprobed assignment with heuristic cost " + std::to_string(d.assignment->cost) +
                               " below the plan cost " + std::to_string(final_cost) + ":\n" +
                               dump_assignment(*d.assignment));
    else if (d.status == DecisionStatus::Timeout)
      rep.violations.emplace_back("audit timed out");
  }
  return rep;
}

}  // namespace mapd
