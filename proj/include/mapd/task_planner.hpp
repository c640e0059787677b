#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mapd/clock.hpp"
#include "mapd/task_state.hpp"

namespace mapd {

/// Robot positions after every action step 1..Z; the identity of an
/// assignment for exclusion purposes.
struct PosMatrix {
  int robots = 0;
  int steps = 0;
  std::vector<Cell> cells;  // cells[i * steps + (j - 1)]

  PosMatrix() = default;
  PosMatrix(int r, int z) : robots(r), steps(z), cells(static_cast<std::size_t>(r) * z) {}

  Cell& at(int robot, int step) { return cells[static_cast<std::size_t>(robot) * steps + step - 1]; }
  Cell at(int robot, int step) const {
    return cells[static_cast<std::size_t>(robot) * steps + step - 1];
  }

  std::string to_string() const {
    std::string s;
    for (int i = 0; i < robots; ++i) {
      if (i) s += " | ";
      for (int j = 1; j <= steps; ++j) {
        if (j > 1) s += ' ';
        s += std::to_string(at(i, j).x) + "," + std::to_string(at(i, j).y);
      }
    }
    return s;
  }

  friend auto operator<=>(const PosMatrix&, const PosMatrix&) = default;
};

using ExclusionSet = std::set<PosMatrix>;

struct AssignedAction {
  ActionKind kind = ActionKind::Stay;
  int task = kNone;
  Cell cell;
  int time = 0;  // pos_time after the action

  friend bool operator==(const AssignedAction&, const AssignedAction&) = default;
};

struct TaskAssignment {
  std::vector<std::vector<AssignedAction>> robots;  // [robot][step - 1], Stay included
  PosMatrix pos;
  std::vector<int> robot_costs;  // final pos_time per robot
  int cost = 0;                  // under the instance objective

  int steps() const { return pos.steps; }
};

/// Replays a joint action sequence (`steps[j][i]` = action of robot i at step
/// j + 1). nullopt unless every step is legal and the final state is a goal.
inline std::optional<TaskAssignment> make_assignment(const TaskModel& model,
                                                     const std::vector<std::vector<Action>>& steps) {
  const Instance& inst = model.instance();
  const int nr = model.num_robots();
  const int z = static_cast<int>(steps.size());
  StepState st = initial_state(inst);
  TaskAssignment out;
  out.robots.assign(nr, {});
  out.pos = PosMatrix(nr, z);
  for (int j = 1; j <= z; ++j) {
    auto next = joint_step(model, st, steps[j - 1]);
    if (!next) return std::nullopt;
    st = std::move(*next);
    for (int i = 0; i < nr; ++i) {
      const Action& a = steps[j - 1][i];
      out.robots[i].push_back({a.kind, a.task, st.robots[i].pos, st.robots[i].pos_time});
      out.pos.at(i, j) = st.robots[i].pos;
    }
  }
  if (!is_goal(inst, st)) return std::nullopt;
  for (const auto& r : st.robots) out.robot_costs.push_back(r.pos_time);
  out.cost = combine_cost(inst.objective, out.robot_costs);
  return out;
}

/// `R<i>: PICK t<m>@(x,y)#<time> ...`, one line per robot, Stay steps included.
inline std::string dump_assignment(const TaskAssignment& a) {
  std::ostringstream os;
  for (std::size_t i = 0; i < a.robots.size(); ++i) {
    os << 'R' << i << ':';
    for (const auto& act : a.robots[i]) {
      os << ' ' << to_string(act.kind);
      if (act.task != kNone) os << " t" << act.task;
      os << "@(" << act.cell.x << ',' << act.cell.y << ")#" << act.time;
    }
    os << '\n';
  }
  return os.str();
}

/// Cost that no legal assignment exceeds: each step moves the latest robot
/// clock forward by at most the longest distance plus a handover.
inline int certified_cost_bound(const TaskModel& model, int z) {
  const long long per_step = model.max_finite_dist() + 2;
  long long bound = per_step * z;
  if (model.instance().objective == Objective::TotalCost) bound *= std::max(1, model.num_robots());
  return static_cast<int>(std::min<long long>(bound, std::numeric_limits<int>::max() / 4));
}

inline constexpr int kInfeasibleBound = std::numeric_limits<int>::max() / 4;

/// Lower bound on the final cost of any completion of `st` (kInfeasibleBound
/// when some object can no longer be delivered).
inline int completion_lower_bound(const TaskModel& model, const StepState& st) {
  const Instance& inst = model.instance();
  const int nr = model.num_robots();
  const int nt = model.num_tasks();
  const int inf = kInfeasibleBound;

  std::vector<int> own(nr);
  long long own_sum = 0;
  int makespan = 0;
  for (int i = 0; i < nr; ++i) {
    const int d = model.dist(st.robots[i].pos, inst.robots[i].start);
    if (d < 0) return inf;
    own[i] = st.robots[i].pos_time + d;
    own_sum += own[i];
    makespan = std::max(makespan, own[i]);
  }

  int dwells = 0;
  long long total_extra = 0;
  for (int m = 0; m < nt; ++m) {
    const Task& t = inst.tasks[m];
    const TaskState& ts = st.tasks[m];
    int delivered_at = -1;  // earliest completion of the final drop
    if (ts.carrier != kNone) {
      const RobotState& r = st.robots[ts.carrier];
      const int d = model.dist(r.pos, t.drop);
      if (d < 0) return inf;
      delivered_at = r.pos_time + d + 1;
      dwells += 1;
    } else if (ts.loc && *ts.loc == t.drop && !(t.pickup == t.drop && ts.loc_time == 0)) {
      if (t.deadline && ts.loc_time > *t.deadline) return inf;
      continue;
    } else if (ts.loc) {
      const Cell at = *ts.loc;
      const bool at_pickup = (at == t.pickup);
      int reach = inf;
      for (int i = 0; i < nr; ++i) {
        if (inst.robots[i].capacity < t.weight) continue;
        const int d = model.dist(st.robots[i].pos, at);
        if (d >= 0) reach = std::min(reach, st.robots[i].pos_time + d + 1);
      }
      if (reach == inf) return inf;
      const int picked = at_pickup ? reach : std::max(reach, ts.loc_time + 1);
      const int carry = model.dist(at, t.drop);
      if (carry < 0) return inf;
      delivered_at = picked + carry + 1;
      dwells += 2;
    }
    if (t.deadline && delivered_at > *t.deadline) return inf;

    int finish_best = inf;
    int extra_best = inf;
    for (int k = 0; k < nr; ++k) {
      const int d = model.dist(t.drop, inst.robots[k].start);
      if (d < 0) continue;
      finish_best = std::min(finish_best, delivered_at + d);
      extra_best = std::min(extra_best, std::max(0, delivered_at + d - own[k]));
    }
    if (finish_best == inf) return inf;
    makespan = std::max(makespan, finish_best);
    total_extra = std::max<long long>(total_extra, extra_best);
  }

  if (inst.objective == Objective::Makespan) return makespan;
  return static_cast<int>(own_sum + std::max<long long>(dwells, total_extra));
}

/// Necessary condition on the remaining action steps after `st`.
inline bool enough_steps_left(const Instance& inst, const StepState& st, int z) {
  const int left = z - st.step;
  int free_tasks = 0;
  for (std::size_t m = 0; m < inst.tasks.size(); ++m) {
    const TaskState& ts = st.tasks[m];
    const Task& t = inst.tasks[m];
    if (ts.carrier != kNone) continue;
    const bool delivered = ts.loc && *ts.loc == t.drop && !(t.pickup == t.drop && ts.loc_time == 0);
    if (!delivered) ++free_tasks;
  }
  int slots = 0;
  for (std::size_t i = 0; i < inst.robots.size(); ++i) {
    int carried = 0;
    for (const auto& ts : st.tasks) carried += (ts.carrier == static_cast<int>(i));
    const bool home = st.robots[i].pos == inst.robots[i].start;
    const int need = carried + ((carried > 0 || !home) ? 1 : 0);
    if (need > left) return false;
    const int spare = need > 0 ? left - need : left - 1;
    slots += std::max(0, spare) / 2;
  }
  return slots >= free_tasks;
}

enum class DecisionStatus { Sat, Unsat, Timeout };

struct DecisionResult {
  DecisionStatus status = DecisionStatus::Unsat;
  std::optional<TaskAssignment> assignment;
  long long nodes = 0;
};

/// Explicit-state depth-first branch and bound over joint action sequences:
/// finds the first assignment in canonical order whose cost lies in
/// [cost_lo, cost_hi] and whose position matrix is not excluded.
class NativeDecision {
 public:
  NativeDecision(const TaskModel& model, int z, const ExclusionSet& excl, int cost_lo, int cost_hi,
                 Deadline deadline)
      : model_(model),
        inst_(model.instance()),
        z_(z),
        lo_(cost_lo),
        hi_(cost_hi),
        deadline_(deadline),
        nr_(model.num_robots()) {
    for (const auto& p : excl)
      if (p.robots == nr_ && p.steps == z_) excl_.push_back(&p);
  }

  DecisionResult run() {
    DecisionResult res;
    if (lo_ > hi_) return res;
    StepState st = initial_state(inst_);
    path_.assign(z_, std::vector<Action>(nr_));
    std::vector<const PosMatrix*> active = excl_;
    const bool found = z_ == 0 ? leaf(st, active) : step(st, active);
    res.nodes = nodes_;
    if (timed_out_) {
      res.status = DecisionStatus::Timeout;
    } else if (found) {
      res.status = DecisionStatus::Sat;
      res.assignment = make_assignment(model_, path_);
    }
    return res;
  }

 private:
  bool leaf(const StepState& st, const std::vector<const PosMatrix*>& active) {
    if (!active.empty()) return false;
    if (!is_goal(inst_, st)) return false;
    const int c = assignment_cost(st, inst_.objective);
    return c >= lo_ && c <= hi_;
  }

  // Expands action step st.step + 1.
  bool step(const StepState& prev, const std::vector<const PosMatrix*>& active) {
    if (active.empty()) {
      if (failed_.contains(key(prev))) return false;
    }
    StepState next = prev;
    next.step = prev.step + 1;
    const bool ok = robot(prev, next, 0, active);
    if (!ok && !timed_out_ && active.empty()) failed_.insert(key(prev));
    return ok;
  }

  bool robot(const StepState& prev, StepState& next, int i,
             const std::vector<const PosMatrix*>& active) {
    if (i == nr_) {
      if (next.step == z_) return leaf(next, active);
      if (!enough_steps_left(inst_, next, z_)) return false;
      return step(next, active);
    }
    if ((nodes_++ & 1023) == 0 && deadline_.expired()) timed_out_ = true;
    if (timed_out_) return false;

    const int j = next.step;
    for (const Action& a : robot_actions(model_, prev, i)) {
      if (!compatible_with_earlier(next, i, a)) continue;
      const RobotState saved_robot = next.robots[i];
      const TaskState saved_task = a.task != kNone ? next.tasks[a.task] : TaskState{};
      apply_effect(model_, prev, next, i, a);

      bool ok = false;
      if (completion_lower_bound(model_, next) <= hi_) {
        std::vector<const PosMatrix*> still;
        for (const PosMatrix* p : active)
          if (p->at(i, j) == next.robots[i].pos) still.push_back(p);
        path_[j - 1][i] = a;
        ok = robot(prev, next, i + 1, still);
      }
      if (ok) return true;
      next.robots[i] = saved_robot;
      if (a.task != kNone) next.tasks[a.task] = saved_task;
      if (timed_out_) return false;
    }
    return false;
  }

  // Robots earlier in the step already touched tasks or filled intermediates.
  bool compatible_with_earlier(const StepState& next, int i, const Action& a) const {
    const int j = next.step;
    for (int k = 0; k < i; ++k) {
      const Action& b = path_[j - 1][k];
      if (a.task != kNone && b.task == a.task) return false;
      if (a.kind == ActionKind::DropIntermediate && b.kind == ActionKind::DropIntermediate &&
          a.cell == b.cell)
        return false;
    }
    return true;
  }

  std::vector<int> key(const StepState& st) const {
    std::vector<int> k;
    k.reserve(2 + st.robots.size() * 4 + st.tasks.size() * 4);
    k.push_back(st.step);
    for (const auto& r : st.robots) {
      k.push_back(r.pos.x);
      k.push_back(r.pos.y);
      k.push_back(r.pos_time);
      k.push_back(r.capacity);
    }
    for (const auto& t : st.tasks) {
      k.push_back(t.loc ? t.loc->x : -1);
      k.push_back(t.loc ? t.loc->y : -1);
      k.push_back(t.loc_time);
      k.push_back(t.carrier);
    }
    return k;
  }

  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::uint64_t h = 1469598103934665603ull;
      for (int x : v) {
        h ^= static_cast<std::uint32_t>(x);
        h *= 1099511628211ull;
      }
      return static_cast<std::size_t>(h);
    }
  };

  const TaskModel& model_;
  const Instance& inst_;
  int z_;
  int lo_;
  int hi_;
  Deadline deadline_;
  int nr_;
  std::vector<const PosMatrix*> excl_;
  std::vector<std::vector<Action>> path_;
  std::unordered_set<std::vector<int>, KeyHash> failed_;
  long long nodes_ = 0;
  bool timed_out_ = false;
};

inline DecisionResult solve_decision(const TaskModel& model, int z, const ExclusionSet& excl,
                                     int cost_lo, int cost_hi,
                                     Deadline deadline = Deadline::never()) {
  return NativeDecision(model, z, excl, cost_lo, cost_hi, deadline).run();
}

/// A decision procedure: (exclusions, lo, hi) -> DecisionResult.
using DecisionFn = std::function<DecisionResult(const ExclusionSet&, int, int)>;

enum class TaskPlanStatus { Found, None, Timeout };

struct TaskPlanResult {
  TaskPlanStatus status = TaskPlanStatus::None;
  std::optional<TaskAssignment> assignment;
  int decision_calls = 0;
  long long nodes = 0;
};

/// Minimum-cost assignment with cost in [lb, ub] that is not excluded, by
/// binary search over decision calls. A first unbounded call establishes
/// satisfiability; its witness also serves as the initial incumbent.
inline TaskPlanResult task_planner(const DecisionFn& decide, const ExclusionSet& excl, int lb,
                                   int ub, int unbounded_hi) {
  TaskPlanResult res;
  auto call = [&](int lo, int hi) {
    ++res.decision_calls;
    DecisionResult d = decide(excl, lo, hi);
    res.nodes += d.nodes;
    return d;
  };

  DecisionResult first = call(0, unbounded_hi);
  if (first.status == DecisionStatus::Timeout) {
    res.status = TaskPlanStatus::Timeout;
    return res;
  }
  if (first.status == DecisionStatus::Unsat) return res;

  lb = std::max(lb, 0);
  ub = std::min(ub, unbounded_hi);
  std::optional<TaskAssignment> best;
  if (first.assignment->cost >= lb && first.assignment->cost <= ub) {
    best = std::move(first.assignment);
    ub = best->cost - 1;
  }
  while (lb <= ub) {
    const int mid = lb + (ub - lb) / 2;
    DecisionResult d = call(lb, mid);
    if (d.status == DecisionStatus::Timeout) {
      res.status = TaskPlanStatus::Timeout;
      res.assignment = std::move(best);
      return res;
    }
    if (d.status == DecisionStatus::Sat) {
      ub = d.assignment->cost - 1;
      best = std::move(d.assignment);
    } else {
      lb = mid + 1;
    }
  }
  if (best) {
    res.status = TaskPlanStatus::Found;
    res.assignment = std::move(best);
  }
  return res;
}

/// Native-backend convenience overload.
inline TaskPlanResult task_planner(const TaskModel& model, int z, const ExclusionSet& excl, int lb,
                                   int ub, Deadline deadline = Deadline::never()) {
  DecisionFn decide = [&](const ExclusionSet& a, int lo, int hi) {
    return solve_decision(model, z, a, lo, hi, deadline);
  };
  return task_planner(decide, excl, lb, ub, certified_cost_bound(model, z));
}

}  // namespace mapd
