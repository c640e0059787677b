#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mapd/grid.hpp"
#include "mapd/instance.hpp"

namespace mapd {

inline constexpr int kNone = -1;       // no task / no robot
inline constexpr int kInTransit = -1;  // object carried, so it has no cell or availability time

enum class ActionKind { Pick, Drop, DropIntermediate, PickIntermediate, Return, Stay };

inline const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Pick: return "PICK";
    case ActionKind::Drop: return "DROP";
    case ActionKind::DropIntermediate: return "IDROP";
    case ActionKind::PickIntermediate: return "IPICK";
    case ActionKind::Return: return "RETURN";
    case ActionKind::Stay: return "STAY";
  }
  return "?";
}

/// One robot's choice for one action step. `cell` is the target cell (for
/// Return it is the base, for Stay the current cell).
struct Action {
  ActionKind kind = ActionKind::Stay;
  int task = kNone;
  Cell cell;

  friend bool operator==(const Action&, const Action&) = default;
};

struct RobotState {
  Cell pos;
  int pos_time = 0;
  int action = kNone;
  int capacity = 0;

  friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct TaskState {
  std::optional<Cell> loc;  // nullopt while carried
  int loc_time = 0;         // kInTransit while carried
  int carrier = kNone;

  friend bool operator==(const TaskState&, const TaskState&) = default;
};

/// System state after `step` action steps.
struct StepState {
  int step = 0;
  std::vector<RobotState> robots;
  std::vector<TaskState> tasks;

  friend bool operator==(const StepState&, const StepState&) = default;
};

/// Instance plus the precomputed distance table the transition rules need.
class TaskModel {
 public:
  explicit TaskModel(const Instance& inst)
      : inst_(&inst),
        intermediates_(inst.workspace.intermediates()),
        oracle_(inst.workspace, points_of_interest(inst)) {}

  const Instance& instance() const { return *inst_; }
  const DistanceOracle& oracle() const { return oracle_; }
  std::span<const Cell> intermediates() const { return intermediates_; }
  int num_robots() const { return static_cast<int>(inst_->robots.size()); }
  int num_tasks() const { return static_cast<int>(inst_->tasks.size()); }

  /// Shortest distance between points of interest; negative when unreachable.
  int dist(Cell a, Cell b) const { return oracle_.raw(a, b); }

  /// Largest finite distance between any two points of interest.
  int max_finite_dist() const {
    int best = 0;
    for (Cell a : oracle_.points())
      for (Cell b : oracle_.points()) best = std::max(best, oracle_.raw(a, b));
    return best;
  }

 private:
  const Instance* inst_;
  std::vector<Cell> intermediates_;
  DistanceOracle oracle_;
};

inline StepState initial_state(const Instance& inst) {
  StepState st;
  for (const auto& r : inst.robots) st.robots.push_back({r.start, 0, kNone, r.capacity});
  for (const auto& t : inst.tasks) st.tasks.push_back({t.pickup, 0, kNone});
  return st;
}

inline bool carries_anything(const StepState& st, int robot) {
  return std::any_of(st.tasks.begin(), st.tasks.end(),
                     [&](const TaskState& t) { return t.carrier == robot; });
}

inline bool intermediate_occupied(const StepState& st, Cell n) {
  return std::any_of(st.tasks.begin(), st.tasks.end(),
                     [&](const TaskState& t) { return t.loc && *t.loc == n; });
}

/// Completion time of a pick from an intermediate cell. The object is
/// available from `loc_time`; another robot needs a tick to clear the cell
/// and a tick to pick. A robot picking back the object it has just put down
/// without moving needs only the pick tick.
inline int intermediate_pick_time(int pos_time, int dist, int loc_time) {
  const int arrival_pick = pos_time + dist + 1;
  const int handover = loc_time + ((dist == 0 && loc_time == pos_time) ? 1 : 2);
  return std::max(arrival_pick, handover);
}

/// Whether robot `i` may perform `a` given the state `prev` at the start of
/// the action step. Cross-robot exclusivity inside one step is checked by
/// joint_step.
inline bool applicable(const TaskModel& model, const StepState& prev, int i, const Action& a) {
  const Instance& inst = model.instance();
  const RobotState& r = prev.robots[i];
  switch (a.kind) {
    case ActionKind::Stay:
      return true;
    case ActionKind::Return:
      return !carries_anything(prev, i) && model.dist(r.pos, inst.robots[i].start) >= 0;
    case ActionKind::Pick: {
      const Task& t = inst.tasks[a.task];
      const TaskState& ts = prev.tasks[a.task];
      if (!ts.loc || *ts.loc != t.pickup || ts.carrier != kNone) return false;
      if (t.pickup == t.drop && ts.loc_time != 0) return false;  // degenerate: already delivered
      return r.capacity >= t.weight && model.dist(r.pos, t.pickup) >= 0;
    }
    case ActionKind::Drop: {
      const Task& t = inst.tasks[a.task];
      return prev.tasks[a.task].carrier == i && model.dist(r.pos, t.drop) >= 0;
    }
    case ActionKind::DropIntermediate:
      return prev.tasks[a.task].carrier == i && inst.workspace.is_intermediate(a.cell) &&
             !intermediate_occupied(prev, a.cell) && model.dist(r.pos, a.cell) >= 0;
    case ActionKind::PickIntermediate: {
      const Task& t = inst.tasks[a.task];
      const TaskState& ts = prev.tasks[a.task];
      return ts.loc && *ts.loc == a.cell && inst.workspace.is_intermediate(a.cell) &&
             ts.carrier == kNone && r.capacity >= t.weight && model.dist(r.pos, a.cell) >= 0;
    }
  }
  return false;
}

/// Writes the effect of robot `i` performing `a` into `next`; preconditions are
/// evaluated against `prev`. Caller guarantees applicability.
inline void apply_effect(const TaskModel& model, const StepState& prev, StepState& next, int i,
                         const Action& a) {
  const Instance& inst = model.instance();
  const RobotState& r = prev.robots[i];
  RobotState& out = next.robots[i];
  switch (a.kind) {
    case ActionKind::Stay:
      out = r;
      out.action = kNone;
      return;
    case ActionKind::Return: {
      const Cell base = inst.robots[i].start;
      out = {base, r.pos_time + model.dist(r.pos, base), kNone, r.capacity};
      return;
    }
    case ActionKind::Pick: {
      const Task& t = inst.tasks[a.task];
      out = {t.pickup, r.pos_time + model.dist(r.pos, t.pickup) + 1, a.task,
             r.capacity - t.weight};
      next.tasks[a.task] = {std::nullopt, kInTransit, i};
      return;
    }
    case ActionKind::Drop: {
      const Task& t = inst.tasks[a.task];
      const int time = r.pos_time + model.dist(r.pos, t.drop) + 1;
      out = {t.drop, time, a.task, r.capacity + t.weight};
      next.tasks[a.task] = {t.drop, time, kNone};
      return;
    }
    case ActionKind::DropIntermediate: {
      const Task& t = inst.tasks[a.task];
      const int time = r.pos_time + model.dist(r.pos, a.cell) + 1;
      out = {a.cell, time, a.task, r.capacity + t.weight};
      next.tasks[a.task] = {a.cell, time, kNone};
      return;
    }
    case ActionKind::PickIntermediate: {
      const Task& t = inst.tasks[a.task];
      const int d = model.dist(r.pos, a.cell);
      out = {a.cell, intermediate_pick_time(r.pos_time, d, prev.tasks[a.task].loc_time), a.task,
             r.capacity - t.weight};
      next.tasks[a.task] = {std::nullopt, kInTransit, i};
      return;
    }
  }
}

/// Applicable actions of robot `i` in canonical order: Pick < Drop <
/// DropIntermediate < PickIntermediate < Return < Stay, then task id, then
/// intermediate cell in row-major order.
inline std::vector<Action> robot_actions(const TaskModel& model, const StepState& prev, int i) {
  const Instance& inst = model.instance();
  std::vector<Action> out;
  const int nt = model.num_tasks();
  for (int m = 0; m < nt; ++m) {
    Action a{ActionKind::Pick, m, inst.tasks[m].pickup};
    if (applicable(model, prev, i, a)) out.push_back(a);
  }
  for (int m = 0; m < nt; ++m) {
    Action a{ActionKind::Drop, m, inst.tasks[m].drop};
    if (applicable(model, prev, i, a)) out.push_back(a);
  }
  for (int m = 0; m < nt; ++m)
    for (Cell n : model.intermediates()) {
      Action a{ActionKind::DropIntermediate, m, n};
      if (applicable(model, prev, i, a)) out.push_back(a);
    }
  for (int m = 0; m < nt; ++m) {
    const auto& loc = prev.tasks[m].loc;
    if (!loc) continue;
    Action a{ActionKind::PickIntermediate, m, *loc};
    if (applicable(model, prev, i, a)) out.push_back(a);
  }
  Action ret{ActionKind::Return, kNone, inst.robots[i].start};
  if (applicable(model, prev, i, ret)) out.push_back(ret);
  out.push_back({ActionKind::Stay, kNone, prev.robots[i].pos});
  return out;
}

/// Every (robot, action) pair applicable at `st`, robots in id order.
inline std::vector<std::pair<int, Action>> enumerate_actions(const TaskModel& model,
                                                             const StepState& st) {
  std::vector<std::pair<int, Action>> out;
  for (int i = 0; i < model.num_robots(); ++i)
    for (const Action& a : robot_actions(model, st, i)) out.emplace_back(i, a);
  return out;
}

/// Cross-robot rules for one action step: an object is acted on by at most
/// one robot, and an intermediate cell receives at most one object, and only
/// if it was empty at the start of the step.
inline bool joint_compatible(std::span<const Action> actions) {
  for (std::size_t a = 0; a < actions.size(); ++a) {
    const Action& x = actions[a];
    if (x.task == kNone) continue;
    for (std::size_t b = a + 1; b < actions.size(); ++b) {
      const Action& y = actions[b];
      if (y.task == x.task) return false;
      if (x.kind == ActionKind::DropIntermediate && y.kind == ActionKind::DropIntermediate &&
          x.cell == y.cell)
        return false;
    }
  }
  return true;
}

/// One full action step: robot i performs actions[i]. nullopt when any action
/// is inapplicable or the step violates the cross-robot rules.
inline std::optional<StepState> joint_step(const TaskModel& model, const StepState& prev,
                                           std::span<const Action> actions) {
  if (static_cast<int>(actions.size()) != model.num_robots()) return std::nullopt;
  if (!joint_compatible(actions)) return std::nullopt;
  StepState next = prev;
  for (int i = 0; i < model.num_robots(); ++i) {
    if (!applicable(model, prev, i, actions[i])) return std::nullopt;
    apply_effect(model, prev, next, i, actions[i]);
  }
  next.step = prev.step + 1;
  return next;
}

/// Robot `i` performs `a` while every other robot stays.
inline std::optional<StepState> apply_single(const TaskModel& model, const StepState& st, int i,
                                             const Action& a) {
  std::vector<Action> acts;
  for (int k = 0; k < model.num_robots(); ++k)
    acts.push_back(k == i ? a : Action{ActionKind::Stay, kNone, st.robots[k].pos});
  return joint_step(model, st, acts);
}

inline std::optional<StepState> apply_pick(const TaskModel& model, const StepState& st, int i,
                                           int m) {
  return apply_single(model, st, i, {ActionKind::Pick, m, model.instance().tasks[m].pickup});
}

inline std::optional<StepState> apply_drop(const TaskModel& model, const StepState& st, int i,
                                           int m) {
  return apply_single(model, st, i, {ActionKind::Drop, m, model.instance().tasks[m].drop});
}

inline std::optional<StepState> apply_stay(const TaskModel& model, const StepState& st, int i) {
  return apply_single(model, st, i, {ActionKind::Stay, kNone, st.robots[i].pos});
}

inline std::optional<StepState> apply_return(const TaskModel& model, const StepState& st, int i) {
  return apply_single(model, st, i,
                      {ActionKind::Return, kNone, model.instance().robots[i].start});
}

inline std::optional<StepState> apply_drop_intermediate(const TaskModel& model,
                                                        const StepState& st, int i, int m,
                                                        Cell n) {
  return apply_single(model, st, i, {ActionKind::DropIntermediate, m, n});
}

inline std::optional<StepState> apply_pick_intermediate(const TaskModel& model,
                                                        const StepState& st, int i, int m,
                                                        Cell n) {
  return apply_single(model, st, i, {ActionKind::PickIntermediate, m, n});
}

/// Terminal condition: every object delivered, every robot home, deadlines met.
inline bool is_goal(const Instance& inst, const StepState& st) {
  for (std::size_t m = 0; m < inst.tasks.size(); ++m) {
    const Task& t = inst.tasks[m];
    const TaskState& ts = st.tasks[m];
    if (!ts.loc || *ts.loc != t.drop || ts.carrier != kNone) return false;
    if (t.pickup == t.drop && ts.loc_time == 0) return false;  // degenerate, never handled
    if (t.deadline && ts.loc_time > *t.deadline) return false;
  }
  for (std::size_t i = 0; i < inst.robots.size(); ++i)
    if (st.robots[i].pos != inst.robots[i].start) return false;
  return true;
}

inline int combine_cost(Objective obj, std::span<const int> robot_times) {
  if (robot_times.empty()) return 0;
  return obj == Objective::Makespan ? *std::max_element(robot_times.begin(), robot_times.end())
                                    : std::accumulate(robot_times.begin(), robot_times.end(), 0);
}

inline int assignment_cost(const StepState& st, Objective obj) {
  std::vector<int> times;
  for (const auto& r : st.robots) times.push_back(r.pos_time);
  return combine_cost(obj, times);
}

}  // namespace mapd
