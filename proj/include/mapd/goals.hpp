#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapd/task_planner.hpp"

namespace mapd {

enum class CheckpointKind { Pick, Drop, DropIntermediate, PickIntermediate, ReturnHome };

struct Checkpoint {
  Cell cell;
  CheckpointKind kind = CheckpointKind::ReturnHome;
  int task = kNone;
  int dwell = 0;  // ticks spent working on the cell
  std::optional<int> deadline;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

inline int dwell_of(CheckpointKind k) { return k == CheckpointKind::ReturnHome ? 0 : 1; }

struct GoalSequence {
  int robot = 0;
  Cell base;
  std::vector<Checkpoint> checkpoints;

  friend bool operator==(const GoalSequence&, const GoalSequence&) = default;
};

/// Checkpoint (robot_a, cp_a) must complete strictly before (robot_b, cp_b).
struct PrecedenceEdge {
  int robot_a = 0;
  int cp_a = 0;
  int robot_b = 0;
  int cp_b = 0;

  friend auto operator<=>(const PrecedenceEdge&, const PrecedenceEdge&) = default;
};

struct CompiledGoals {
  std::vector<GoalSequence> sequences;
  std::vector<PrecedenceEdge> edges;

  friend bool operator==(const CompiledGoals&, const CompiledGoals&) = default;
};

class GoalCompileError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Turns an assignment into per-robot checkpoint sequences. Stay steps and
/// returns from the base are dropped. Transfers produce two kinds of edges:
/// an intermediate drop precedes the matching intermediate pick, and the
/// pick that clears an intermediate cell precedes the next drop onto it.
inline CompiledGoals compile_goal_sequences(const Instance& inst, const TaskAssignment& assignment) {
  struct Event {
    int step;
    int robot;
    int cp;
    CheckpointKind kind;
    Cell cell;
  };
  CompiledGoals out;
  std::map<int, std::vector<Event>> by_task;
  for (std::size_t i = 0; i < assignment.robots.size(); ++i) {
    GoalSequence seq{static_cast<int>(i), inst.robots.at(i).start, {}};
    Cell at = seq.base;
    for (std::size_t s = 0; s < assignment.robots[i].size(); ++s) {
      const AssignedAction& a = assignment.robots[i][s];
      Checkpoint cp{a.cell, CheckpointKind::ReturnHome, a.task, 0, std::nullopt};
      switch (a.kind) {
        case ActionKind::Stay: continue;
        case ActionKind::Return:
          if (at == seq.base) continue;
          cp.task = kNone;
          break;
        case ActionKind::Pick: cp.kind = CheckpointKind::Pick; break;
        case ActionKind::Drop:
          cp.kind = CheckpointKind::Drop;
          cp.deadline = inst.tasks.at(a.task).deadline;
          break;
        case ActionKind::DropIntermediate: cp.kind = CheckpointKind::DropIntermediate; break;
        case ActionKind::PickIntermediate: cp.kind = CheckpointKind::PickIntermediate; break;
      }
      cp.dwell = dwell_of(cp.kind);
      if (cp.task != kNone)
        by_task[cp.task].push_back({static_cast<int>(s), static_cast<int>(i),
                                    static_cast<int>(seq.checkpoints.size()), cp.kind, cp.cell});
      seq.checkpoints.push_back(cp);
      at = a.cell;
    }
    out.sequences.push_back(std::move(seq));
  }

  std::map<Cell, std::vector<Event>, RowMajorLess> by_cell;
  for (auto& [task, events] : by_task) {
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.step < b.step; });
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (events[e].kind != CheckpointKind::DropIntermediate) continue;
      if (e + 1 >= events.size() || events[e + 1].kind != CheckpointKind::PickIntermediate ||
          events[e + 1].cell != events[e].cell)
        throw GoalCompileError("task " + std::to_string(task) + ": intermediate drop at " +
                               to_string(events[e].cell) + " has no matching pick");
      by_cell[events[e].cell].push_back(events[e]);
      by_cell[events[e].cell].push_back(events[e + 1]);
      if (events[e].robot != events[e + 1].robot)
        out.edges.push_back({events[e].robot, events[e].cp, events[e + 1].robot, events[e + 1].cp});
    }
    for (std::size_t e = 1; e < events.size(); ++e)
      if (events[e].kind == CheckpointKind::PickIntermediate &&
          events[e - 1].kind != CheckpointKind::DropIntermediate)
        throw GoalCompileError("task " + std::to_string(task) + ": intermediate pick without a drop");
  }
  for (auto& [cell, events] : by_cell) {
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.step < b.step; });
    for (std::size_t e = 1; e + 1 < events.size(); e += 2) {
      const Event& pick = events[e];
      const Event& next_drop = events[e + 1];
      if (pick.robot != next_drop.robot) out.edges.push_back({pick.robot, pick.cp, next_drop.robot, next_drop.cp});
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace mapd
