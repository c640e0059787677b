#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapd/grid.hpp"

namespace mapd {

enum class Objective { Makespan, TotalCost };

inline const char* to_string(Objective o) {
  return o == Objective::Makespan ? "makespan" : "total_cost";
}

inline Objective parse_objective(const std::string& s) {
  if (s == "makespan") return Objective::Makespan;
  if (s == "total_cost" || s == "total-cost") return Objective::TotalCost;
  throw std::invalid_argument("unknown objective '" + s + "'");
}

struct Robot {
  int id = 0;
  Cell start;  // also the base the robot must return to
  int capacity = 1;
};

struct Task {
  int id = 0;
  Cell pickup;
  Cell drop;
  int weight = 1;
  std::optional<int> deadline;
};

inline constexpr double kDefaultTimeoutSeconds = 3600.0;

struct Instance {
  Workspace workspace;
  std::vector<Robot> robots;
  std::vector<Task> tasks;
  Objective objective = Objective::Makespan;
  int z = 0;  // action-step budget; 0 means "use min_feasible_z"
  double timeout_s = kDefaultTimeoutSeconds;
  bool allow_degenerate = false;  // tasks whose pickup equals their drop
};

/// Smallest action-step budget for which every task can be served when work
/// is spread evenly: one final return plus a pick and a drop per task.
inline int min_feasible_z(int num_tasks, int num_robots) {
  if (num_robots < 1) throw std::invalid_argument("at least one robot is required");
  if (num_tasks < 0) throw std::invalid_argument("negative task count");
  return 1 + (num_tasks + num_robots - 1) / num_robots * 2;
}

/// Budget under which a single robot could serve every task, i.e. the
/// assignment space is not restricted by load balancing.
inline int exhaustive_z(int num_tasks) {
  if (num_tasks < 0) throw std::invalid_argument("negative task count");
  return 1 + 2 * num_tasks;
}

inline int effective_z(const Instance& inst) {
  return inst.z > 0 ? inst.z
                    : min_feasible_z(static_cast<int>(inst.tasks.size()),
                                     static_cast<int>(inst.robots.size()));
}

/// Every cell the task planner may place a robot or an object on: bases,
/// pickups, drops and intermediates.
inline std::vector<Cell> points_of_interest(const Instance& inst) {
  std::set<Cell, RowMajorLess> s;
  for (const auto& r : inst.robots) s.insert(r.start);
  for (const auto& t : inst.tasks) {
    s.insert(t.pickup);
    s.insert(t.drop);
  }
  for (Cell c : inst.workspace.intermediates()) s.insert(c);
  return {s.begin(), s.end()};
}

/// Well-formedness check. Returns every problem found; empty means valid.
inline std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> diags;
  const Workspace& ws = inst.workspace;
  auto cell_ok = [&](Cell c, const std::string& what) {
    if (!ws.in_bounds(c)) {
      diags.push_back(what + " " + to_string(c) + " out of bounds");
      return false;
    }
    if (ws.is_obstacle(c)) {
      diags.push_back(what + " " + to_string(c) + " is an obstacle");
      return false;
    }
    return true;
  };

  if (inst.robots.empty()) diags.emplace_back("instance has no robots");

  std::set<Cell, RowMajorLess> bases;
  int max_capacity = -1;
  for (std::size_t i = 0; i < inst.robots.size(); ++i) {
    const Robot& r = inst.robots[i];
    const std::string name = "robot " + std::to_string(r.id);
    if (r.id != static_cast<int>(i))
      diags.push_back(name + " id must be " + std::to_string(i) + " (ids are dense and ordered)");
    if (cell_ok(r.start, name + " start")) {
      if (!bases.insert(r.start).second) diags.push_back(name + " start shares a cell with another robot");
      if (ws.is_intermediate(r.start)) diags.push_back(name + " start is an intermediate cell");
    }
    if (r.capacity < 0) diags.push_back(name + " has negative capacity");
    max_capacity = std::max(max_capacity, r.capacity);
  }

  std::set<Cell, RowMajorLess> task_cells;
  std::vector<bool> tasks_ok(inst.tasks.size(), true);
  for (std::size_t m = 0; m < inst.tasks.size(); ++m) {
    const Task& t = inst.tasks[m];
    const std::string name = "task " + std::to_string(t.id);
    if (t.id != static_cast<int>(m))
      diags.push_back(name + " id must be " + std::to_string(m) + " (ids are dense and ordered)");
    bool ok = cell_ok(t.pickup, name + " pickup");
    ok = cell_ok(t.drop, name + " drop") && ok;
    tasks_ok[m] = ok;
    if (t.pickup == t.drop && !inst.allow_degenerate)
      diags.push_back(name + " pickup equals drop (enable degenerate tasks to allow this)");
    if (t.weight < 0) diags.push_back(name + " has negative weight");
    if (!inst.robots.empty() && t.weight > max_capacity)
      diags.push_back(name + " exceeds every capacity");
    if (t.deadline && *t.deadline < 0) diags.push_back(name + " has a negative deadline");
    if (!ok) continue;
    for (Cell c : {t.pickup, t.drop}) {
      if (ws.is_intermediate(c)) diags.push_back(name + " uses intermediate cell " + to_string(c));
      if (bases.contains(c)) diags.push_back(name + " uses robot base " + to_string(c));
    }
    if (!task_cells.insert(t.pickup).second)
      diags.push_back(name + " pickup " + to_string(t.pickup) + " is shared with another task");
    if (t.drop != t.pickup && !task_cells.insert(t.drop).second)
      diags.push_back(name + " drop " + to_string(t.drop) + " is shared with another task");
  }

  for (std::size_t m = 0; m < inst.tasks.size(); ++m) {
    if (!tasks_ok[m]) continue;
    const Task& t = inst.tasks[m];
    const std::string name = "task " + std::to_string(t.id);
    auto field = distance_field(ws, t.pickup);
    if (field[ws.index(t.drop)] < 0) diags.push_back(name + " drop unreachable");
    bool served = false;
    for (const Robot& r : inst.robots)
      if (ws.is_free(r.start) && field[ws.index(r.start)] >= 0 && r.capacity >= t.weight) served = true;
    if (!inst.robots.empty() && !served && t.weight <= max_capacity)
      diags.push_back(name + " pickup unreachable from every robot able to carry it");
  }

  if (inst.z < 0) diags.emplace_back("z must be nonnegative");
  if (inst.z > 0 && !inst.robots.empty()) {
    const int zmin = min_feasible_z(static_cast<int>(inst.tasks.size()),
                                    static_cast<int>(inst.robots.size()));
    if (inst.z < zmin)
      diags.push_back("z = " + std::to_string(inst.z) + " is below the minimum feasible " +
                      std::to_string(zmin));
  }
  if (inst.timeout_s < 0) diags.emplace_back("timeout must be nonnegative");
  return diags;
}

class InvalidInstance : public std::runtime_error {
 public:
  explicit InvalidInstance(std::vector<std::string> diags)
      : std::runtime_error(join(diags)), diagnostics(std::move(diags)) {}
  std::vector<std::string> diagnostics;

 private:
  static std::string join(const std::vector<std::string>& d) {
    std::string s = "invalid instance";
    for (const auto& x : d) s += "\n  " + x;
    return s;
  }
};

inline void require_valid(const Instance& inst) {
  auto diags = validate_instance(inst);
  if (!diags.empty()) throw InvalidInstance(std::move(diags));
}

}  // namespace mapd
