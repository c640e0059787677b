#pragma once

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapd/goals.hpp"

namespace mapd {

/// Timed trajectory of one robot: cells[t] for t = 0..T, plus the completion
/// time of each checkpoint of its goal sequence.
struct RobotPath {
  std::vector<Cell> cells;
  std::vector<int> completions;

  int cost() const { return static_cast<int>(cells.size()) - 1; }
  Cell at(int t) const { return cells[std::min<std::size_t>(t, cells.size() - 1)]; }

  friend bool operator==(const RobotPath&, const RobotPath&) = default;
};

struct Plan {
  CompiledGoals goals;
  std::vector<RobotPath> paths;
  int makespan = 0;
  int total_cost = 0;

  int cost(Objective obj) const { return obj == Objective::Makespan ? makespan : total_cost; }

  /// Time each task reaches its drop cell, indexed by task id.
  std::vector<int> task_completion(std::size_t num_tasks) const {
    std::vector<int> out(num_tasks, -1);
    for (std::size_t i = 0; i < goals.sequences.size(); ++i) {
      const auto& cps = goals.sequences[i].checkpoints;
      for (std::size_t k = 0; k < cps.size(); ++k)
        if (cps[k].kind == CheckpointKind::Drop) out.at(cps[k].task) = paths[i].completions[k];
    }
    return out;
  }
};

inline void finalize_costs(Plan& plan) {
  plan.makespan = 0;
  plan.total_cost = 0;
  for (const auto& p : plan.paths) {
    plan.makespan = std::max(plan.makespan, p.cost());
    plan.total_cost += p.cost();
  }
}

/// One cell of the trajectory table: what happened on the tick ending at t.
struct TableEntry {
  std::string label;
  Cell cell;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

struct PlanTable {
  int robots = 0;
  std::vector<std::vector<TableEntry>> rows;  // rows[t][robot]

  friend bool operator==(const PlanTable&, const PlanTable&) = default;
};

inline std::string checkpoint_label(const Checkpoint& cp) {
  const std::string m = std::to_string(cp.task + 1);
  switch (cp.kind) {
    case CheckpointKind::Pick: return "Pick_" + m;
    case CheckpointKind::Drop: return "Drop_" + m;
    case CheckpointKind::DropIntermediate: return "InterDrop_" + m;
    case CheckpointKind::PickIntermediate: return "InterPick_" + m;
    case CheckpointKind::ReturnHome: return "Return";
  }
  return "?";
}

inline PlanTable to_table(const Plan& plan) {
  PlanTable table;
  table.robots = static_cast<int>(plan.paths.size());
  const int horizon = plan.makespan;
  table.rows.assign(horizon + 1, std::vector<TableEntry>(table.robots));
  for (int i = 0; i < table.robots; ++i) {
    const RobotPath& p = plan.paths[i];
    const auto& cps = plan.goals.sequences[i].checkpoints;
    const int T = p.cost();
    for (int t = 0; t <= horizon; ++t) {
      std::string label = t == 0 ? "Start" : t > T ? "---" : t == T ? "Return" : "Move";
      if (t > 0 && t <= T) {
        for (std::size_t k = 0; k < cps.size(); ++k)
          if (p.completions[k] == t && (cps[k].dwell > 0 || label == "Move")) label = checkpoint_label(cps[k]);
      }
      table.rows[t][i] = {label, p.at(t)};
    }
  }
  return table;
}

/// Header `time r1 r2 ...`, then `t (Label, (x, y)) ...` per tick.
inline std::string render_plan_table(const PlanTable& table) {
  std::ostringstream os;
  os << "time";
  for (int i = 0; i < table.robots; ++i) os << " r" << i + 1;
  os << '\n';
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    os << t;
    for (const auto& e : table.rows[t]) os << " (" << e.label << ", (" << e.cell.x << ", " << e.cell.y << "))";
    os << '\n';
  }
  return os.str();
}

inline std::string render_plan_table(const Plan& plan) { return render_plan_table(to_table(plan)); }

class PlanParseError : public std::runtime_error {
 public:
  PlanParseError(const std::string& what, int line)
      : std::runtime_error("plan:" + std::to_string(line) + ": " + what) {}
};

inline PlanTable parse_plan_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  PlanTable table;
  int lineno = 0;
  if (!std::getline(in, line)) throw PlanParseError("empty table", 1);
  ++lineno;
  {
    std::istringstream hs(line);
    std::string word;
    hs >> word;
    if (word != "time") throw PlanParseError("header must start with 'time'", lineno);
    while (hs >> word) {
      if (word != "r" + std::to_string(table.robots + 1)) throw PlanParseError("bad robot column '" + word + "'", lineno);
      ++table.robots;
    }
  }
  static const std::regex entry(R"( \(([^ ,()]+), \((-?\d+), (-?\d+)\)\))");
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t sp = line.find(' ');
    const std::string tstr = line.substr(0, sp);
    if (tstr != std::to_string(table.rows.size())) throw PlanParseError("expected time " + std::to_string(table.rows.size()), lineno);
    std::vector<TableEntry> row;
    std::string rest = sp == std::string::npos ? "" : line.substr(sp);
    std::smatch m;
    while (std::regex_search(rest, m, entry, std::regex_constants::match_continuous)) {
      row.push_back({m[1].str(), {std::stoi(m[2].str()), std::stoi(m[3].str())}});
      rest = m.suffix().str();
    }
    if (!rest.empty()) throw PlanParseError("malformed entry near '" + rest + "'", lineno);
    if (static_cast<int>(row.size()) != table.robots) throw PlanParseError("wrong number of entries", lineno);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw PlanParseError("table has no rows", lineno);
  return table;
}

/// Checks a trajectory table against an instance from scratch: motion,
/// collisions, object custody, capacities, transfers, deadlines and homing.
/// Returns every problem found.
inline std::vector<std::string> validate_plan_table(const Instance& inst, const PlanTable& table) {
  std::vector<std::string> diags;
  const Workspace& ws = inst.workspace;
  const int nr = static_cast<int>(inst.robots.size());
  if (table.robots != nr) {
    diags.push_back("table has " + std::to_string(table.robots) + " robots, instance has " + std::to_string(nr));
    return diags;
  }
  const int horizon = static_cast<int>(table.rows.size()) - 1;
  auto who = [](int i, int t) { return "r" + std::to_string(i + 1) + " at t=" + std::to_string(t); };

  std::vector<int> finish(nr, 0);
  for (int i = 0; i < nr; ++i) {
    if (table.rows[0][i].label != "Start") diags.push_back(who(i, 0) + ": first entry must be Start");
    if (table.rows[0][i].cell != inst.robots[i].start) diags.push_back(who(i, 0) + ": not at its base");
    int t_end = horizon;
    while (t_end > 0 && table.rows[t_end][i].label == "---") --t_end;
    finish[i] = t_end;
    for (int t = 1; t <= horizon; ++t) {
      const Cell a = table.rows[t - 1][i].cell, b = table.rows[t][i].cell;
      if (!ws.is_free(b)) diags.push_back(who(i, t) + ": on a blocked cell " + to_string(b));
      if (manhattan(a, b) > 1) diags.push_back(who(i, t) + ": jumps from " + to_string(a) + " to " + to_string(b));
      const std::string& lab = table.rows[t][i].label;
      if (t <= t_end && lab == "---") diags.push_back(who(i, t) + ": idle marker before the final return");
      if (t > t_end && a != b) diags.push_back(who(i, t) + ": moves after finishing");
      if (lab == "Start") diags.push_back(who(i, t) + ": Start after t=0");
    }
    if (table.rows[t_end][i].cell != inst.robots[i].start) diags.push_back("r" + std::to_string(i + 1) + " does not end at its base");
    if (t_end > 0 && table.rows[t_end][i].label != "Return")
      diags.push_back(who(i, t_end) + ": final arrival must be labelled Return");
  }

  for (int t = 0; t <= horizon; ++t)
    for (int i = 0; i < nr; ++i)
      for (int j = i + 1; j < nr; ++j) {
        if (table.rows[t][i].cell == table.rows[t][j].cell)
          diags.push_back("vertex conflict r" + std::to_string(i + 1) + "/r" + std::to_string(j + 1) + " at " +
                          to_string(table.rows[t][i].cell) + " t=" + std::to_string(t));
        if (t > 0 && table.rows[t][i].cell == table.rows[t - 1][j].cell &&
            table.rows[t][j].cell == table.rows[t - 1][i].cell && table.rows[t][i].cell != table.rows[t][j].cell)
          diags.push_back("edge conflict r" + std::to_string(i + 1) + "/r" + std::to_string(j + 1) + " at t=" +
                          std::to_string(t - 1) + "->" + std::to_string(t));
      }

  // object custody
  const int nt = static_cast<int>(inst.tasks.size());
  enum class Where { Origin, Carried, Parked, Delivered };
  std::vector<Where> where(nt, Where::Origin);
  std::vector<int> carrier(nt, -1), since(nt, 0), delivered_at(nt, -1);
  std::vector<Cell> parked(nt);
  std::vector<int> load(nr, 0);
  static const std::regex action(R"((Pick|Drop|InterDrop|InterPick)_(\d+))");
  for (int t = 1; t <= horizon; ++t) {
    for (int i = 0; i < nr; ++i) {
      const TableEntry& e = table.rows[t][i];
      if (e.label == "Move" || e.label == "---" || e.label == "Start") continue;
      if (e.label == "Return") {
        if (e.cell != inst.robots[i].start) diags.push_back(who(i, t) + ": Return away from base");
        continue;
      }
      std::smatch m;
      if (!std::regex_match(e.label, m, action)) {
        diags.push_back(who(i, t) + ": unknown action '" + e.label + "'");
        continue;
      }
      const int task = std::stoi(m[2].str()) - 1;
      if (task < 0 || task >= nt) {
        diags.push_back(who(i, t) + ": unknown task in '" + e.label + "'");
        continue;
      }
      if (table.rows[t - 1][i].cell != e.cell) diags.push_back(who(i, t) + ": " + e.label + " without dwelling on the cell");
      const Task& tk = inst.tasks[task];
      const std::string kind = m[1].str();
      if (kind == "Pick") {
        if (where[task] != Where::Origin || e.cell != tk.pickup) {
          diags.push_back(who(i, t) + ": " + e.label + " not at an untouched pickup");
          continue;
        }
        where[task] = Where::Carried;
        carrier[task] = i;
        load[i] += tk.weight;
      } else if (kind == "InterPick") {
        if (where[task] != Where::Parked || parked[task] != e.cell) {
          diags.push_back(who(i, t) + ": " + e.label + " where the object is not parked");
          continue;
        }
        if (t <= since[task]) diags.push_back(who(i, t) + ": " + e.label + " before the object is available");
        where[task] = Where::Carried;
        carrier[task] = i;
        load[i] += tk.weight;
      } else {
        if (where[task] != Where::Carried || carrier[task] != i) {
          diags.push_back(who(i, t) + ": " + e.label + " without carrying the object");
          continue;
        }
        load[i] -= tk.weight;
        carrier[task] = -1;
        since[task] = t;
        if (kind == "Drop") {
          if (e.cell != tk.drop) diags.push_back(who(i, t) + ": " + e.label + " away from the drop cell");
          where[task] = Where::Delivered;
          delivered_at[task] = t;
        } else {
          if (!ws.is_intermediate(e.cell)) diags.push_back(who(i, t) + ": " + e.label + " on a non-intermediate cell");
          for (int o = 0; o < nt; ++o)
            if (o != task && where[o] == Where::Parked && parked[o] == e.cell)
              diags.push_back(who(i, t) + ": " + e.label + " onto an occupied intermediate cell");
          where[task] = Where::Parked;
          parked[task] = e.cell;
        }
      }
      if (load[i] > inst.robots[i].capacity) diags.push_back(who(i, t) + ": capacity exceeded");
    }
  }
  for (int m = 0; m < nt; ++m) {
    if (where[m] != Where::Delivered) {
      diags.push_back("task " + std::to_string(m + 1) + " not delivered");
      continue;
    }
    if (inst.tasks[m].deadline && delivered_at[m] > *inst.tasks[m].deadline)
      diags.push_back("task " + std::to_string(m + 1) + " delivered at " + std::to_string(delivered_at[m]) +
                      " after its deadline " + std::to_string(*inst.tasks[m].deadline));
  }
  return diags;
}

/// Validates a plan and its bookkeeping (costs, checkpoint order, precedence).
inline std::vector<std::string> validate_plan(const Instance& inst, const Plan& plan) {
  std::vector<std::string> diags;
  if (plan.paths.size() != inst.robots.size() || plan.goals.sequences.size() != inst.robots.size()) {
    diags.emplace_back("plan does not cover every robot");
    return diags;
  }
  for (std::size_t i = 0; i < plan.paths.size(); ++i) {
    const auto& p = plan.paths[i];
    const auto& cps = plan.goals.sequences[i].checkpoints;
    if (p.cells.empty() || p.completions.size() != cps.size()) {
      diags.push_back("robot " + std::to_string(i) + " path is incomplete");
      return diags;
    }
    int prev = 0;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const int c = p.completions[k];
      if (c < prev + cps[k].dwell || c > p.cost()) diags.push_back("robot " + std::to_string(i) + " checkpoint " + std::to_string(k) + " out of order");
      else if (p.at(c) != cps[k].cell || (cps[k].dwell > 0 && p.at(c - 1) != cps[k].cell))
        diags.push_back("robot " + std::to_string(i) + " checkpoint " + std::to_string(k) + " not worked on its cell");
      prev = c;
    }
  }
  for (const auto& e : plan.goals.edges)
    if (plan.paths[e.robot_a].completions[e.cp_a] >= plan.paths[e.robot_b].completions[e.cp_b])
      diags.push_back("precedence violated between robots " + std::to_string(e.robot_a) + " and " + std::to_string(e.robot_b));
  Plan copy = plan;
  finalize_costs(copy);
  if (copy.makespan != plan.makespan || copy.total_cost != plan.total_cost) diags.emplace_back("plan cost bookkeeping is wrong");
  for (auto& d : validate_plan_table(inst, to_table(plan))) diags.push_back(std::move(d));
  return diags;
}

}  // namespace mapd
