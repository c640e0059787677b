#pragma once

// Independent reference implementations used only by the test suites.

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "mapd/mapd.hpp"

namespace oracle {

using namespace mapd;

/// Plain breadth-first search, written without the library's helpers.
inline std::optional<int> bfs_dist(const Workspace& ws, Cell a, Cell b) {
  if (!ws.is_free(a) || !ws.is_free(b)) return std::nullopt;
  std::vector<std::vector<int>> d(ws.height(), std::vector<int>(ws.width(), -1));
  std::deque<Cell> q{a};
  d[a.y][a.x] = 0;
  while (!q.empty()) {
    Cell c = q.front();
    q.pop_front();
    if (c == b) return d[c.y][c.x];
    const Cell nb[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (Cell n : nb)
      if (ws.is_free(n) && d[n.y][n.x] < 0) {
        d[n.y][n.x] = d[c.y][c.x] + 1;
        q.push_back(n);
      }
  }
  return std::nullopt;
}

/// Every goal-reaching joint action sequence of length z, by exhaustive
/// enumeration of per-robot action choices (no pruning at all).
inline std::vector<TaskAssignment> all_assignments(const TaskModel& model, int z) {
  std::vector<TaskAssignment> out;
  const int nr = model.num_robots();
  std::vector<std::vector<Action>> seq;
  const Instance& inst = model.instance();
  // Sound prune: every pending pick, drop and homing needs its own action slot.
  auto can_finish = [&](const StepState& st) {
    int needed = 0;
    for (std::size_t m = 0; m < st.tasks.size(); ++m) {
      const auto& t = st.tasks[m];
      if (t.carrier != kNone) needed += 1;
      else if (!t.loc || *t.loc != inst.tasks[m].drop || (inst.tasks[m].pickup == inst.tasks[m].drop && t.loc_time == 0))
        needed += 2;
    }
    std::vector<int> own(nr, 0);
    for (int i = 0; i < nr; ++i) own[i] = st.robots[i].pos != inst.robots[i].start ? 1 : 0;
    const int left = z - st.step;
    for (int i = 0; i < nr; ++i)
      if (own[i] > left) return false;
    int homing = 0;
    for (int v : own) homing += v;
    return needed + homing <= nr * left;
  };
  std::function<void(const StepState&)> rec = [&](const StepState& st) {
    if (!can_finish(st)) return;
    if (st.step == z) {
      if (is_goal(model.instance(), st)) {
        auto a = make_assignment(model, seq);
        if (a) out.push_back(std::move(*a));
      }
      return;
    }
    std::vector<std::vector<Action>> options(nr);
    for (int i = 0; i < nr; ++i) options[i] = robot_actions(model, st, i);
    std::vector<Action> pick(nr);
    std::function<void(int)> choose = [&](int i) {
      if (i == nr) {
        auto next = joint_step(model, st, pick);
        if (!next) return;
        seq.push_back(pick);
        rec(*next);
        seq.pop_back();
        return;
      }
      for (const Action& a : options[i]) {
        pick[i] = a;
        choose(i + 1);
      }
    };
    choose(0);
  };
  rec(initial_state(model.instance()));
  return out;
}

inline std::optional<int> min_assignment_cost(const TaskModel& model, int z) {
  std::optional<int> best;
  for (const auto& a : all_assignments(model, z))
    if (!best || a.cost < *best) best = a.cost;
  return best;
}

struct JointResult {
  int makespan = 0;
  int total_cost = 0;
  int cost = 0;  // under the requested objective
};

/// Optimal joint plan for compiled goal sequences by Dijkstra over the joint
/// state (cells, labels, finished flags, time up to the last deadline).
/// Finished robots stay on their base forever. `bound`: costs >= bound are
/// not explored.
inline std::optional<JointResult> joint_search(const Workspace& ws, const CompiledGoals& goals, Objective objective,
                                               int bound = std::numeric_limits<int>::max()) {
  const int n = static_cast<int>(goals.sequences.size());
  int tcap = 0;
  for (const auto& s : goals.sequences)
    for (const auto& cp : s.checkpoints)
      if (cp.deadline) tcap = std::max(tcap, *cp.deadline + 1);

  struct State {
    std::vector<Cell> cell;
    std::vector<int> label;
    std::vector<int> done;  // -1 while active, else finishing time
    int t = 0;
  };
  auto key_of = [&](const State& s) {
    std::vector<int> k;
    for (int i = 0; i < n; ++i) {
      k.push_back(s.cell[i].x);
      k.push_back(s.cell[i].y);
      k.push_back(s.label[i]);
      k.push_back(s.done[i] >= 0);
    }
    k.push_back(std::min(s.t, tcap));
    return k;
  };
  // Zero-dwell checkpoints complete on arrival.
  auto settle = [&](State& s) {
    for (int i = 0; i < n; ++i) {
      const auto& cps = goals.sequences[i].checkpoints;
      while (s.label[i] < static_cast<int>(cps.size()) && cps[s.label[i]].dwell == 0 && cps[s.label[i]].cell == s.cell[i])
        ++s.label[i];
    }
  };
  auto finished_cp = [&](const State& s, int robot, int cp) { return s.label[robot] > cp; };

  State start;
  for (int i = 0; i < n; ++i) {
    start.cell.push_back(goals.sequences[i].base);
    start.label.push_back(0);
    start.done.push_back(-1);
  }
  settle(start);

  using Entry = std::pair<std::pair<int, int>, int>;  // ((cost, soc), state id)
  std::vector<State> states;
  std::vector<std::pair<int, int>> costs;
  std::map<std::vector<int>, std::pair<int, int>> best;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  auto push = [&](State s, int cost, int soc) {
    if (cost >= bound) return;
    auto k = key_of(s);
    auto it = best.find(k);
    if (it != best.end() && it->second <= std::make_pair(cost, soc)) return;
    best[k] = {cost, soc};
    states.push_back(std::move(s));
    costs.push_back({cost, soc});
    open.push({{cost, soc}, static_cast<int>(states.size()) - 1});
  };

  // Commit choices happen at a state; moves follow.
  push(start, 0, 0);
  while (!open.empty()) {
    auto [c, id] = open.top();
    open.pop();
    const State s = states[id];
    if (best[key_of(s)] != c) continue;
    const int cost = c.first, soc = c.second;

    bool all_done = true;
    for (int i = 0; i < n; ++i) all_done = all_done && s.done[i] >= 0;
    if (all_done) {
      int ms = 0, tc = 0;
      for (int i = 0; i < n; ++i) {
        ms = std::max(ms, s.done[i]);
        tc += s.done[i];
      }
      return JointResult{ms, tc, objective == Objective::Makespan ? ms : tc};
    }

    // Commit: any active robot home with every checkpoint done may finish now.
    for (int i = 0; i < n; ++i) {
      if (s.done[i] >= 0) continue;
      if (s.cell[i] == goals.sequences[i].base &&
          s.label[i] == static_cast<int>(goals.sequences[i].checkpoints.size())) {
        State f = s;
        f.done[i] = s.t;
        push(std::move(f), cost, soc);
      }
    }

    // One tick for everybody.
    std::vector<std::vector<std::pair<Cell, int>>> opts(n);  // (next cell, label increment)
    for (int i = 0; i < n; ++i) {
      if (s.done[i] >= 0) {
        opts[i].push_back({s.cell[i], 0});
        continue;
      }
      const Cell c0 = s.cell[i];
      opts[i].push_back({c0, 0});
      const Cell nb[4] = {{c0.x, c0.y - 1}, {c0.x, c0.y + 1}, {c0.x - 1, c0.y}, {c0.x + 1, c0.y}};
      for (Cell m : nb)
        if (ws.is_free(m)) opts[i].push_back({m, 0});
      const auto& cps = goals.sequences[i].checkpoints;
      if (s.label[i] < static_cast<int>(cps.size())) {
        const Checkpoint& cp = cps[s.label[i]];
        bool ok = cp.dwell == 1 && cp.cell == c0;
        if (ok && cp.deadline && s.t + 1 > *cp.deadline) ok = false;
        for (const auto& e : goals.edges)
          if (e.robot_b == i && e.cp_b == s.label[i] && !finished_cp(s, e.robot_a, e.cp_a)) ok = false;
        if (ok) opts[i].push_back({c0, 1});
      }
    }
    int active = 0;
    for (int i = 0; i < n; ++i) active += s.done[i] < 0;
    std::vector<int> pickk(n, 0);
    std::function<void(int)> rec = [&](int i) {
      if (i == n) {
        State nx = s;
        nx.t = s.t + 1;
        for (int r = 0; r < n; ++r) {
          nx.cell[r] = opts[r][pickk[r]].first;
          nx.label[r] += opts[r][pickk[r]].second;
        }
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) {
            if (nx.cell[a] == nx.cell[b]) return;
            if (nx.cell[a] == s.cell[b] && nx.cell[b] == s.cell[a] && s.cell[a] != s.cell[b]) return;
          }
        settle(nx);
        // A pending dwell checkpoint completes at nx.t + 1 at the earliest.
        for (int r = 0; r < n; ++r) {
          const auto& cps = goals.sequences[r].checkpoints;
          for (int k = nx.label[r]; k < static_cast<int>(cps.size()); ++k)
            if (cps[k].deadline && nx.t >= *cps[k].deadline && cps[k].dwell > 0) return;
        }
        const int tick = objective == Objective::Makespan ? 1 : active;
        push(std::move(nx), cost + tick, soc + active);
        return;
      }
      for (std::size_t o = 0; o < opts[i].size(); ++o) {
        pickk[i] = static_cast<int>(o);
        rec(i + 1);
      }
    };
    rec(0);
  }
  return std::nullopt;
}

/// Global optimum over every assignment and every joint realization.
inline std::optional<int> global_optimum(const Instance& inst, int z) {
  const TaskModel model(inst);
  std::set<std::string> seen;
  std::optional<int> best;
  for (const auto& a : all_assignments(model, z)) {
    CompiledGoals g = compile_goal_sequences(inst, a);
    std::string key = mapd::detail::goals_key(g);
    if (!seen.insert(key).second) continue;
    auto r = joint_search(inst.workspace, g, inst.objective, best ? *best : std::numeric_limits<int>::max());
    if (r && (!best || r->cost < *best)) best = r->cost;
  }
  return best;
}

}  // namespace oracle
