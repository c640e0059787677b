#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "mapd/mla_star.hpp"

namespace mapd {

enum class ConflictType { Vertex, Edge, Precedence };

/// For Vertex: both robots on `cell` at t. For Edge: robot_a moves
/// cell -> other between t and t + 1 while robot_b moves the opposite way.
/// For Precedence: checkpoint (robot_a, cp_a) completes at t_a, not
/// strictly before (robot_b, cp_b) at t.
struct Conflict {
  ConflictType type = ConflictType::Vertex;
  int robot_a = 0;
  int robot_b = 0;
  Cell cell;
  Cell other;
  int t = 0;
  int cp_a = 0;
  int cp_b = 0;
  int t_a = 0;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

/// Earliest conflict among the paths (robots park at their final cell after
/// their last tick). Ties go to the lower robot pair; at equal time vertex
/// conflicts come before edge conflicts, then precedence violations.
inline std::optional<Conflict> detect_conflict(const std::vector<RobotPath>& paths,
                                               const std::vector<PrecedenceEdge>& edges = {}) {
  int horizon = 0;
  for (const auto& p : paths) horizon = std::max(horizon, p.cost());
  const int n = static_cast<int>(paths.size());
  std::optional<Conflict> best_prec;
  for (const auto& e : edges) {
    const int ta = paths[e.robot_a].completions[e.cp_a];
    const int tb = paths[e.robot_b].completions[e.cp_b];
    if (ta < tb) continue;
    Conflict c{ConflictType::Precedence, e.robot_a, e.robot_b, {}, {}, tb, e.cp_a, e.cp_b, ta};
    auto rank = [](const Conflict& x) {
      return std::make_tuple(x.t, std::min(x.robot_a, x.robot_b), std::max(x.robot_a, x.robot_b), x.cp_a, x.cp_b);
    };
    if (!best_prec || rank(c) < rank(*best_prec)) best_prec = c;
  }
  for (int t = 0; t <= horizon; ++t) {
    if (best_prec && best_prec->t < t) return best_prec;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (paths[i].at(t) == paths[j].at(t)) return Conflict{ConflictType::Vertex, i, j, paths[i].at(t), {}, t};
    if (t > 0)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const Cell ai = paths[i].at(t - 1), bi = paths[i].at(t);
          const Cell aj = paths[j].at(t - 1), bj = paths[j].at(t);
          if (ai != bi && ai == bj && bi == aj) return Conflict{ConflictType::Edge, i, j, ai, bi, t - 1};
        }
    if (best_prec && best_prec->t == t) return best_prec;
  }
  return best_prec;
}

enum class PathStatus { Solved, Infeasible, Timeout };

inline const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Solved: return "solved";
    case PathStatus::Infeasible: return "infeasible";
    case PathStatus::Timeout: return "timeout";
  }
  return "?";
}

struct PathResult {
  PathStatus status = PathStatus::Infeasible;
  std::optional<Plan> plan;
  long long high_level_nodes = 0;
  long long low_level_expansions = 0;
};

/// Conflict-based search over goal sequences with precedence constraints.
/// High-level nodes are ordered by objective cost, then sum of costs, then
/// creation order.
inline PathResult cbs_pc(const Workspace& ws, const CompiledGoals& goals, Objective objective,
                         Deadline deadline = Deadline::never()) {
  PathResult res;
  const int n = static_cast<int>(goals.sequences.size());
  std::vector<SequenceHeuristic> heur;
  heur.reserve(n);
  for (const auto& seq : goals.sequences) heur.emplace_back(ws, seq);

  struct Node {
    std::vector<RobotConstraints> cons;
    std::vector<RobotPath> paths;
    int cost = 0;
    int soc = 0;
    long long id = 0;
  };
  auto evaluate = [&](Node& node) {
    node.soc = 0;
    node.cost = 0;
    for (const auto& p : node.paths) {
      node.soc += p.cost();
      node.cost = std::max(node.cost, p.cost());
    }
    if (objective == Objective::TotalCost) node.cost = node.soc;
  };
  struct Order {
    bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
      if (a->cost != b->cost) return a->cost > b->cost;
      if (a->soc != b->soc) return a->soc > b->soc;
      return a->id > b->id;
    }
  };
  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, Order> open;
  long long next_id = 0;

  // Replans robot i under node.cons[i]; false when infeasible or out of time.
  auto replan = [&](Node& node, int i) {
    LowLevelResult r = mla_star(ws, goals.sequences[i], node.cons[i], heur[i], deadline);
    res.low_level_expansions += r.expanded;
    if (r.status == SearchStatus::Timeout) res.status = PathStatus::Timeout;
    if (r.status != SearchStatus::Found) return false;
    node.paths[i] = std::move(r.path);
    return true;
  };

  {
    auto root = std::make_shared<Node>();
    root->cons.resize(n);
    root->paths.resize(n);
    for (int i = 0; i < n; ++i)
      if (!replan(*root, i)) {
        if (res.status != PathStatus::Timeout) res.status = PathStatus::Infeasible;
        return res;
      }
    evaluate(*root);
    root->id = next_id++;
    open.push(std::move(root));
  }

  while (!open.empty()) {
    if (deadline.expired()) {
      res.status = PathStatus::Timeout;
      return res;
    }
    std::shared_ptr<Node> node = open.top();
    open.pop();
    ++res.high_level_nodes;
    auto conflict = detect_conflict(node->paths, goals.edges);
    if (!conflict) {
      Plan plan;
      plan.goals = goals;
      plan.paths = node->paths;
      finalize_costs(plan);
      res.status = PathStatus::Solved;
      res.plan = std::move(plan);
      return res;
    }
    const Conflict& c = *conflict;
    for (int side = 0; side < 2; ++side) {
      auto child = std::make_shared<Node>(*node);
      int robot = 0;
      switch (c.type) {
        case ConflictType::Vertex:
          robot = side == 0 ? c.robot_a : c.robot_b;
          child->cons[robot].vertex.push_back({c.cell, c.t});
          break;
        case ConflictType::Edge:
          robot = side == 0 ? c.robot_a : c.robot_b;
          if (side == 0) child->cons[robot].edge.push_back({c.cell, c.other, c.t});
          else child->cons[robot].edge.push_back({c.other, c.cell, c.t});
          break;
        case ConflictType::Precedence:
          if (side == 0) {
            robot = c.robot_b;
            child->cons[robot].temporal.push_back({c.cp_b, c.t_a + 1, std::numeric_limits<int>::max()});
          } else {
            robot = c.robot_a;
            if (c.t - 1 < 0) continue;
            child->cons[robot].temporal.push_back({c.cp_a, 0, c.t - 1});
          }
          break;
      }
      if (!replan(*child, robot)) {
        if (res.status == PathStatus::Timeout) return res;
        continue;
      }
      evaluate(*child);
      child->id = next_id++;
      open.push(std::move(child));
    }
  }
  res.status = PathStatus::Infeasible;
  return res;
}

inline PathResult cbs_pc(const Instance& inst, const TaskAssignment& assignment,
                         Deadline deadline = Deadline::never()) {
  return cbs_pc(inst.workspace, compile_goal_sequences(inst, assignment), inst.objective, deadline);
}

}  // namespace mapd
