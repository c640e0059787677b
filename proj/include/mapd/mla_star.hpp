#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mapd/clock.hpp"
#include "mapd/plan.hpp"

namespace mapd {

struct VertexConstraint {
  Cell cell;
  int t = 0;

  friend auto operator<=>(const VertexConstraint&, const VertexConstraint&) = default;
};

/// Forbids moving from `from` to `to` between t and t + 1.
struct EdgeConstraint {
  Cell from;
  Cell to;
  int t = 0;

  friend auto operator<=>(const EdgeConstraint&, const EdgeConstraint&) = default;
};

/// Bounds on when checkpoint `cp` may complete.
struct TemporalConstraint {
  int cp = 0;
  int earliest = 0;
  int latest = std::numeric_limits<int>::max();

  friend auto operator<=>(const TemporalConstraint&, const TemporalConstraint&) = default;
};

struct RobotConstraints {
  std::vector<VertexConstraint> vertex;
  std::vector<EdgeConstraint> edge;
  std::vector<TemporalConstraint> temporal;

  bool empty() const { return vertex.empty() && edge.empty() && temporal.empty(); }
};

/// Per-sequence distance fields shared by every low-level call of one robot.
class SequenceHeuristic {
 public:
  SequenceHeuristic(const Workspace& ws, const GoalSequence& seq) {
    const std::size_t k = seq.checkpoints.size();
    for (const auto& cp : seq.checkpoints) fields_.push_back(distance_field(ws, cp.cell));
    fields_.push_back(distance_field(ws, seq.base));
    suffix_.assign(k + 1, 0);
    tail_.assign(k + 1, 0);
    for (std::size_t l = k; l-- > 0;) {
      const int leg = fields_[l + 1][ws.index(seq.checkpoints[l].cell)];
      if (leg < 0 || suffix_[l + 1] < 0) {
        suffix_[l] = -1;
        tail_[l] = -1;
        continue;
      }
      tail_[l] = leg + suffix_[l + 1];
      suffix_[l] = seq.checkpoints[l].dwell + tail_[l];
    }
  }

  /// Remaining cost lower bound from `c` with `label` checkpoints done; -1 if unreachable.
  int h(std::size_t cell_index, std::size_t label) const {
    const int d = fields_[label][cell_index];
    if (d < 0 || suffix_[label] < 0) return -1;
    return d + suffix_[label];
  }

  /// Part of h still to be paid after checkpoint `k` completes.
  int tail(std::size_t k) const { return tail_[k]; }

 private:
  std::vector<std::vector<int>> fields_;  // one per checkpoint, then the base
  std::vector<int> suffix_;
  std::vector<int> tail_;
};

enum class SearchStatus { Found, Infeasible, Timeout };

struct LowLevelResult {
  SearchStatus status = SearchStatus::Infeasible;
  RobotPath path;
  long long expanded = 0;
};

/// Multi-Label A*: minimum-time path that works the checkpoints in order and
/// ends on the base, able to stay there forever. Pick/drop kinds hold the
/// cell for one tick; returns complete on arrival.
inline LowLevelResult mla_star(const Workspace& ws, const GoalSequence& seq, const RobotConstraints& cons,
                               const SequenceHeuristic& heur, Deadline deadline = Deadline::never()) {
  LowLevelResult res;
  const int K = static_cast<int>(seq.checkpoints.size());
  const long long area = static_cast<long long>(ws.area());

  std::vector<int> earliest(K, 0), latest(K, std::numeric_limits<int>::max());
  for (int k = 0; k < K; ++k)
    if (seq.checkpoints[k].deadline) latest[k] = *seq.checkpoints[k].deadline;
  int horizon = 0;  // last time any constraint mentions
  for (const auto& tc : cons.temporal) {
    earliest.at(tc.cp) = std::max(earliest.at(tc.cp), tc.earliest);
    latest.at(tc.cp) = std::min(latest.at(tc.cp), tc.latest);
    horizon = std::max(horizon, tc.earliest);
  }
  for (int k = 0; k < K; ++k)
    if (latest[k] != std::numeric_limits<int>::max()) horizon = std::max(horizon, latest[k]);

  std::unordered_set<long long> vblock, eblock;
  int last_base_block = -1;
  for (const auto& v : cons.vertex) {
    if (!ws.in_bounds(v.cell)) continue;
    vblock.insert(static_cast<long long>(v.t) * area + ws.index(v.cell));
    horizon = std::max(horizon, v.t);
    if (v.cell == seq.base) last_base_block = std::max(last_base_block, v.t);
  }
  auto ekey = [&](std::size_t a, std::size_t b, int t) {
    return (static_cast<long long>(t) * area + static_cast<long long>(a)) * area + static_cast<long long>(b);
  };
  for (const auto& e : cons.edge) {
    if (!ws.in_bounds(e.from) || !ws.in_bounds(e.to)) continue;
    eblock.insert(ekey(ws.index(e.from), ws.index(e.to), e.t));
    horizon = std::max(horizon, e.t + 1);
  }
  auto vertex_ok = [&](std::size_t c, int t) { return !vblock.contains(static_cast<long long>(t) * area + c); };
  auto edge_ok = [&](std::size_t a, std::size_t b, int t) { return eblock.empty() || !eblock.contains(ekey(a, b, t)); };

  struct Node {
    std::size_t cell;
    int t;
    int label;
    int f;
    int parent;
  };
  std::vector<Node> nodes;
  struct Entry {
    int f;
    int t;
    int label;
    int id;
    bool operator<(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (label != o.label) return label < o.label;
      if (t != o.t) return t < o.t;
      return id > o.id;
    }
  };
  std::priority_queue<Entry> open;
  std::unordered_set<long long> closed;
  const long long tspan = static_cast<long long>(horizon) + 2;
  auto key = [&](std::size_t c, int t, int label) {
    return (static_cast<long long>(label) * area + static_cast<long long>(c)) * tspan + std::min<long long>(t, horizon + 1);
  };

  // Deadlines that can no longer be met from (c, t, label).
  auto hopeless = [&](int t, int label, int h) {
    for (int k = label; k < K; ++k)
      if (latest[k] != std::numeric_limits<int>::max() && t + h - heur.tail(k) > latest[k]) return true;
    return false;
  };

  auto push = [&](std::size_t c, int t, int label, int parent) {
    const int h = heur.h(c, label);
    if (h < 0) return;
    if (hopeless(t, label, h)) return;
    if (closed.contains(key(c, t, label))) return;
    nodes.push_back({c, t, label, t + h, parent});
    open.push({t + h, t, label, static_cast<int>(nodes.size()) - 1});
  };

  const std::size_t base = ws.index(seq.base);
  push(base, 0, 0, -1);
  while (!open.empty()) {
    if ((++res.expanded & 1023) == 0 && deadline.expired()) {
      res.status = SearchStatus::Timeout;
      return res;
    }
    const Entry top = open.top();
    open.pop();
    const Node n = nodes[top.id];
    if (!closed.insert(key(n.cell, n.t, n.label)).second) continue;

    if (n.label == K && n.cell == base && n.t > last_base_block) {
      std::vector<int> chain;
      for (int id = top.id; id >= 0; id = nodes[id].parent) chain.push_back(id);
      std::reverse(chain.begin(), chain.end());
      res.path.completions.assign(K, -1);
      for (std::size_t s = 0; s < chain.size(); ++s) {
        const Node& x = nodes[chain[s]];
        if (s > 0 && nodes[chain[s - 1]].label < x.label) res.path.completions[x.label - 1] = x.t;
        if (s == 0 || x.t != nodes[chain[s - 1]].t) res.path.cells.push_back(ws.cell_at(x.cell));
      }
      res.status = SearchStatus::Found;
      return res;
    }

    if (n.label < K) {
      const Checkpoint& cp = seq.checkpoints[n.label];
      if (ws.index(cp.cell) == n.cell) {
        const int done = n.t + cp.dwell;
        if (done >= earliest[n.label] && done <= latest[n.label] && (cp.dwell == 0 || vertex_ok(n.cell, done)))
          push(n.cell, done, n.label + 1, top.id);
      }
    }
    const int nt = n.t + 1;
    if (vertex_ok(n.cell, nt)) push(n.cell, nt, n.label, top.id);
    ws.for_each_neighbour(ws.cell_at(n.cell), [&](Cell nb) {
      const std::size_t ni = ws.index(nb);
      if (vertex_ok(ni, nt) && edge_ok(n.cell, ni, n.t)) push(ni, nt, n.label, top.id);
    });
  }
  res.status = SearchStatus::Infeasible;
  return res;
}

inline LowLevelResult mla_star(const Workspace& ws, const GoalSequence& seq, const RobotConstraints& cons = {},
                               Deadline deadline = Deadline::never()) {
  return mla_star(ws, seq, cons, SequenceHeuristic(ws, seq), deadline);
}

}  // namespace mapd
