#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapd/task_planner.hpp"

namespace mapd {

namespace smt_detail {

inline std::string num(long long v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }

inline std::string var(const char* name, int a, int j) {
  return std::string(name) + "_" + std::to_string(a) + "_" + std::to_string(j);
}

inline std::string eq(const std::string& a, const std::string& b) { return "(= " + a + " " + b + ")"; }

inline std::string conj(const std::vector<std::string>& xs) {
  if (xs.empty()) return "true";
  if (xs.size() == 1) return xs.front();
  std::string s = "(and";
  for (const auto& x : xs) s += " " + x;
  return s + ")";
}

inline std::string disj(const std::vector<std::string>& xs) {
  if (xs.empty()) return "false";
  if (xs.size() == 1) return xs.front();
  std::string s = "(or";
  for (const auto& x : xs) s += " " + x;
  return s + ")";
}

inline std::string plus(const std::string& a, long long k) {
  return k == 0 ? a : "(+ " + a + " " + std::to_string(k) + ")";
}

}  // namespace smt_detail

/// Cell encoding used by the SMT document: y * width + x.
inline int smt_cell_id(const Workspace& ws, Cell c) { return c.y * ws.width() + c.x; }

/// Quantifier-free linear integer arithmetic encoding of the task-planning
/// model: state variables per action step, the action disjunction with its
/// frame rule, goal, deadlines, capacities, exclusions and the cost window.
inline std::string emit_smtlib(const TaskModel& model, int z, const ExclusionSet& excl, int cost_lo,
                               int cost_hi) {
  using namespace smt_detail;
  const Instance& inst = model.instance();
  const Workspace& ws = inst.workspace;
  const int nr = model.num_robots();
  const int nt = model.num_tasks();
  auto id = [&](Cell c) { return std::to_string(smt_cell_id(ws, c)); };

  std::ostringstream os;
  os << "(set-logic QF_LIA)\n";
  os << "(set-option :produce-models true)\n";
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j <= z; ++j)
      for (const char* v : {"pos", "ptime", "act", "cap"})
        os << "(declare-fun " << var(v, i, j) << " () Int)\n";
  for (int m = 0; m < nt; ++m)
    for (int j = 0; j <= z; ++j)
      for (const char* v : {"tloc", "ttime", "carr"})
        os << "(declare-fun " << var(v, m, j) << " () Int)\n";
  os << "(declare-fun cost () Int)\n";

  // initial state
  for (int i = 0; i < nr; ++i)
    os << "(assert " << conj({eq(var("pos", i, 0), id(inst.robots[i].start)), eq(var("ptime", i, 0), "0"),
                              eq(var("act", i, 0), num(-1)),
                              eq(var("cap", i, 0), num(inst.robots[i].capacity))})
       << ")\n";
  for (int m = 0; m < nt; ++m)
    os << "(assert " << conj({eq(var("tloc", m, 0), id(inst.tasks[m].pickup)), eq(var("ttime", m, 0), "0"),
                              eq(var("carr", m, 0), num(-1))})
       << ")\n";

  // locations a robot can occupy between action steps
  std::vector<Cell> loc;
  for (const auto& t : inst.tasks) {
    loc.push_back(t.pickup);
    loc.push_back(t.drop);
  }
  for (Cell n : model.intermediates()) loc.push_back(n);

  for (int j = 1; j <= z; ++j) {
    for (int i = 0; i < nr; ++i) {
      const std::string pos0 = var("pos", i, j - 1), pos1 = var("pos", i, j);
      const std::string pt0 = var("ptime", i, j - 1), pt1 = var("ptime", i, j);
      const std::string act1 = var("act", i, j);
      const std::string cap0 = var("cap", i, j - 1), cap1 = var("cap", i, j);
      const Cell base = inst.robots[i].start;

      std::vector<std::string> options;
      options.push_back(conj({eq(pos1, pos0), eq(act1, num(-1)), eq(pt1, pt0), eq(cap1, cap0)}));

      std::vector<Cell> from = {base};
      for (Cell c : loc)
        if (std::find(from.begin(), from.end(), c) == from.end()) from.push_back(c);
      // a robot only ever stands on its own base, never another robot's
      for (Cell k : from) {
        std::vector<std::string> moves;
        const int dret = model.dist(k, base);
        if (dret >= 0) {
          std::vector<std::string> parts = {eq(pos1, id(base)), eq(act1, num(-1)),
                                            eq(pt1, plus(pt0, dret)), eq(cap1, cap0)};
          for (int m = 0; m < nt; ++m) parts.push_back("(distinct " + var("carr", m, j - 1) + " " + std::to_string(i) + ")");
          moves.push_back(conj(parts));
        }
        for (int m = 0; m < nt; ++m) {
          const Task& t = inst.tasks[m];
          const std::string tl0 = var("tloc", m, j - 1), tl1 = var("tloc", m, j);
          const std::string tt0 = var("ttime", m, j - 1), tt1 = var("ttime", m, j);
          const std::string cr0 = var("carr", m, j - 1), cr1 = var("carr", m, j);
          const std::string w = std::to_string(t.weight);
          const std::string me = std::to_string(i);
          // pick
          if (int d = model.dist(k, t.pickup); d >= 0) {
            std::vector<std::string> parts = {eq(tl0, id(t.pickup))};
            if (t.pickup == t.drop) parts.push_back(eq(tt0, "0"));
            parts.insert(parts.end(), {"(>= " + cap0 + " " + w + ")", eq(cap1, "(- " + cap0 + " " + w + ")"),
                                       eq(pos1, id(t.pickup)), eq(cr1, me), eq(pt1, plus(pt0, d + 1)),
                                       eq(tl1, num(-1)), eq(tt1, num(-1)), eq(act1, std::to_string(m))});
            moves.push_back(conj(parts));
          }
          // drop
          if (int d = model.dist(k, t.drop); d >= 0) {
            moves.push_back(conj({eq(cr0, me), eq(pos1, id(t.drop)), eq(cr1, num(-1)), eq(pt1, plus(pt0, d + 1)),
                                  eq(tl1, id(t.drop)), eq(tt1, pt1), eq(act1, std::to_string(m)),
                                  eq(cap1, "(+ " + cap0 + " " + w + ")")}));
          }
          for (Cell n : model.intermediates()) {
            const int d = model.dist(k, n);
            if (d < 0) continue;
            // drop_intermediate
            std::vector<std::string> parts = {eq(cr0, me)};
            for (int o = 0; o < nt; ++o) {
              if (o == m) continue;
              parts.push_back("(distinct " + var("tloc", o, j - 1) + " " + id(n) + ")");
              parts.push_back("(distinct " + var("tloc", o, j) + " " + id(n) + ")");
            }
            parts.insert(parts.end(), {eq(pos1, id(n)), eq(cr1, num(-1)), eq(pt1, plus(pt0, d + 1)), eq(tl1, id(n)),
                                       eq(tt1, pt1), eq(act1, std::to_string(m)),
                                       eq(cap1, "(+ " + cap0 + " " + w + ")")});
            moves.push_back(conj(parts));
            // pick_intermediate (object already waiting) and wait_intermediate
            const std::string handover =
                d == 0 ? "(ite (= " + tt0 + " " + pt0 + ") " + plus(tt0, 1) + " " + plus(tt0, 2) + ")"
                       : plus(tt0, 2);
            const std::string arrival = plus(pt0, d + 1);
            std::vector<std::string> common = {eq(tl0, id(n)),
                                               "(>= " + cap0 + " " + w + ")",
                                               eq(cap1, "(- " + cap0 + " " + w + ")"),
                                               eq(pos1, id(n)),
                                               eq(cr1, me),
                                               eq(tl1, num(-1)),
                                               eq(tt1, num(-1)),
                                               eq(act1, std::to_string(m))};
            auto now = common;
            now.push_back("(<= " + handover + " " + arrival + ")");
            now.push_back(eq(pt1, arrival));
            moves.push_back(conj(now));
            auto wait = common;
            wait.push_back("(> " + handover + " " + arrival + ")");
            wait.push_back(eq(pt1, handover));
            moves.push_back(conj(wait));
          }
        }
        if (!moves.empty()) options.push_back(conj({eq(pos0, id(k)), disj(moves)}));
      }
      os << "(assert " << disj(options) << ")\n";
    }
    // objects move only when acted upon
    for (int m = 0; m < nt; ++m) {
      std::vector<std::string> idle;
      for (int i = 0; i < nr; ++i) idle.push_back("(distinct " + var("act", i, j) + " " + std::to_string(m) + ")");
      os << "(assert (=> " << conj(idle) << " "
         << conj({eq(var("tloc", m, j), var("tloc", m, j - 1)), eq(var("ttime", m, j), var("ttime", m, j - 1)),
                  eq(var("carr", m, j), var("carr", m, j - 1))})
         << "))\n";
    }
  }

  // goal
  for (int m = 0; m < nt; ++m) {
    const Task& t = inst.tasks[m];
    std::vector<std::string> parts = {eq(var("tloc", m, z), id(t.drop))};
    if (t.pickup == t.drop) parts.push_back("(distinct " + var("ttime", m, z) + " 0)");
    if (t.deadline) parts.push_back("(<= " + var("ttime", m, z) + " " + std::to_string(*t.deadline) + ")");
    os << "(assert " << conj(parts) << ")\n";
  }
  for (int i = 0; i < nr; ++i) os << "(assert " << eq(var("pos", i, z), id(inst.robots[i].start)) << ")\n";

  // exclusions
  for (const PosMatrix& p : excl) {
    if (p.robots != nr || p.steps != z) continue;
    std::vector<std::string> diff;
    for (int i = 0; i < nr; ++i)
      for (int j = 1; j <= z; ++j) diff.push_back("(distinct " + var("pos", i, j) + " " + id(p.at(i, j)) + ")");
    os << "(assert " << disj(diff) << ")\n";
  }

  // objective
  if (inst.objective == Objective::Makespan) {
    std::vector<std::string> ge, pick;
    for (int i = 0; i < nr; ++i) {
      ge.push_back("(>= cost " + var("ptime", i, z) + ")");
      pick.push_back(eq("cost", var("ptime", i, z)));
    }
    if (nr == 0) ge.push_back(eq("cost", "0"));
    os << "(assert " << conj(ge) << ")\n";
    if (nr > 0) os << "(assert " << disj(pick) << ")\n";
  } else {
    std::string sum = nr == 0 ? "0" : var("ptime", 0, z);
    if (nr > 1) {
      sum = "(+";
      for (int i = 0; i < nr; ++i) sum += " " + var("ptime", i, z);
      sum += ")";
    }
    os << "(assert " << eq("cost", sum) << ")\n";
  }
  os << "(assert (>= cost " << num(cost_lo) << "))\n";
  os << "(assert (<= cost " << num(cost_hi) << "))\n";
  os << "(check-sat)\n";
  os << "(get-value (";
  bool first = true;
  auto emit = [&](const std::string& v) {
    os << (first ? "" : " ") << v;
    first = false;
  };
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j <= z; ++j)
      for (const char* v : {"pos", "ptime", "act", "cap"}) emit(var(v, i, j));
  for (int m = 0; m < nt; ++m)
    for (int j = 0; j <= z; ++j)
      for (const char* v : {"tloc", "ttime", "carr"}) emit(var(v, m, j));
  emit("cost");
  os << "))\n";
  return os.str();
}

struct SmtAnswer {
  enum class Verdict { Sat, Unsat, Unknown } verdict = Verdict::Unknown;
  std::map<std::string, long long> values;
};

/// Parses `sat`/`unsat` followed by an optional `(get-value ...)` response.
inline SmtAnswer parse_smt_answer(const std::string& text) {
  SmtAnswer ans;
  std::size_t p = 0;
  auto skip_ws = [&] {
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
  };
  auto atom = [&] {
    skip_ws();
    std::size_t s = p;
    while (p < text.size() && !std::isspace(static_cast<unsigned char>(text[p])) && text[p] != '(' &&
           text[p] != ')')
      ++p;
    return text.substr(s, p - s);
  };
  skip_ws();
  const std::string head = atom();
  if (head == "sat") ans.verdict = SmtAnswer::Verdict::Sat;
  else if (head == "unsat") ans.verdict = SmtAnswer::Verdict::Unsat;
  else return ans;
  if (ans.verdict != SmtAnswer::Verdict::Sat) return ans;

  auto expect = [&](char c) {
    skip_ws();
    if (p >= text.size() || text[p] != c)
      throw std::runtime_error(std::string("malformed solver model: expected '") + c + "'");
    ++p;
  };
  auto value = [&]() -> long long {
    skip_ws();
    if (p < text.size() && text[p] == '(') {
      ++p;
      const std::string op = atom();
      if (op != "-") throw std::runtime_error("malformed solver value");
      const long long v = std::stoll(atom());
      expect(')');
      return -v;
    }
    return std::stoll(atom());
  };
  skip_ws();
  if (p >= text.size()) return ans;
  expect('(');
  for (;;) {
    skip_ws();
    if (p < text.size() && text[p] == ')') {
      ++p;
      break;
    }
    expect('(');
    const std::string name = atom();
    ans.values[name] = value();
    expect(')');
  }
  return ans;
}

/// Rebuilds the joint action sequence encoded by a model and replays it
/// through the native transition rules. Throws if the model's clocks
/// disagree with the replay.
inline TaskAssignment decode_smt_model(const TaskModel& model, int z, const SmtAnswer& ans) {
  using smt_detail::var;
  const Instance& inst = model.instance();
  const Workspace& ws = inst.workspace;
  auto get = [&](const std::string& name) {
    auto it = ans.values.find(name);
    if (it == ans.values.end()) throw std::runtime_error("solver model lacks " + name);
    return it->second;
  };
  auto cell = [&](long long idv) { return Cell{static_cast<int>(idv % ws.width()), static_cast<int>(idv / ws.width())}; };

  std::vector<std::vector<Action>> steps(z, std::vector<Action>(model.num_robots()));
  for (int j = 1; j <= z; ++j) {
    for (int i = 0; i < model.num_robots(); ++i) {
      const long long act = get(var("act", i, j));
      const Cell p0 = cell(get(var("pos", i, j - 1)));
      const Cell p1 = cell(get(var("pos", i, j)));
      Action a;
      if (act < 0) {
        a = p0 != p1 ? Action{ActionKind::Return, kNone, p1} : Action{ActionKind::Stay, kNone, p1};
      } else {
        const int m = static_cast<int>(act);
        const Task& t = inst.tasks.at(m);
        if (get(var("carr", m, j - 1)) == i) {
          const bool final_drop = get(var("tloc", m, j)) == smt_cell_id(ws, t.drop);
          a = {final_drop ? ActionKind::Drop : ActionKind::DropIntermediate, m, p1};
        } else {
          const Cell from = cell(get(var("tloc", m, j - 1)));
          a = {ws.is_intermediate(from) ? ActionKind::PickIntermediate : ActionKind::Pick, m, p1};
        }
      }
      steps[j - 1][i] = a;
    }
  }
  auto assignment = make_assignment(model, steps);
  if (!assignment) throw std::runtime_error("solver model does not replay to a goal state");
  for (int i = 0; i < model.num_robots(); ++i)
    for (int j = 1; j <= z; ++j)
      if (assignment->robots[i][j - 1].time != get(var("ptime", i, j)))
        throw std::runtime_error("solver clock disagrees with native replay at " + var("ptime", i, j));
  if (assignment->cost != get("cost")) throw std::runtime_error("solver cost disagrees with native replay");
  return *assignment;
}

/// Runs `command <file>` on the document and returns stdout.
inline std::string run_smt_solver(const std::string& command, const std::string& document) {
  namespace fs = std::filesystem;
  static std::mt19937_64 salt(std::random_device{}());
  const fs::path file = fs::temp_directory_path() / ("mapd_" + std::to_string(salt()) + ".smt2");
  {
    std::ofstream out(file);
    out << document;
  }
  const std::string cmd = command + " '" + file.string() + "' 2>&1";
  std::string output;
  if (FILE* pipe = popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    pclose(pipe);
  } else {
    fs::remove(file);
    throw std::runtime_error("cannot launch solver: " + command);
  }
  fs::remove(file);
  return output;
}

/// Decision procedure backed by an external SMT-LIB2 solver.
inline DecisionResult smt_decision(const TaskModel& model, int z, const ExclusionSet& excl, int lo, int hi,
                                   const std::string& solver_command, Deadline deadline = Deadline::never()) {
  DecisionResult res;
  if (deadline.expired()) {
    res.status = DecisionStatus::Timeout;
    return res;
  }
  const std::string out = run_smt_solver(solver_command, emit_smtlib(model, z, excl, lo, hi));
  SmtAnswer ans = parse_smt_answer(out);
  switch (ans.verdict) {
    case SmtAnswer::Verdict::Unsat: res.status = DecisionStatus::Unsat; break;
    case SmtAnswer::Verdict::Sat:
      res.status = DecisionStatus::Sat;
      res.assignment = decode_smt_model(model, z, ans);
      break;
    case SmtAnswer::Verdict::Unknown:
      if (deadline.expired()) {
        res.status = DecisionStatus::Timeout;
        break;
      }
      throw std::runtime_error("solver gave no verdict: " + out.substr(0, 200));
  }
  return res;
}

}  // namespace mapd
