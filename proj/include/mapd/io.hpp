#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapd/integrated.hpp"

namespace mapd {

using ordered_json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
}

namespace io_detail {

inline Cell cell_from(const ordered_json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw IoError(what + " must be an [x, y] pair");
  return {j[0].get<int>(), j[1].get<int>()};
}

inline ordered_json cell_to(Cell c) { return ordered_json::array({c.x, c.y}); }

}  // namespace io_detail

/// Parses an instance document. `map` is either an array of row strings or a
/// path, resolved against `base_dir` when relative.
inline Instance instance_from_json(const ordered_json& j, const std::filesystem::path& base_dir = {}) {
  using io_detail::cell_from;
  if (!j.is_object()) throw IoError("instance must be a JSON object");
  Instance inst;
  if (!j.contains("map")) throw IoError("instance lacks 'map'");
  const auto& m = j.at("map");
  if (m.is_array()) {
    std::string text;
    for (const auto& row : m) {
      if (!row.is_string()) throw IoError("map rows must be strings");
      text += row.get<std::string>() + "\n";
    }
    inst.workspace = parse_map(text);
  } else if (m.is_string()) {
    std::filesystem::path p = m.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    inst.workspace = parse_map(read_file(p));
  } else {
    throw IoError("'map' must be a path or a list of rows");
  }
  for (const auto& r : j.value("robots", ordered_json::array())) {
    Robot robot;
    robot.id = r.at("id").get<int>();
    robot.start = cell_from(r.at("start"), "robot start");
    robot.capacity = r.value("capacity", 1);
    inst.robots.push_back(robot);
  }
  for (const auto& t : j.value("tasks", ordered_json::array())) {
    Task task;
    task.id = t.at("id").get<int>();
    task.pickup = cell_from(t.at("pickup"), "task pickup");
    task.drop = cell_from(t.at("drop"), "task drop");
    task.weight = t.value("weight", 1);
    if (t.contains("deadline") && !t.at("deadline").is_null()) task.deadline = t.at("deadline").get<int>();
    inst.tasks.push_back(task);
  }
  inst.objective = parse_objective(j.value("objective", std::string("makespan")));
  inst.z = j.value("z", 0);
  inst.timeout_s = j.value("timeout_s", kDefaultTimeoutSeconds);
  inst.allow_degenerate = j.value("allow_degenerate", false);
  return inst;
}

inline Instance load_instance(const std::filesystem::path& p) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(p.string() + ": " + e.what());
  }
  try {
    return instance_from_json(j, p.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(p.string() + ": " + e.what());
  }
}

/// Canonical document: inline map rows, fixed key order.
inline ordered_json instance_to_json(const Instance& inst) {
  using io_detail::cell_to;
  ordered_json j;
  ordered_json rows = ordered_json::array();
  std::istringstream text(inst.workspace.to_text());
  for (std::string line; std::getline(text, line);) rows.push_back(line);
  j["map"] = rows;
  j["robots"] = ordered_json::array();
  for (const auto& r : inst.robots)
    j["robots"].push_back({{"id", r.id}, {"start", cell_to(r.start)}, {"capacity", r.capacity}});
  j["tasks"] = ordered_json::array();
  for (const auto& t : inst.tasks) {
    ordered_json o{{"id", t.id}, {"pickup", cell_to(t.pickup)}, {"drop", cell_to(t.drop)}, {"weight", t.weight}};
    if (t.deadline) o["deadline"] = *t.deadline;
    j["tasks"].push_back(o);
  }
  j["objective"] = to_string(inst.objective);
  if (inst.z > 0) j["z"] = inst.z;
  if (inst.timeout_s != kDefaultTimeoutSeconds) j["timeout_s"] = inst.timeout_s;
  if (inst.allow_degenerate) j["allow_degenerate"] = true;
  return j;
}

inline std::string dump_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

inline ordered_json log_to_json(const Instance& inst, const SolveResult& r) {
  ordered_json j;
  j["objective"] = to_string(inst.objective);
  j["z"] = r.z;
  j["status"] = to_string(r.status);
  j["cost"] = r.cost == kNoPlanCost ? ordered_json(nullptr) : ordered_json(r.cost);
  j["iterations"] = ordered_json::array();
  for (const auto& it : r.log) {
    ordered_json rec;
    rec["task_cost"] = it.task_cost;
    rec["plan_cost"] = it.plan_cost == kNoPlanCost ? ordered_json(nullptr) : ordered_json(it.plan_cost);
    rec["path_status"] = to_string(it.path_status);
    ordered_json fp = ordered_json::array();
    for (int i = 0; i < it.fingerprint.robots; ++i) {
      ordered_json row = ordered_json::array();
      for (int s = 1; s <= it.fingerprint.steps; ++s) row.push_back(io_detail::cell_to(it.fingerprint.at(i, s)));
      fp.push_back(row);
    }
    rec["fingerprint"] = fp;
    rec["assignment"] = it.assignment;
    j["iterations"].push_back(rec);
  }
  return j;
}

struct LoadedLog {
  int z = 0;
  std::optional<int> cost;
  std::string status;
  std::vector<IterationRecord> records;
};

inline LoadedLog log_from_json(const ordered_json& j) {
  LoadedLog out;
  out.z = j.at("z").get<int>();
  out.status = j.value("status", std::string());
  if (!j.at("cost").is_null()) out.cost = j.at("cost").get<int>();
  for (const auto& rec : j.at("iterations")) {
    IterationRecord r;
    r.task_cost = rec.at("task_cost").get<int>();
    r.plan_cost = rec.at("plan_cost").is_null() ? kNoPlanCost : rec.at("plan_cost").get<int>();
    const auto ps = rec.value("path_status", std::string("infeasible"));
    r.path_status = ps == "solved" ? PathStatus::Solved : ps == "timeout" ? PathStatus::Timeout : PathStatus::Infeasible;
    const auto& fp = rec.at("fingerprint");
    const int robots = static_cast<int>(fp.size());
    const int steps = robots ? static_cast<int>(fp[0].size()) : 0;
    r.fingerprint = PosMatrix(robots, steps);
    for (int i = 0; i < robots; ++i)
      for (int s = 1; s <= steps; ++s) r.fingerprint.at(i, s) = io_detail::cell_from(fp[i][s - 1], "fingerprint cell");
    r.assignment = rec.value("assignment", std::string());
    out.records.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

enum class MapStyle { Random, Warehouse };

inline MapStyle parse_map_style(const std::string& s) {
  if (s == "random") return MapStyle::Random;
  if (s == "warehouse") return MapStyle::Warehouse;
  throw std::invalid_argument("unknown map style '" + s + "'");
}

struct GenParams {
  std::uint64_t seed = 1;
  int width = 10;
  int height = 10;
  double obstacle_density = 0.1;
  int robots = 2;
  int tasks = 2;
  int intermediates = 0;
  MapStyle style = MapStyle::Random;
  int capacity = 1;
  Objective objective = Objective::Makespan;
  int max_attempts = 1000;
};

/// Uniform integer in [0, n) from a 64-bit engine, identical on every platform.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do v = rng();
  while (v >= limit);
  return v % n;
}

/// Shelf blocks two rows tall and five columns wide, separated by one-cell
/// aisles, with a free border.
inline Workspace warehouse_map(int width, int height) {
  Workspace ws(width, height);
  for (int y = 1; y < height - 1; ++y)
    for (int x = 1; x < width - 1; ++x)
      if (y % 3 != 0 && x % 6 != 0) ws.set_obstacle({x, y});
  return ws;
}

/// Every robot can reach every point of interest while the other robots sit
/// on their bases, so robots can always take turns.
inline bool bases_non_blocking(const Instance& inst) {
  for (std::size_t i = 0; i < inst.robots.size(); ++i) {
    Workspace ws = inst.workspace;
    for (std::size_t k = 0; k < inst.robots.size(); ++k)
      if (k != i) ws.set_obstacle(inst.robots[k].start);
    auto field = distance_field(ws, inst.robots[i].start);
    for (Cell c : points_of_interest(inst)) {
      bool other_base = false;
      for (std::size_t k = 0; k < inst.robots.size(); ++k) other_base = other_base || (k != i && inst.robots[k].start == c);
      if (!other_base && field[ws.index(c)] < 0) return false;
    }
  }
  return true;
}

inline Instance generate_random_instance(const GenParams& p) {
  if (p.obstacle_density < 0 || p.obstacle_density >= 1) throw std::invalid_argument("obstacle density must be in [0, 1)");
  if (p.width <= 0 || p.height <= 0) throw std::invalid_argument("map must have positive area");
  if (p.robots < 1) throw std::invalid_argument("at least one robot is required");
  const int needed = p.robots + 2 * p.tasks + p.intermediates;
  if (needed > p.width * p.height) throw std::invalid_argument("not enough cells for all placements");

  std::mt19937_64 rng(p.seed);
  for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
    Workspace ws = p.style == MapStyle::Warehouse ? warehouse_map(p.width, p.height) : Workspace(p.width, p.height);
    if (p.style == MapStyle::Random) {
      const std::uint64_t scale = 1000000;
      const auto threshold = static_cast<std::uint64_t>(std::llround(p.obstacle_density * scale));
      for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
          if (uniform_below(rng, scale) < threshold) ws.set_obstacle({x, y});
    }
    std::vector<Cell> free;
    for (int y = 0; y < p.height; ++y)
      for (int x = 0; x < p.width; ++x)
        if (ws.is_free({x, y})) free.push_back({x, y});
    if (static_cast<int>(free.size()) < needed) continue;
    // partial Fisher-Yates
    for (int k = 0; k < needed; ++k) {
      const auto r = k + static_cast<int>(uniform_below(rng, free.size() - k));
      std::swap(free[k], free[r]);
    }
    Instance inst;
    int next = 0;
    for (int i = 0; i < p.robots; ++i) inst.robots.push_back({i, free[next++], p.capacity});
    for (int m = 0; m < p.tasks; ++m) {
      Task t;
      t.id = m;
      t.pickup = free[next++];
      t.drop = free[next++];
      inst.tasks.push_back(t);
    }
    for (int k = 0; k < p.intermediates; ++k) ws.set_intermediate(free[next++]);
    inst.workspace = std::move(ws);
    inst.objective = p.objective;

    const auto pois = points_of_interest(inst);
    auto field = distance_field(inst.workspace, pois.front());
    bool connected = true;
    for (Cell c : pois) connected = connected && field[inst.workspace.index(c)] >= 0;
    if (!connected || !bases_non_blocking(inst) || !validate_instance(inst).empty()) continue;
    return inst;
  }
  throw std::runtime_error("could not place robots and tasks after " + std::to_string(p.max_attempts) + " attempts");
}

// ---------------------------------------------------------------------------
// Benchmark harness

struct BenchConfig {
  std::string name;
  GenParams gen;
  int z_offset = 0;  // added to min_feasible_z
  Objective objective = Objective::Makespan;
};

struct BenchRun {
  std::string config;
  std::uint64_t seed = 0;
  std::string status;
  double time_s = 0;
  std::optional<int> makespan;
  std::optional<int> total_cost;
};

struct BenchSummary {
  std::string config;
  int runs = 0;
  int solved = 0;
  double success = 0;
  double time_mean = 0, time_std = 0;
  double makespan_mean = 0, makespan_std = 0;
  double total_cost_mean = 0, total_cost_std = 0;
  double timeout_s = 0;
};

struct BenchReport {
  double timeout_s = 0;
  std::vector<BenchRun> runs;
  std::vector<BenchSummary> summaries;
};

struct BenchSpec {
  double timeout_s = kDefaultTimeoutSeconds;
  std::vector<std::uint64_t> seeds;
  std::vector<BenchConfig> configs;
};

inline BenchSpec bench_spec_from_json(const ordered_json& j) {
  BenchSpec spec;
  spec.timeout_s = j.value("timeout_s", kDefaultTimeoutSeconds);
  const auto& seeds = j.at("seeds");
  if (seeds.is_number_integer()) {
    for (int s = 1; s <= seeds.get<int>(); ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    for (const auto& s : seeds) spec.seeds.push_back(s.get<std::uint64_t>());
  }
  for (const auto& c : j.at("configs")) {
    BenchConfig bc;
    bc.name = c.at("name").get<std::string>();
    bc.gen.width = c.value("width", 10);
    bc.gen.height = c.value("height", bc.gen.width);
    bc.gen.obstacle_density = c.value("density", 0.1);
    bc.gen.robots = c.value("robots", 2);
    bc.gen.tasks = c.value("tasks", 2);
    bc.gen.intermediates = c.value("intermediates", 0);
    bc.gen.style = parse_map_style(c.value("style", std::string("random")));
    bc.gen.capacity = c.value("capacity", 1);
    bc.z_offset = c.value("z_offset", 0);
    bc.objective = parse_objective(c.value("objective", std::string("makespan")));
    spec.configs.push_back(bc);
  }
  return spec;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double std_of(const std::vector<double>& v) {
  if (v.empty()) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

/// Failed runs count as `timeout_s` seconds; metric means cover solved runs only.
inline BenchSummary summarize(const std::string& name, const std::vector<BenchRun>& runs, double timeout_s) {
  BenchSummary s;
  s.config = name;
  s.timeout_s = timeout_s;
  std::vector<double> times, ms, tc;
  for (const auto& r : runs) {
    if (r.config != name) continue;
    ++s.runs;
    const bool ok = r.status == "optimal";
    if (ok) {
      ++s.solved;
      times.push_back(r.time_s);
      if (r.makespan) ms.push_back(*r.makespan);
      if (r.total_cost) tc.push_back(*r.total_cost);
    } else {
      times.push_back(timeout_s);
    }
  }
  s.success = s.runs ? static_cast<double>(s.solved) / s.runs : 0;
  s.time_mean = mean_of(times);
  s.time_std = std_of(times);
  s.makespan_mean = mean_of(ms);
  s.makespan_std = std_of(ms);
  s.total_cost_mean = mean_of(tc);
  s.total_cost_std = std_of(tc);
  return s;
}

template <typename Solver>
BenchReport run_benchmark(const BenchSpec& spec, Solver&& solve) {
  BenchReport rep;
  rep.timeout_s = spec.timeout_s;
  for (const auto& c : spec.configs) {
    for (std::uint64_t seed : spec.seeds) {
      BenchRun run;
      run.config = c.name;
      run.seed = seed;
      try {
        GenParams g = c.gen;
        g.seed = seed;
        g.objective = c.objective;
        Instance inst = generate_random_instance(g);
        inst.z = min_feasible_z(static_cast<int>(inst.tasks.size()), static_cast<int>(inst.robots.size())) + c.z_offset;
        inst.timeout_s = spec.timeout_s;
        SolveResult r = solve(inst);
        run.status = to_string(r.status);
        run.time_s = r.elapsed_s;
        if (r.plan && r.status == SolveStatus::Optimal) {
          run.makespan = r.plan->makespan;
          run.total_cost = r.plan->total_cost;
        }
      } catch (const std::exception&) {
        run.status = "error";
      }
      rep.runs.push_back(run);
    }
    rep.summaries.push_back(summarize(c.name, rep.runs, spec.timeout_s));
  }
  return rep;
}

inline BenchReport run_benchmark(const BenchSpec& spec) {
  return run_benchmark(spec, [](const Instance& inst) { return integrated_planner(inst); });
}

inline std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

/// `config,seed,status,time_s,makespan,total_cost`; unsolved metrics are empty.
inline std::string bench_csv(const BenchReport& rep) {
  std::string out = "config,seed,status,time_s,makespan,total_cost\n";
  for (const auto& r : rep.runs) {
    out += r.config + "," + std::to_string(r.seed) + "," + r.status + "," + fixed(r.time_s, 3) + "," +
           (r.makespan ? std::to_string(*r.makespan) : "") + "," + (r.total_cost ? std::to_string(*r.total_cost) : "") +
           "\n";
  }
  return out;
}

inline std::string bench_table(const BenchReport& rep) {
  std::ostringstream os;
  os << "config          runs  success  time_s (mean+-std)   makespan (mean+-std)  total_cost (mean+-std)\n";
  for (const auto& s : rep.summaries) {
    os << std::left << std::setw(16) << s.config << std::right << std::setw(4) << s.runs << "  " << std::setw(7)
       << fixed(s.success, 2) << "  " << std::setw(9) << fixed(s.time_mean, 3) << " +- " << std::setw(8)
       << fixed(s.time_std, 3) << "  " << std::setw(8) << fixed(s.makespan_mean, 2) << " +- " << std::setw(8)
       << fixed(s.makespan_std, 2) << "  " << std::setw(8) << fixed(s.total_cost_mean, 2) << " +- " << std::setw(8)
       << fixed(s.total_cost_std, 2) << "\n";
  }
  os << "timeout " << fixed(rep.timeout_s, 1) << " s; failed runs count as the timeout\n";
  return os.str();
}

}  // namespace mapd
