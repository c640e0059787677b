#include <gtest/gtest.h>

#include <climits>

#include "oracles.hpp"

using namespace mapd;

namespace {

Instance strip() {
  Instance inst;
  inst.workspace = Workspace(1, 5);
  inst.robots = {{0, {0, 0}, 1}};
  inst.tasks = {{0, {0, 1}, {0, 3}, 1, std::nullopt}};
  inst.z = 3;
  return inst;
}

Instance floor_8x7(bool with_intermediate, Objective obj) {
  Instance inst;
  inst.workspace = Workspace(8, 7);
  if (with_intermediate) inst.workspace.set_intermediate({4, 4});
  inst.robots = {{0, {0, 0}, 1}, {1, {7, 3}, 1}};
  inst.tasks = {{0, {0, 1}, {7, 6}, 1, std::nullopt}, {1, {1, 6}, {0, 3}, 1, std::nullopt}};
  inst.objective = obj;
  inst.z = 5;
  return inst;
}

Instance small_random(std::uint64_t seed, Objective obj) {
  GenParams p;
  p.seed = seed;
  p.width = 5;
  p.height = 5;
  p.obstacle_density = 0.15;
  p.robots = 1 + static_cast<int>(seed % 2);
  p.tasks = 2;
  p.intermediates = static_cast<int>(seed % 3 == 1);
  p.objective = obj;
  return generate_random_instance(p);
}

// Pretends every assignment is realizable at its task-level cost plus `extra`.
struct FixedCostPlanner {
  int extra = 0;
  int* calls = nullptr;
  PathResult operator()(const TaskAssignment& a, const CompiledGoals& goals, Deadline) const {
    if (calls) ++*calls;
    PathResult r;
    r.status = PathStatus::Solved;
    Plan p;
    p.goals = goals;
    p.makespan = a.cost + extra;
    p.total_cost = a.cost + extra;
    r.plan = p;
    return r;
  }
};

}  // namespace

TEST(Integrated, TightPlannerNeedsOneRound) {
  const Instance inst = floor_8x7(true, Objective::Makespan);
  int calls = 0;
  auto res = integrated_planner(inst, {}, FixedCostPlanner{0, &calls});
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(res.task_planner_calls, 1);
  EXPECT_EQ(res.log.size(), 1u);
  const TaskModel model(inst);
  EXPECT_EQ(res.cost, task_planner(model, 5, {}, 0, INT_MAX).assignment->cost);
}

TEST(Integrated, LooseningPlannerStillConverges) {
  const Instance inst = small_random(4, Objective::TotalCost);
  const int z = effective_z(inst);
  auto res = integrated_planner(inst, {}, FixedCostPlanner{2, nullptr});
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  const TaskModel model(inst);
  EXPECT_EQ(res.cost, *oracle::min_assignment_cost(model, z) + 2);
  EXPECT_TRUE(audit_log(inst, z, res.log, res.cost).ok());
}

TEST(Integrated, StripEndToEnd) {
  const Instance inst = strip();
  auto res = integrated_planner(inst);
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  EXPECT_EQ(res.cost, 8);
  EXPECT_EQ(res.z, 3);
  EXPECT_EQ(res.path_planner_calls, 1);
  EXPECT_TRUE(validate_plan(inst, *res.plan).empty());
}

TEST(Integrated, NoRealizableAssignment) {
  const Instance inst = strip();
  auto res = integrated_planner(inst, {}, [](const TaskAssignment&, const CompiledGoals&, Deadline) {
    return PathResult{};
  });
  EXPECT_EQ(res.status, SolveStatus::Infeasible);
  EXPECT_EQ(res.cost, kNoPlanCost);
  EXPECT_FALSE(res.plan);
  EXPECT_EQ(res.log.size(), 1u);
}

TEST(Integrated, ZeroTimeout) {
  const Instance inst = floor_8x7(true, Objective::Makespan);
  IntegratedConfig cfg;
  cfg.timeout_s = 0;
  auto res = integrated_planner(inst, cfg);
  EXPECT_EQ(res.status, SolveStatus::TimeoutNoPlan);
  EXPECT_STREQ(to_string(res.status), "timeout");
}

TEST(Integrated, BackendSpecParsing) {
  EXPECT_TRUE(Backend::parse("native").native());
  EXPECT_EQ(Backend::parse("smtlib:z3 -smt2").solver_command(), "z3 -smt2");
  EXPECT_THROW(Backend::parse("smtlib:"), std::invalid_argument);
  EXPECT_THROW(Backend::parse("cplex"), std::invalid_argument);
}

TEST(Integrated, SmtBackendAgrees) {
  const std::string z3 = MAPD_Z3;
  if (z3.empty()) GTEST_SKIP() << "z3 not found at configure time";
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Instance inst = small_random(seed, Objective::Makespan);
    IntegratedConfig cfg;
    cfg.backend = Backend::parse("smtlib:" + z3);
    auto smt = integrated_planner(inst, cfg);
    auto native = integrated_planner(inst);
    SCOPED_TRACE("seed " + std::to_string(seed));
    ASSERT_EQ(smt.status, native.status);
    EXPECT_EQ(smt.cost, native.cost);
  }
}

// The integrated answer equals the best joint plan over every assignment.
TEST(Integrated, MatchesGlobalOptimum) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed)
    for (Objective obj : {Objective::Makespan, Objective::TotalCost}) {
      const Instance inst = small_random(seed, obj);
      const int z = effective_z(inst);
      auto res = integrated_planner(inst);
      const auto expected = oracle::global_optimum(inst, z);
      SCOPED_TRACE("seed " + std::to_string(seed) + " " + to_string(obj));
      ASSERT_EQ(res.status == SolveStatus::Optimal, expected.has_value());
      if (!expected) continue;
      EXPECT_EQ(res.cost, *expected);
      const auto diags = validate_plan(inst, *res.plan);
      EXPECT_TRUE(diags.empty()) << diags.front();
      const auto audit = audit_log(inst, z, res.log, res.cost);
      EXPECT_TRUE(audit.ok()) << audit.violations.front();
    }
}

TEST(Integrated, IntermediateCellNeverHurts) {
  for (Objective obj : {Objective::Makespan, Objective::TotalCost}) {
    auto with = integrated_planner(floor_8x7(true, obj));
    auto without = integrated_planner(floor_8x7(false, obj));
    ASSERT_EQ(with.status, SolveStatus::Optimal);
    ASSERT_EQ(without.status, SolveStatus::Optimal);
    EXPECT_LE(with.cost, without.cost) << to_string(obj);
  }
}

TEST(Audit, FlagsTamperedLogs) {
  const Instance inst = small_random(2, Objective::Makespan);
  const int z = effective_z(inst);
  auto res = integrated_planner(inst);
  ASSERT_EQ(res.status, SolveStatus::Optimal);
  ASSERT_TRUE(audit_log(inst, z, res.log, res.cost).ok());

  auto dup = res.log;
  dup.push_back(dup.front());
  EXPECT_FALSE(audit_log(inst, z, dup, res.cost).ok());

  auto cheap = res.log;
  cheap.front().plan_cost = cheap.front().task_cost - 1;
  EXPECT_FALSE(audit_log(inst, z, cheap, res.cost).ok());

  EXPECT_FALSE(audit_log(inst, z, res.log, res.cost + 1).ok());

  // Claiming a higher optimum with no probe to back it is caught by the
  // unprobed-assignment check.
  std::vector<IterationRecord> empty;
  IterationRecord fake{PosMatrix(1, 1), "", res.cost + 5, res.cost + 5, PathStatus::Solved};
  empty.push_back(fake);
  const auto rep = audit_log(inst, z, empty, res.cost + 5);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.violations.front().find("unprobed"), std::string::npos);
}
