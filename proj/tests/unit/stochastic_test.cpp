#include <gtest/gtest.h>

#include <cmath>

#include "scenario_fixtures.hpp"
#include "windflow/acopf/model.hpp"
#include "windflow/conic/solver.hpp"
#include "windflow/stochastic/two_stage.hpp"

namespace ws = windflow::stochastic;
namespace wa = windflow::acopf;
using windflow::testing::identical_scenarios;
using windflow::testing::load_fixture;
using windflow::testing::make_scenarios;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double deterministic(const windflow::grid::GridCase& c, const std::vector<wa::WindLimits>& wind) {
  const auto sol = windflow::conic::solve(wa::build_soc_acopf(c, {.wind = wind}).program);
  EXPECT_TRUE(sol.optimal());
  return sol.objective_value;
}

}  // namespace

TEST(TwoStage, OneScenarioEqualsDeterministicOpf) {
  for (const char* name : {"small_wind", "hybrid30"}) {
    const auto c = load_fixture(name);
    auto set = make_scenarios(c, std::vector<int>(c.wind_farms.size(), 3));
    // Keep the middle stratum only, as a certain scenario.
    auto one = windflow::wind::make_scenario_set(set.farm_ids, {{1.0, set.scenarios[4].farms}});
    const auto sol = ws::solve_single_stage(c, ws::build_two_stage(c, one));
    ASSERT_TRUE(sol.optimal());
    EXPECT_LE(rel(sol.objective, deterministic(c, ws::align_windows(c, one)[0])), 1e-6) << name;
  }
}

TEST(TwoStage, CaseWithoutWindFarms) {
  const auto c = load_fixture("ieee14");
  const auto sol = ws::solve_single_stage(c, ws::build_two_stage(c, identical_scenarios(c, {}, 1)));
  ASSERT_TRUE(sol.optimal());
  EXPECT_LE(rel(sol.objective, deterministic(c, {})), 1e-6);
}

TEST(TwoStage, ZeroWindMatchesNoWindOpf) {
  const auto c = load_fixture("small_wind");
  const std::vector<wa::WindLimits> none(c.wind_farms.size());
  const auto sol = ws::solve_single_stage(c, ws::build_two_stage(c, identical_scenarios(c, none, 4)));
  ASSERT_TRUE(sol.optimal());
  auto no_farms = c;
  no_farms.wind_farms.clear();
  EXPECT_LE(rel(sol.objective, deterministic(no_farms, {})), 1e-6);
}

TEST(TwoStage, EightyOneBlocksShareOneDispatch) {
  const auto c = load_fixture("hybrid30");
  const auto set = make_scenarios(c, {9, 9});
  const auto m = ws::build_two_stage(c, set);
  EXPECT_EQ(m.blocks.size(), 81u);
  int stage1 = 0;
  for (const auto& v : m.program.variables()) stage1 += v.name.rfind("p_gen:", 0) == 0 ? 1 : 0;
  EXPECT_EQ(stage1, static_cast<int>(c.generators.size()));
  // Every block's active balance at the generator buses references the same p_gen.
  EXPECT_TRUE(m.program.find_equality("p_bal:81:1").has_value());
  EXPECT_FALSE(m.program.find_equality("p_bal:82:1").has_value());
}

TEST(TwoStage, RejectsMismatchedFarms) {
  const auto c = load_fixture("small_wind");
  auto set = make_scenarios(c, {2, 2});
  set.farm_ids[1] = "nope";
  EXPECT_THROW((void)ws::build_two_stage(c, set), std::invalid_argument);
  EXPECT_THROW((void)ws::build_two_stage(c, identical_scenarios(load_fixture("two_bus"), {}, 1)), std::invalid_argument);
}

TEST(TwoStage, FarmOrderInTheFileDoesNotMatter) {
  const auto c = load_fixture("small_wind");
  const auto set = make_scenarios(c, {2, 3});
  auto swapped = set;
  std::swap(swapped.farm_ids[0], swapped.farm_ids[1]);
  for (auto& s : swapped.scenarios) std::swap(s.farms[0], s.farms[1]);
  const auto a = ws::solve_single_stage(c, ws::build_two_stage(c, set));
  const auto b = ws::solve_single_stage(c, ws::build_two_stage(c, swapped));
  EXPECT_LE(rel(a.objective, b.objective), 1e-7);
}

TEST(TwoStage, InfeasibleWithoutShedding) {
  auto c = load_fixture("small_wind");
  for (auto& b : c.buses) b.p_load *= 20.0;
  const auto set = make_scenarios(c, {2, 2});
  const auto sol = ws::solve_single_stage(c, ws::build_two_stage(c, set, {.shedding = false}));
  EXPECT_EQ(sol.status, windflow::conic::SolveStatus::Infeasible);
  const auto shed = ws::solve_single_stage(c, ws::build_two_stage(c, set));
  ASSERT_TRUE(shed.optimal());
  EXPECT_GT(shed.total_shed(), 0.0);
}

TEST(TwoStage, ObjectiveIsStageOnePlusExpectedRecourse) {
  for (const char* name : {"small_wind", "hybrid30", "hybrid30_tight"}) {
    const auto c = load_fixture(name);
    const auto sol = ws::solve_single_stage(c, ws::build_two_stage(c, make_scenarios(c, {3, 3})));
    ASSERT_TRUE(sol.optimal());
    double expected = ws::stage1_cost(c, sol.stage1);
    for (const auto& s : sol.scenarios) expected += s.pi * s.recourse_cost;
    EXPECT_LE(rel(sol.objective, expected), 1e-8) << name;
  }
}

TEST(TwoStage, DispatchIsFeasibleInEveryScenario) {
  const auto c = load_fixture("hybrid30");
  const auto set = make_scenarios(c, {3, 3});
  const auto sol = ws::solve_single_stage(c, ws::build_two_stage(c, set));
  ASSERT_TRUE(sol.optimal());
  const auto windows = ws::align_windows(c, set);
  for (const auto& w : windows) {
    auto m = wa::build_soc_acopf(c, {.shedding = true, .wind = w});
    for (std::size_t g = 0; g < c.generators.size(); ++g) m.program.set_bounds(m.p_gen[g], sol.stage1[g], sol.stage1[g]);
    const auto s = windflow::conic::solve(m.program);
    ASSERT_TRUE(s.optimal());
    EXPECT_LE(wa::shed_summary(wa::recover_physical(c, m, s)).p_shed, 1e-6);
  }
}

TEST(TwoStage, DoubledProbabilitiesRenormalizeToTheSameOptimum) {
  const auto c = load_fixture("small_wind");
  const auto set = make_scenarios(c, {3, 2});
  auto doubled = set;
  double total = 0.0;
  for (auto& s : doubled.scenarios) total += (s.pi *= 2.0);
  for (auto& s : doubled.scenarios) s.pi /= total;
  const auto a = ws::solve_single_stage(c, ws::build_two_stage(c, set));
  const auto b = ws::solve_single_stage(c, ws::build_two_stage(c, doubled));
  EXPECT_LE(rel(a.objective, b.objective), 1e-7);
}

TEST(ModelSize, FormulaArithmetic) {
  ws::SizeCounts n;
  n.J = 1;
  n.L = 1;
  n.G = 1;
  n.E = 0;
  n.I = 2;
  EXPECT_EQ(ws::formula_variables(n), 9);
}

TEST(ModelSize, LinearInScenarioCount) {
  const auto c = load_fixture("small_wind");
  const auto one = ws::model_size(c, ws::build_two_stage(c, make_scenarios(c, {1, 1})));
  const auto ten = ws::model_size(c, ws::build_two_stage(c, make_scenarios(c, {2, 5})));
  const long long G = static_cast<long long>(c.generators.size());
  EXPECT_EQ(ten.formula_variables - G, 10 * (one.formula_variables - G));
  EXPECT_EQ(ten.formula_constraints - 2 * G, 10 * (one.formula_constraints - 2 * G));
  EXPECT_EQ(ten.variables - G, 10 * (one.variables - G));
  EXPECT_EQ(ten.constraints(), 10 * one.constraints());
}

TEST(ModelSize, TenScenarioHybridCaseIsTheSameOrderAsFourThousand) {
  const auto c = load_fixture("hybrid30");
  const auto s = ws::model_size(c, ws::build_two_stage(c, make_scenarios(c, {2, 5})));
  EXPECT_EQ(s.counts.J, 10);
  EXPECT_GE(s.constraints(), 1000);
  EXPECT_LT(s.constraints(), 10000);
  EXPECT_GE(s.formula_constraints, 1000);
  EXPECT_LT(s.formula_constraints, 10000);
}

TEST(Vss, IdenticalScenariosHaveNoValue) {
  const auto c = load_fixture("small_wind");
  const auto base = make_scenarios(c, {3, 3});
  const auto v = ws::compute_vss(c, identical_scenarios(c, ws::align_windows(c, base)[5], 4));
  EXPECT_NEAR(v.vss, 0.0, 1e-6 * std::max(1.0, v.cost_stochastic));
}

TEST(Vss, NonNegativeOnFixturesAndPositiveWhenTight) {
  for (const char* name : {"small_wind", "hybrid30", "hybrid30_tight"}) {
    const auto c = load_fixture(name);
    const auto v = ws::compute_vss(c, make_scenarios(c, {2, 5}));
    EXPECT_GE(v.vss, -1e-6 * std::max(1.0, v.cost_stochastic)) << name;
    if (std::string(name) == "hybrid30_tight") EXPECT_GT(v.vss, 1.0);
  }
}

TEST(Vss, FixedDispatchCostGrowsWithVoll) {
  auto c = load_fixture("small_wind");
  const auto set = make_scenarios(c, {3, 3});
  double prev = -INFINITY;
  for (double scale : {1.0, 2.0, 4.0}) {
    auto cc = c;
    cc.voll = c.voll * scale;
    const auto v = ws::compute_vss(cc, set);
    EXPECT_GE(v.cost_deterministic, prev - 1e-6 * std::abs(prev));
    prev = v.cost_deterministic;
  }
}

TEST(Vss, ShortfallCostIsDominatedByVoll) {
  const auto c = load_fixture("hybrid30_tight");
  const auto set = make_scenarios(c, {2, 5});
  const auto v = ws::compute_vss(c, set);
  const auto fixed = ws::evaluate_dispatch(c, set, v.expected_value_dispatch);
  ASSERT_TRUE(fixed.optimal());
  double slack = 0.0;
  for (const auto& s : fixed.scenarios) slack += s.pi * (s.p_shed + s.p_spill + s.q_slack);
  EXPECT_GT(slack, 0.0);
  EXPECT_GE(v.cost_deterministic, c.voll * slack + ws::stage1_cost(c, v.expected_value_dispatch) - 1e-6);
}
