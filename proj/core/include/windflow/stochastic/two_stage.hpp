#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windflow/acopf/model.hpp"
#include "windflow/acopf/point.hpp"
#include "windflow/conic/solver.hpp"
#include "windflow/grid/topology.hpp"
#include "windflow/grid/types.hpp"
#include "windflow/wind/scenarios.hpp"

namespace windflow::stochastic {

struct StochasticOptions {
  /// VoLL-priced slacks in every scenario block. Needed whenever a stage-1
  /// dispatch is fixed from outside.
  bool shedding = true;
  double loss_penalty = acopf::kDefaultLossPenalty;
  /// Conic backend name; empty uses WINDFLOW_SOLVER or the default.
  std::string backend;
  conic::SolverOptions solver;
};

/// Wind windows of every scenario reordered to the case's farm order.
/// Throws std::invalid_argument if the farm ids differ.
[[nodiscard]] std::vector<std::vector<acopf::WindLimits>> align_windows(const grid::GridCase& c,
                                                                        const wind::ScenarioSet& s);

/// One shared stage-1 dispatch and one SOC network copy per scenario,
/// weighted by its probability.
struct TwoStageModel {
  conic::ConicProgram program;
  grid::Topology topo;
  std::vector<conic::VarId> p_gen;
  std::vector<acopf::BlockSpec> specs;
  std::vector<acopf::BlockHandles> blocks;
  std::vector<int> scenario_j;
};

[[nodiscard]] TwoStageModel build_two_stage(const grid::GridCase& c, const wind::ScenarioSet& s,
                                            const StochasticOptions& opts = {});

/// Set cardinalities that enter the closed-form size formulas.
struct SizeCounts {
  long long J = 0, L = 0, G = 0, E = 0, I = 0;
  long long i_ac = 0, l_ac = 0, i_dc = 0, l_dc = 0, csh = 0, sw = 0, conv = 0, l_svc = 0;
};

[[nodiscard]] SizeCounts size_counts(const grid::GridCase& c, long long scenarios);
/// J (5L + G + 2E + I) + G.
[[nodiscard]] long long formula_variables(const SizeCounts& n);
/// J (2 i_ac + 5 l_ac + i_dc + 5 l_dc + Csh + sw + 2 CONV + 2 l_svc + 2E + 2I) + 2G.
[[nodiscard]] long long formula_constraints(const SizeCounts& n);

struct ModelSize {
  SizeCounts counts;
  long long formula_variables = 0;
  long long formula_constraints = 0;
  long long variables = 0;
  long long equalities = 0;
  long long inequalities = 0;
  long long cones = 0;
  /// Finite variable bounds (each side counted once).
  long long bounds = 0;
  [[nodiscard]] long long constraints() const { return equalities + inequalities + cones; }
};

[[nodiscard]] ModelSize model_size(const grid::GridCase& c, const TwoStageModel& m);
[[nodiscard]] nlohmann::ordered_json to_json(const ModelSize& s);

enum class Method { SingleStage, SerialBda, ParallelBda };
[[nodiscard]] std::string_view to_string(Method m);

struct ScenarioSummary {
  int j = 0;
  double pi = 0.0;
  double recourse_cost = 0.0;  // unweighted
  double p_shed = 0.0;         // pu
  double p_spill = 0.0;
  double q_slack = 0.0;
  double wind = 0.0;           // dispatched, pu
  double curtailment = 0.0;    // available minus dispatched, pu
};

struct StochasticSolution {
  Method method = Method::SingleStage;
  conic::SolveStatus status = conic::SolveStatus::NumericalFailure;
  bool converged = true;
  std::vector<double> stage1;  // pu, case generator order
  double objective = 0.0;
  double stage1_cost = 0.0;
  double expected_recourse = 0.0;
  std::vector<ScenarioSummary> scenarios;
  std::vector<acopf::OperatingPoint> points;
  std::optional<double> upper_bound;
  std::optional<double> lower_bound;
  int iterations = 0;

  [[nodiscard]] bool optimal() const { return status == conic::SolveStatus::Optimal; }
  [[nodiscard]] double total_shed() const;
};

/// Generator cost sum at a dispatch, $.
[[nodiscard]] double stage1_cost(const grid::GridCase& c, std::span<const double> p);

/// Summary of one block at a solution of the program that holds it.
[[nodiscard]] ScenarioSummary summarize_block(const grid::GridCase& c, const acopf::BlockSpec& spec,
                                              const acopf::BlockHandles& h, const conic::Solution& sol, int j,
                                              double pi);

/// Solves the monolithic program. A non-optimal status is returned, not thrown.
[[nodiscard]] StochasticSolution solve_single_stage(const grid::GridCase& c, const TwoStageModel& m,
                                                    const StochasticOptions& opts = {});

/// Expected cost of a fixed stage-1 dispatch: the two-stage model with p_gen
/// pinned (shedding is forced on so every dispatch is evaluable).
[[nodiscard]] StochasticSolution evaluate_dispatch(const grid::GridCase& c, const wind::ScenarioSet& s,
                                                   std::span<const double> p, StochasticOptions opts = {});

/// Single scenario whose windows are the probability-weighted means.
[[nodiscard]] wind::ScenarioSet expected_value_scenario(const wind::ScenarioSet& s);

struct VssResult {
  std::vector<double> expected_value_dispatch;
  double cost_expected_value_model = 0.0;
  double cost_deterministic = 0.0;  // expected-value dispatch under all scenarios
  double cost_stochastic = 0.0;
  double vss = 0.0;
};

/// Throws std::runtime_error naming the failed solve.
[[nodiscard]] VssResult compute_vss(const grid::GridCase& c, const wind::ScenarioSet& s,
                                    const StochasticOptions& opts = {});

[[nodiscard]] nlohmann::ordered_json to_json(const grid::GridCase& c, const StochasticSolution& s);
[[nodiscard]] nlohmann::ordered_json to_json(const VssResult& v);

}  // namespace windflow::stochastic
