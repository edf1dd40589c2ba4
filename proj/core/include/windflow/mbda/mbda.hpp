#pragma once

#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "windflow/acopf/model.hpp"
#include "windflow/conic/program.hpp"
#include "windflow/grid/topology.hpp"
#include "windflow/stochastic/two_stage.hpp"
#include "windflow/wind/scenarios.hpp"

namespace windflow::mbda {

/// Contiguous, balanced split of scenario indices. Sizes differ by at most one
/// and the larger blocks come first.
struct Partition {
  std::vector<std::vector<int>> blocks;
  int requested = 0;
  bool clamped = false;  // more workers than scenarios were requested
};

/// Throws std::invalid_argument for workers < 1 or an empty set.
[[nodiscard]] Partition partition_scenarios(std::size_t scenarios, int workers);

/// theta_n >= intercept + mu . (p - anchor)
struct BendersCut {
  int subproblem = 0;
  int iteration = 0;
  double intercept = 0.0;
  std::vector<double> mu;      // $/pu per generator
  std::vector<double> anchor;  // pu per generator

  [[nodiscard]] double evaluate(std::span<const double> p) const;
  bool operator==(const BendersCut&) const = default;
};

struct SubproblemResult {
  int subproblem = 0;
  double cost = 0.0;           // probability-weighted recourse of the block's scenarios
  std::vector<double> mu;
  double expected_shed = 0.0;  // pu, probability weighted
  std::vector<stochastic::ScenarioSummary> scenarios;
};

/// Recourse problem of one scenario block: the network copies of its
/// scenarios with stage-1 outputs held by the rows anchor:<n>:<generator>.
/// Slacks are always on, so every anchor within the generator bounds is
/// feasible. Not thread-safe; one instance per concurrent task.
class Subproblem {
 public:
  Subproblem(const grid::GridCase& c, const grid::Topology& topo, const wind::ScenarioSet& set,
             const std::vector<std::vector<acopf::WindLimits>>& windows, std::vector<int> scenarios, int index,
             const stochastic::StochasticOptions& opts);

  /// Throws std::runtime_error if the solver does not reach optimality.
  [[nodiscard]] SubproblemResult solve(std::span<const double> anchor);

  [[nodiscard]] const conic::ConicProgram& program() const { return program_; }
  /// Solution of the last solve and the handles to read it.
  [[nodiscard]] const conic::Solution& last_solution() const { return last_; }
  [[nodiscard]] const std::vector<acopf::BlockHandles>& blocks() const { return blocks_; }
  [[nodiscard]] std::span<const conic::VarId> p_gen() const { return p_gen_; }

 private:
  const grid::GridCase* case_;
  int index_;
  std::vector<int> scenarios_;
  std::vector<double> pi_;
  std::vector<int> scenario_j_;
  stochastic::StochasticOptions opts_;
  conic::ConicProgram program_;
  std::vector<conic::VarId> p_gen_;
  std::vector<conic::EqRowId> anchors_;
  std::vector<acopf::BlockSpec> specs_;
  std::vector<acopf::BlockHandles> blocks_;
  conic::Solution last_;
};

/// One-shot subproblem solve over the given scenario indices.
[[nodiscard]] SubproblemResult solve_subproblem(const grid::GridCase& c, const wind::ScenarioSet& set,
                                                const std::vector<int>& scenarios, std::span<const double> anchor,
                                                const stochastic::StochasticOptions& opts = {});

struct MasterResult {
  std::vector<double> dispatch;
  double lower_bound = 0.0;
};

/// Minimizes generator cost plus one recourse estimate per subproblem, each
/// floored at zero and bounded below by that subproblem's cuts.
[[nodiscard]] MasterResult solve_master(const grid::GridCase& c, std::span<const BendersCut> cuts, int subproblems,
                                        const stochastic::StochasticOptions& opts = {});

enum class Mode { Serial, Parallel };

struct MbdaOptions {
  int workers = 1;
  Mode mode = Mode::Serial;
  double gap = 0.02;
  int max_iter = 50;
  stochastic::StochasticOptions stochastic;
};

struct TraceRow {
  int iteration = 0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double gap = 0.0;
  double wall_ms = 0.0;
};

struct MbdaResult {
  stochastic::StochasticSolution solution;
  std::vector<TraceRow> trace;
  std::vector<BendersCut> cuts;
  Partition partition;
};

/// Runs the decomposition until (UB - LB) / max(|UB|, 1e-6) <= gap or
/// max_iter iterations; solution.converged is false in the latter case.
/// Subproblem results are merged in block order, so serial and parallel runs
/// produce identical cuts and bounds.
[[nodiscard]] MbdaResult run_mbda(const grid::GridCase& c, const wind::ScenarioSet& set, const MbdaOptions& opts);

/// `iteration,lower_bound,upper_bound,gap,wall_ms`
[[nodiscard]] std::string trace_csv(std::span<const TraceRow> trace);
[[nodiscard]] nlohmann::ordered_json to_json(std::span<const BendersCut> cuts);

}  // namespace windflow::mbda
