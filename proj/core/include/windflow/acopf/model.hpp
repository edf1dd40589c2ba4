#pragma once

#include <span>
#include <string>
#include <vector>

#include "windflow/conic/program.hpp"
#include "windflow/conic/solver.hpp"
#include "windflow/grid/topology.hpp"
#include "windflow/grid/types.hpp"

namespace windflow::acopf {

enum class ModelKind { Soc, Dc };

[[nodiscard]] std::string_view to_string(ModelKind k);

inline constexpr double kDefaultLossPenalty = 1e-3;

/// Per-unit wind output window of one farm in one scenario.
struct WindLimits {
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
};

/// Deterministic window: full installed capacity after wake losses, reactive
/// range from the minimum power factor.
[[nodiscard]] WindLimits nominal_wind(const grid::WindFarm& farm, double s_base);
[[nodiscard]] WindLimits wind_window(double p_max_pu, double power_factor_min);

/// One copy of the network constraints.
struct BlockSpec {
  /// Scenario tag used in variable and row names.
  std::string scenario = "0";
  /// Multiplies every stage-2 cost of the block (wind, shedding).
  double weight = 1.0;
  /// One window per wind farm; empty means nominal_wind for every farm.
  std::vector<WindLimits> wind;
  /// Adds slacks priced at VoLL: unserved energy at every AC bus, generation
  /// spill at generator buses and reactive slack in both directions.
  bool shedding = false;
  /// Price on AC-branch reactive losses, $/pu. Interior-point solutions sit in
  /// the middle of a non-unique optimal face, where the loss cones can be
  /// slack; a small price selects the tight point.
  double loss_penalty = kDefaultLossPenalty;
};

/// Variable and row ids of one network copy. Entries that do not apply to an
/// element (e.g. q_s of a DC line) hold an invalid id (index -1).
struct BlockHandles {
  std::vector<conic::VarId> V;        // per bus
  std::vector<conic::VarId> theta;    // per bus (DC-OPF only)
  std::vector<conic::VarId> p_s;      // per line
  std::vector<conic::VarId> q_s;      // per line
  std::vector<conic::VarId> p_loss;   // per line
  std::vector<conic::VarId> q_loss;   // per line
  std::vector<conic::VarId> theta_l;  // per line
  std::vector<conic::VarId> q_gen;    // per generator
  std::vector<conic::VarId> p_wind;   // per farm
  std::vector<conic::VarId> q_wind;   // per farm
  std::vector<conic::VarId> p_shed;   // per bus
  std::vector<conic::VarId> p_spill;  // per bus
  std::vector<conic::VarId> q_shed_up;
  std::vector<conic::VarId> q_shed_down;
  std::vector<conic::EqRowId> p_balance;  // per bus
  std::vector<conic::EqRowId> q_balance;  // per bus
};

/// Adds stage-1 generator outputs p_gen:<id> with their bounds and costs.
[[nodiscard]] std::vector<conic::VarId> add_generator_dispatch(conic::ConicProgram& prog, const grid::GridCase& c);

/// Adds one SOC-relaxed network copy driven by the given generator outputs.
BlockHandles add_soc_block(conic::ConicProgram& prog, const grid::GridCase& c, const grid::Topology& topo,
                           std::span<const conic::VarId> p_gen, const BlockSpec& spec);

/// Adds one lossless B-theta network copy (V = 1, no reactive power).
BlockHandles add_dc_block(conic::ConicProgram& prog, const grid::GridCase& c, const grid::Topology& topo,
                          std::span<const conic::VarId> p_gen, const BlockSpec& spec);

/// Unweighted stage-2 cost of one block at a solution: wind cost, VoLL times
/// all slacks and the reactive-loss price.
[[nodiscard]] double block_cost(const grid::GridCase& c, const BlockHandles& h, const BlockSpec& spec,
                                const conic::Solution& sol);

struct OpfOptions {
  bool shedding = false;
  double loss_penalty = kDefaultLossPenalty;
  /// Overrides the nominal wind windows (one per farm).
  std::vector<WindLimits> wind;
};

/// Deterministic single-period OPF.
struct OpfModel {
  ModelKind kind = ModelKind::Soc;
  conic::ConicProgram program;
  std::vector<conic::VarId> p_gen;
  BlockHandles block;
};

/// Throws std::invalid_argument for an invalid case.
[[nodiscard]] OpfModel build_soc_acopf(const grid::GridCase& c, const OpfOptions& opts = {});
[[nodiscard]] OpfModel build_dc_opf(const grid::GridCase& c, const OpfOptions& opts = {});

}  // namespace windflow::acopf
