#pragma once

#include <array>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "windflow/acopf/model.hpp"
#include "windflow/conic/solver.hpp"
#include "windflow/grid/types.hpp"

namespace windflow::acopf {

/// Physical operating point, per unit on the case base. Angles in radians.
struct OperatingPoint {
  struct BusState {
    double V = 1.0;  // squared magnitude
    double v = 1.0;
    double theta = 0.0;
    double p_shed = 0.0;
    double p_spill = 0.0;
    double q_shed = 0.0;  // net reactive slack injection
  };
  struct LineState {
    double p_s = 0.0;
    double q_s = 0.0;
    double p_loss = 0.0;
    double q_loss = 0.0;
    double theta_l = 0.0;
    double current = 0.0;  // DC lines only
    double b = 0.0;        // SVC susceptance
  };
  struct GeneratorState {
    double p = 0.0;
    double q = 0.0;
  };
  struct ConverterState {
    double p_csh = 0.0;
    double p_sw = 0.0;
    double p_cse = 0.0;
  };

  std::vector<BusState> buses;
  std::vector<LineState> lines;
  std::vector<GeneratorState> generators;
  std::vector<GeneratorState> wind;
  std::vector<ConverterState> converters;
};

/// Rebuilds the operating point of one network copy from a solution.
/// Bus angles: the island reference is 0 and theta_l is propagated along a
/// BFS spanning tree of AC branches (SOC); the DC-OPF keeps its own angles.
/// Throws std::runtime_error on a negative squared voltage beyond 1e-9.
[[nodiscard]] OperatingPoint recover_point(const grid::GridCase& c, const grid::Topology& topo, ModelKind kind,
                                           const BlockHandles& block, std::span<const conic::VarId> p_gen,
                                           const conic::Solution& sol);

/// Convenience overload for a deterministic model. Requires an optimal solution.
[[nodiscard]] OperatingPoint recover_physical(const grid::GridCase& c, const OpfModel& model,
                                              const conic::Solution& sol);

/// Exact AC equation families evaluated by feasibility_gap.
enum class GapFamily { PBalance, QBalance, PLoss, QLoss, VoltageDrop, Angle };
inline constexpr std::array<GapFamily, 6> kGapFamilies = {GapFamily::PBalance, GapFamily::QBalance,
                                                          GapFamily::PLoss,    GapFamily::QLoss,
                                                          GapFamily::VoltageDrop, GapFamily::Angle};
/// Machine-friendly family name ("p_balance", ...) and a short description.
[[nodiscard]] std::string_view label(GapFamily f);
[[nodiscard]] std::string_view description(GapFamily f);

struct GapReport {
  std::array<double, 6> max_abs{};  // indexed like kGapFamilies
  [[nodiscard]] double operator[](GapFamily f) const { return max_abs[static_cast<std::size_t>(f)]; }
};

/// Maximum absolute residual of each exact AC family at the point:
/// bus balances over AC and PC buses (every line kind contributes, the
/// receiving end takes p_s - p_loss), and losses, voltage drop and
/// v_s v_r sin(theta_s - theta_r) = X p_s - R q_s over AC branches.
[[nodiscard]] GapReport feasibility_gap(const grid::GridCase& c, const OperatingPoint& point);

/// Angle mismatch theta_l - (theta_s - theta_r) for every AC branch outside
/// the spanning tree used for the bus angles, i.e. one entry per independent
/// cycle. The linearized angle relation does not force these to zero.
struct CycleResidual {
  std::string line;
  double residual = 0.0;
};
[[nodiscard]] std::vector<CycleResidual> angle_cycle_residuals(const grid::GridCase& c, const OperatingPoint& point);

/// AC branches and DC lines whose loss exceeds its quadratic lower bound by
/// more than `tol` (the relaxation is not tight there).
[[nodiscard]] std::vector<std::string> slack_loss_cones(const grid::GridCase& c, const OperatingPoint& point,
                                                        double tol = 1e-4);

/// Total shed load, spilled generation and absolute reactive slack, pu.
struct ShedSummary {
  double p_shed = 0.0;
  double p_spill = 0.0;
  double q_slack = 0.0;
};
[[nodiscard]] ShedSummary shed_summary(const OperatingPoint& point);

[[nodiscard]] nlohmann::ordered_json to_json(const grid::GridCase& c, const OperatingPoint& point);
[[nodiscard]] nlohmann::ordered_json to_json(const GapReport& gaps);

/// CSV with header `case,model,family,description,max_abs_gap`, one row per family.
[[nodiscard]] std::string gap_csv(std::string_view case_name, ModelKind kind, const GapReport& gaps,
                                  bool with_header = true);

}  // namespace windflow::acopf
