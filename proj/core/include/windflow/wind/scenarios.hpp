#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "windflow/acopf/model.hpp"
#include "windflow/grid/types.hpp"
#include "windflow/wind/distribution.hpp"
#include "windflow/wind/power_curve.hpp"

namespace windflow::wind {

/// One output level of one farm.
struct FarmScenario {
  double base_speed = 0.0;          // stratum quantile, m/s
  std::vector<double> speeds;       // per turbine, m/s
  double power_mw = 0.0;            // sum of turbine outputs before wake losses
  double weight = 0.0;              // sum of pdf values over the turbines
};

struct FarmScenarioList {
  std::string farm_id;
  double wake_loss = 0.15;
  double power_factor_min = 0.95;
  std::vector<FarmScenario> entries;
};

/// Stratified sampling: entry j (1-based) of `count` sits at the (j - 0.5)/count
/// quantile, and each turbine's speed is that value times a seeded uniform
/// factor in [0.95, 1.05]. Every turbine model of the farm must have a curve
/// whose rated power matches. Throws std::invalid_argument.
[[nodiscard]] FarmScenarioList farm_scenarios(const grid::WindFarm& farm, const WindDistribution& dist,
                                              const std::map<std::string, PowerCurve>& curves, int count,
                                              std::uint64_t seed);

struct Scenario {
  int j = 0;                // 1-based
  double pi = 0.0;
  std::vector<int> choice;  // per farm, 0-based entry of that farm's list
  std::vector<acopf::WindLimits> farms;  // per farm, pu
};

struct ScenarioSet {
  std::vector<std::string> farm_ids;
  std::vector<int> per_farm_counts;
  std::vector<Scenario> scenarios;

  [[nodiscard]] std::size_t size() const { return scenarios.size(); }
};

/// Cartesian product of the farm lists, last farm varying fastest. Each
/// scenario's probability is the product over farms of the entry's weight
/// divided by the sum of that farm's weights; p_max is the wake-reduced farm
/// output in pu and the reactive window follows the minimum power factor.
[[nodiscard]] ScenarioSet combine(std::span<const FarmScenarioList> lists, double s_base);

/// Builds a set from explicit windows and probabilities (one entry per
/// scenario, windows in farm order). Probabilities are used as given.
[[nodiscard]] ScenarioSet make_scenario_set(std::vector<std::string> farm_ids,
                                            const std::vector<std::pair<double, std::vector<acopf::WindLimits>>>& rows);

/// Scenario JSON: `format: "windflow-scenarios/1"`, farm ids, per-farm counts
/// and {j, pi, farms: {id: {p_max_pu, q_max_pu, q_min_pu}}} per scenario.
[[nodiscard]] nlohmann::ordered_json to_json(const ScenarioSet& s);
/// Probabilities must be non-negative and sum to 1 within 1e-6; they are
/// renormalized on load. Throws std::invalid_argument.
[[nodiscard]] ScenarioSet scenarios_from_json(const nlohmann::json& doc);
[[nodiscard]] ScenarioSet load_scenarios(const std::filesystem::path& path);
void save_scenarios(const std::filesystem::path& path, const ScenarioSet& s);

/// `j,pi,<farm>_p_max_pu,...` rows for plotting.
[[nodiscard]] std::string scenario_csv(const ScenarioSet& s);

/// Single-column CSV of wind speeds (`speed_mps` header).
[[nodiscard]] std::vector<double> load_measurements(const std::filesystem::path& path);
void save_measurements(const std::filesystem::path& path, std::span<const double> speeds);

}  // namespace windflow::wind
