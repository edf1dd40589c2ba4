#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace windflow::grid {

enum class BusKind { AC, DC, PC };
enum class LineKind { AC, DC_MONO, DC_BI, VSC_CONVERTER, PC_TRANSFORMER, SVC };

[[nodiscard]] std::string_view to_string(BusKind k);
[[nodiscard]] std::string_view to_string(LineKind k);
[[nodiscard]] std::optional<BusKind> parse_bus_kind(std::string_view s);
[[nodiscard]] std::optional<LineKind> parse_line_kind(std::string_view s);

/// True for line kinds modeled with the AC branch equations (reactive flow,
/// voltage drop with X, angle relation).
[[nodiscard]] constexpr bool is_ac_branch(LineKind k) { return k == LineKind::AC || k == LineKind::PC_TRANSFORMER; }
[[nodiscard]] constexpr bool is_dc_line(LineKind k) { return k == LineKind::DC_MONO || k == LineKind::DC_BI; }

// All electrical quantities below are per unit on the case MVA base.

struct Bus {
  std::string id;
  BusKind kind = BusKind::AC;
  double base_kv = 0.0;
  double v_min_sq = 0.81;
  double v_max_sq = 1.21;
  double shunt_g = 0.0;
  double shunt_b = 0.0;
  double p_load = 0.0;
  double q_load = 0.0;

  bool operator==(const Bus&) const = default;
};

struct Line {
  std::string id;
  LineKind kind = LineKind::AC;
  std::string from_bus;
  std::string to_bus;
  double r = 0.0;  // R_l; R_T for PC_TRANSFORMER; R_Cse for VSC_CONVERTER
  double x = 0.0;  // X_l; X_T for PC_TRANSFORMER
  double capacity_sq = 0.0;
  double b_min = 0.0;  // SVC only
  double b_max = 0.0;  // SVC only

  bool operator==(const Line&) const = default;
};

struct Converter {
  std::string id;
  std::string pc_bus;
  std::string dc_bus;
  double r_shunt = 0.0;
  double m_sq_min = 0.25;
  double m_sq_max = 1.0;
  /// Switching-loss resistance; set for STATCOMs only.
  std::optional<double> r_sw;

  bool operator==(const Converter&) const = default;
};

struct Generator {
  std::string id;
  std::string bus;
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  double cost_c0 = 0.0;  // $
  double cost_c1 = 0.0;  // $/pu
  double cost_c2 = 0.0;  // $/pu^2

  [[nodiscard]] double cost(double p) const { return cost_c0 + cost_c1 * p + cost_c2 * p * p; }
  [[nodiscard]] double marginal_cost(double p) const { return cost_c1 + 2.0 * cost_c2 * p; }

  bool operator==(const Generator&) const = default;
};

struct TurbineGroup {
  std::string model;
  int count = 0;
  double rated_mw = 0.0;

  bool operator==(const TurbineGroup&) const = default;
};

struct WindFarm {
  std::string id;
  std::string bus;
  std::vector<TurbineGroup> turbines;
  double power_factor_min = 0.95;
  double wake_loss = 0.15;
  double cost_c1 = 0.0;  // $/pu

  /// Installed capacity after wake losses, in MW.
  [[nodiscard]] double available_mw() const;

  bool operator==(const WindFarm&) const = default;
};

/// Hybrid AC/DC network. Immutable after loading; lookups are by index into
/// the vectors, with id maps built by `reindex()`.
struct GridCase {
  std::string name;
  double s_base = 100.0;  // MVA
  double voll = 0.0;      // $/pu
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Converter> converters;
  std::vector<Generator> generators;
  std::vector<WindFarm> wind_farms;

  /// Rebuilds the id -> index maps; call after editing ids.
  void reindex();
  [[nodiscard]] std::optional<int> find_bus(std::string_view id) const;
  /// Throws std::out_of_range for unknown ids.
  [[nodiscard]] int bus_index(std::string_view id) const;

  [[nodiscard]] int count_buses(BusKind k) const;
  [[nodiscard]] int count_lines(LineKind k) const;

  /// Largest generator marginal cost at p_max, $/pu.
  [[nodiscard]] double max_marginal_cost() const;

  friend bool operator==(const GridCase& a, const GridCase& b);

 private:
  std::unordered_map<std::string, int> bus_index_;
};

}  // namespace windflow::grid
