#include "windflow/grid/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace windflow::grid {

std::string_view to_string(BusKind k) {
  switch (k) {
    case BusKind::AC:
      return "AC";
    case BusKind::DC:
      return "DC";
    case BusKind::PC:
      return "PC";
  }
  return "?";
}

std::string_view to_string(LineKind k) {
  switch (k) {
    case LineKind::AC:
      return "AC";
    case LineKind::DC_MONO:
      return "DC_MONO";
    case LineKind::DC_BI:
      return "DC_BI";
    case LineKind::VSC_CONVERTER:
      return "VSC_CONVERTER";
    case LineKind::PC_TRANSFORMER:
      return "PC_TRANSFORMER";
    case LineKind::SVC:
      return "SVC";
  }
  return "?";
}

std::optional<BusKind> parse_bus_kind(std::string_view s) {
  for (auto k : {BusKind::AC, BusKind::DC, BusKind::PC}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<LineKind> parse_line_kind(std::string_view s) {
  for (auto k : {LineKind::AC, LineKind::DC_MONO, LineKind::DC_BI, LineKind::VSC_CONVERTER, LineKind::PC_TRANSFORMER,
                 LineKind::SVC}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

double WindFarm::available_mw() const {
  double mw = 0.0;
  for (const auto& t : turbines) mw += t.count * t.rated_mw;
  return (1.0 - wake_loss) * mw;
}

void GridCase::reindex() {
  bus_index_.clear();
  for (std::size_t i = 0; i < buses.size(); ++i) bus_index_.emplace(buses[i].id, static_cast<int>(i));
}

std::optional<int> GridCase::find_bus(std::string_view id) const {
  auto it = bus_index_.find(std::string(id));
  if (it == bus_index_.end()) return std::nullopt;
  return it->second;
}

int GridCase::bus_index(std::string_view id) const {
  auto idx = find_bus(id);
  if (!idx) throw std::out_of_range("unknown bus '" + std::string(id) + "'");
  return *idx;
}

int GridCase::count_buses(BusKind k) const {
  return static_cast<int>(std::count_if(buses.begin(), buses.end(), [k](const Bus& b) { return b.kind == k; }));
}

int GridCase::count_lines(LineKind k) const {
  return static_cast<int>(std::count_if(lines.begin(), lines.end(), [k](const Line& l) { return l.kind == k; }));
}

double GridCase::max_marginal_cost() const {
  double m = 0.0;
  for (const auto& g : generators) m = std::max(m, g.marginal_cost(g.p_max));
  return m;
}

bool operator==(const GridCase& a, const GridCase& b) {
  return a.name == b.name && a.s_base == b.s_base && a.voll == b.voll && a.buses == b.buses && a.lines == b.lines &&
         a.converters == b.converters && a.generators == b.generators && a.wind_farms == b.wind_farms;
}

}  // namespace windflow::grid
