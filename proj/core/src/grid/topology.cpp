#include "windflow/grid/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace windflow::grid {
namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int a) {
    while (parent_[static_cast<std::size_t>(a)] != a) {
      auto& p = parent_[static_cast<std::size_t>(a)];
      p = parent_[static_cast<std::size_t>(p)];
      a = p;
    }
    return a;
  }
  void join(int a, int b) { parent_[static_cast<std::size_t>(find(a))] = find(b); }

 private:
  std::vector<int> parent_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

template <typename T>
void unique_ids(const std::vector<T>& items, const char* what, std::vector<std::string>& out) {
  std::set<std::string> seen;
  for (const auto& it : items) {
    if (it.id.empty()) out.push_back(std::string(what) + " with empty id");
    else if (!seen.insert(it.id).second) out.push_back(std::string(what) + " id '" + it.id + "' is not unique");
  }
}

}  // namespace

ValidationReport validate(const GridCase& c) {
  std::vector<std::string> v;
  if (!(c.s_base > 0.0)) v.push_back("s_base must be positive");
  if (c.voll < 0.0) v.push_back("voll must be non-negative");
  unique_ids(c.buses, "bus", v);
  unique_ids(c.lines, "line", v);
  unique_ids(c.converters, "converter", v);
  unique_ids(c.generators, "generator", v);
  unique_ids(c.wind_farms, "wind farm", v);

  // Lookups must not depend on reindex() having been called.
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < c.buses.size(); ++i) index.emplace(c.buses[i].id, static_cast<int>(i));
  auto bus_of = [&](const std::string& id) -> const Bus* {
    auto it = index.find(id);
    return it == index.end() ? nullptr : &c.buses[static_cast<std::size_t>(it->second)];
  };

  for (const auto& b : c.buses) {
    const std::string who = "bus '" + b.id + "'";
    if (!(b.v_min_sq > 0.0 && b.v_min_sq <= b.v_max_sq)) {
      v.push_back(who + ": need 0 < v_min_sq <= v_max_sq (got " + fmt(b.v_min_sq) + ", " + fmt(b.v_max_sq) + ")");
    }
    if (b.kind != BusKind::AC && b.q_load != 0.0) {
      v.push_back(who + ": " + std::string(to_string(b.kind)) + " bus must have q_load = 0");
    }
    if (b.kind == BusKind::DC && b.shunt_b != 0.0) v.push_back(who + ": DC bus must have shunt_b = 0");
  }

  // Number of lines touching each bus, used for the SVC terminal check.
  std::vector<int> degree(c.buses.size(), 0);
  for (const auto& l : c.lines) {
    for (const auto* end : {&l.from_bus, &l.to_bus}) {
      auto it = index.find(*end);
      if (it != index.end()) ++degree[static_cast<std::size_t>(it->second)];
    }
  }

  for (const auto& l : c.lines) {
    const std::string who = "line '" + l.id + "'";
    const Bus* from = bus_of(l.from_bus);
    const Bus* to = bus_of(l.to_bus);
    if (!from) v.push_back(who + ": from_bus '" + l.from_bus + "' does not exist");
    if (!to) v.push_back(who + ": to_bus '" + l.to_bus + "' does not exist");
    if (l.from_bus == l.to_bus) v.push_back(who + ": from_bus and to_bus are the same bus");
    if (l.r < 0.0) v.push_back(who + ": r must be non-negative");
    if (!(l.capacity_sq > 0.0)) v.push_back(who + ": capacity_sq must be positive");
    switch (l.kind) {
      case LineKind::AC:
        if (!(l.x > 0.0)) v.push_back(who + ": AC line needs x > 0");
        if (from && to && (from->kind != BusKind::AC || to->kind != BusKind::AC)) {
          v.push_back(who + ": AC line must join two AC buses");
        }
        break;
      case LineKind::PC_TRANSFORMER:
        if (!(l.x > 0.0)) v.push_back(who + ": PC_TRANSFORMER needs x > 0");
        if (from && to && (from->kind != BusKind::PC || to->kind != BusKind::AC)) {
          v.push_back(who + ": PC_TRANSFORMER must run from a PC bus to an AC bus");
        }
        break;
      case LineKind::DC_MONO:
      case LineKind::DC_BI:
        if (l.x != 0.0) v.push_back(who + ": DC line must have x = 0");
        if (!(l.r > 0.0)) v.push_back(who + ": DC line needs r > 0");
        if (from && to && (from->kind != BusKind::DC || to->kind != BusKind::DC)) {
          v.push_back(who + ": DC line must join two DC buses");
        }
        break;
      case LineKind::VSC_CONVERTER:
        if (l.x != 0.0) v.push_back(who + ": VSC_CONVERTER line must have x = 0");
        if (from && to && (from->kind != BusKind::DC || to->kind != BusKind::PC)) {
          v.push_back(who + ": VSC_CONVERTER line must run from a DC bus to a PC bus");
        }
        break;
      case LineKind::SVC:
        if (l.b_min > l.b_max) {
          v.push_back(who + ": SVC needs b_min <= b_max (got " + fmt(l.b_min) + " > " + fmt(l.b_max) + ")");
        }
        if (from && from->kind != BusKind::AC) v.push_back(who + ": SVC must hang off an AC bus");
        if (to) {
          const auto ti = static_cast<std::size_t>(index.at(l.to_bus));
          const bool loaded = to->p_load != 0.0 || to->q_load != 0.0 || to->shunt_g != 0.0 || to->shunt_b != 0.0;
          if (degree[ti] != 1 || loaded) v.push_back(who + ": to_bus '" + l.to_bus + "' must be a dangling device terminal");
        }
        break;
    }
  }

  std::vector<int> converters_at_pc(c.buses.size(), 0);
  for (const auto& cv : c.converters) {
    const std::string who = "converter '" + cv.id + "'";
    if (!(cv.m_sq_min >= 0.25 && cv.m_sq_min <= cv.m_sq_max && cv.m_sq_max <= 1.0)) {
      v.push_back(who + ": modulation bounds violate 0.5 <= m <= 1 (need 0.25 <= m_sq_min <= m_sq_max <= 1, got " +
                  fmt(cv.m_sq_min) + ", " + fmt(cv.m_sq_max) + ")");
    }
    if (!(cv.r_shunt > 0.0)) v.push_back(who + ": r_shunt must be positive");
    if (cv.r_sw && !(*cv.r_sw > 0.0)) v.push_back(who + ": r_sw must be positive when present");
    const Bus* pc = bus_of(cv.pc_bus);
    const Bus* dc = bus_of(cv.dc_bus);
    if (!pc) v.push_back(who + ": pc_bus '" + cv.pc_bus + "' does not exist");
    else if (pc->kind != BusKind::PC) v.push_back(who + ": pc_bus '" + cv.pc_bus + "' is not a PC bus");
    else ++converters_at_pc[static_cast<std::size_t>(index.at(cv.pc_bus))];
    if (!dc) v.push_back(who + ": dc_bus '" + cv.dc_bus + "' does not exist");
    else if (dc->kind != BusKind::DC) v.push_back(who + ": dc_bus '" + cv.dc_bus + "' is not a DC bus");
    int links = 0;
    int transformers = 0;
    for (const auto& l : c.lines) {
      if (l.kind == LineKind::VSC_CONVERTER && l.from_bus == cv.dc_bus && l.to_bus == cv.pc_bus) ++links;
      if (l.kind == LineKind::PC_TRANSFORMER && l.from_bus == cv.pc_bus) ++transformers;
    }
    if (links != 1) v.push_back(who + ": needs exactly one VSC_CONVERTER line from its DC bus to its PC bus");
    if (transformers != 1) v.push_back(who + ": needs exactly one PC_TRANSFORMER leaving its PC bus");
  }
  for (std::size_t i = 0; i < c.buses.size(); ++i) {
    if (c.buses[i].kind == BusKind::PC && converters_at_pc[i] != 1) {
      v.push_back("bus '" + c.buses[i].id + "': PC bus must pair with exactly one DC bus through a converter");
    }
  }
  for (const auto& l : c.lines) {
    if (l.kind != LineKind::VSC_CONVERTER) continue;
    const bool owned = std::any_of(c.converters.begin(), c.converters.end(), [&](const Converter& cv) {
      return cv.dc_bus == l.from_bus && cv.pc_bus == l.to_bus;
    });
    if (!owned) v.push_back("line '" + l.id + "': VSC_CONVERTER line has no matching converter");
  }

  for (const auto& g : c.generators) {
    const std::string who = "generator '" + g.id + "'";
    const Bus* b = bus_of(g.bus);
    if (!b) v.push_back(who + ": bus '" + g.bus + "' does not exist");
    else if (b->kind != BusKind::AC) v.push_back(who + ": must connect to an AC bus");
    if (g.p_min > g.p_max) v.push_back(who + ": p_min > p_max");
    if (g.q_min > g.q_max) v.push_back(who + ": q_min > q_max");
    if (g.cost_c2 < 0.0) v.push_back(who + ": cost_c2 must be non-negative");
  }

  for (const auto& w : c.wind_farms) {
    const std::string who = "wind farm '" + w.id + "'";
    const Bus* b = bus_of(w.bus);
    if (!b) v.push_back(who + ": bus '" + w.bus + "' does not exist");
    else if (b->kind != BusKind::AC) v.push_back(who + ": must connect to an AC bus");
    if (!(w.wake_loss >= 0.0 && w.wake_loss < 1.0)) v.push_back(who + ": wake_loss must lie in [0, 1)");
    if (!(w.power_factor_min > 0.0 && w.power_factor_min <= 1.0)) {
      v.push_back(who + ": power_factor_min must lie in (0, 1]");
    }
    if (w.turbines.empty()) v.push_back(who + ": has no turbines");
    for (const auto& t : w.turbines) {
      if (t.count < 1) v.push_back(who + ": turbine count for '" + t.model + "' must be at least 1");
      if (!(t.rated_mw > 0.0)) v.push_back(who + ": rated_mw for '" + t.model + "' must be positive");
    }
  }

  // Connectivity: the whole network (AC islands may be joined through the
  // MTDC system) must form one component, and every DC component needs a
  // converter to reach the AC side.
  if (!c.buses.empty()) {
    UnionFind all(static_cast<int>(c.buses.size()));
    UnionFind dc(static_cast<int>(c.buses.size()));
    for (const auto& l : c.lines) {
      auto f = index.find(l.from_bus);
      auto t = index.find(l.to_bus);
      if (f == index.end() || t == index.end()) continue;
      if (l.kind != LineKind::SVC) all.join(f->second, t->second);
      if (is_dc_line(l.kind)) dc.join(f->second, t->second);
    }
    std::set<int> roots;
    for (std::size_t i = 0; i < c.buses.size(); ++i) {
      const bool terminal = std::any_of(c.lines.begin(), c.lines.end(), [&](const Line& l) {
        return l.kind == LineKind::SVC && l.to_bus == c.buses[i].id;
      });
      if (!terminal) roots.insert(all.find(static_cast<int>(i)));
    }
    if (roots.size() > 1) v.push_back("network is not connected (" + std::to_string(roots.size()) + " components)");

    std::set<int> dc_with_converter;
    for (const auto& cv : c.converters) {
      auto it = index.find(cv.dc_bus);
      if (it != index.end()) dc_with_converter.insert(dc.find(it->second));
    }
    for (std::size_t i = 0; i < c.buses.size(); ++i) {
      if (c.buses[i].kind == BusKind::DC && !dc_with_converter.count(dc.find(static_cast<int>(i)))) {
        v.push_back("bus '" + c.buses[i].id + "': DC bus has no converter path to the AC network");
      }
    }
  }
  return {std::move(v)};
}

IncidenceMatrices incidence(const GridCase& c) {
  const std::size_t nb = c.buses.size();
  const std::size_t nl = c.lines.size();
  IncidenceMatrices m{std::vector<std::vector<int>>(nb, std::vector<int>(nl, 0)),
                      std::vector<std::vector<int>>(nb, std::vector<int>(nl, 0))};
  for (std::size_t l = 0; l < nl; ++l) {
    const auto f = static_cast<std::size_t>(c.bus_index(c.lines[l].from_bus));
    const auto t = static_cast<std::size_t>(c.bus_index(c.lines[l].to_bus));
    m.plus[f][l] = 1;
    m.plus[t][l] = -1;
    m.minus[f][l] = 1;
  }
  return m;
}

Topology resolve(const GridCase& c) {
  Topology t;
  const auto nb = c.buses.size();
  const auto nl = c.lines.size();
  t.line_from.resize(nl);
  t.line_to.resize(nl);
  t.svc_terminal.assign(nb, false);
  t.converter_of_line.assign(nl, -1);
  t.generators_at_bus.resize(nb);
  t.wind_at_bus.resize(nb);
  for (std::size_t l = 0; l < nl; ++l) {
    t.line_from[l] = c.bus_index(c.lines[l].from_bus);
    t.line_to[l] = c.bus_index(c.lines[l].to_bus);
    if (c.lines[l].kind == LineKind::SVC) t.svc_terminal[static_cast<std::size_t>(t.line_to[l])] = true;
  }
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    t.generators_at_bus[static_cast<std::size_t>(c.bus_index(c.generators[g].bus))].push_back(static_cast<int>(g));
  }
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    t.wind_at_bus[static_cast<std::size_t>(c.bus_index(c.wind_farms[w].bus))].push_back(static_cast<int>(w));
  }
  for (std::size_t k = 0; k < c.converters.size(); ++k) {
    const auto& cv = c.converters[k];
    Topology::ConverterLinks links;
    links.converter = static_cast<int>(k);
    links.pc_bus = c.bus_index(cv.pc_bus);
    links.dc_bus = c.bus_index(cv.dc_bus);
    for (std::size_t l = 0; l < nl; ++l) {
      const auto& line = c.lines[l];
      if (line.kind == LineKind::VSC_CONVERTER && t.line_from[l] == links.dc_bus && t.line_to[l] == links.pc_bus) {
        links.converter_line = static_cast<int>(l);
        t.converter_of_line[l] = static_cast<int>(k);
      }
      if (line.kind == LineKind::PC_TRANSFORMER && t.line_from[l] == links.pc_bus) {
        links.transformer = static_cast<int>(l);
        t.converter_of_line[l] = static_cast<int>(k);
      }
    }
    t.converters.push_back(links);
  }

  // AC islands: AC and PC buses joined by AC branches.
  UnionFind uf(static_cast<int>(nb));
  for (std::size_t l = 0; l < nl; ++l) {
    if (is_ac_branch(c.lines[l].kind)) uf.join(t.line_from[l], t.line_to[l]);
  }
  std::vector<int> island_of_root(nb, -1);
  for (std::size_t i = 0; i < nb; ++i) {
    if (c.buses[i].kind == BusKind::DC || t.svc_terminal[i]) continue;
    const auto r = static_cast<std::size_t>(uf.find(static_cast<int>(i)));
    if (island_of_root[r] < 0) {
      island_of_root[r] = static_cast<int>(t.ac_islands.size());
      t.ac_islands.emplace_back();
    }
    t.ac_islands[static_cast<std::size_t>(island_of_root[r])].push_back(static_cast<int>(i));
  }
  // Reference bus: the first generator bus in bus order, then the first wind
  // bus, then the first bus of the island.
  for (const auto& island : t.ac_islands) {
    int slack = -1;
    for (int i : island) {
      if (!t.generators_at_bus[static_cast<std::size_t>(i)].empty()) {
        slack = i;
        break;
      }
    }
    if (slack < 0) {
      for (int i : island) {
        if (!t.wind_at_bus[static_cast<std::size_t>(i)].empty()) {
          slack = i;
          break;
        }
      }
    }
    t.island_slack.push_back(slack < 0 ? island.front() : slack);
  }
  return t;
}

}  // namespace windflow::grid
