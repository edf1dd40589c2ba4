#include "windflow/acopf/point.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace windflow::acopf {
namespace {

using conic::VarId;
using grid::BusKind;
using grid::LineKind;

double value_or(const conic::Solution& sol, VarId v, double fallback = 0.0) {
  return v.index >= 0 ? sol.value(v) : fallback;
}

// Assigns bus angles from line angles by BFS from each island reference.
void propagate_angles(const grid::GridCase& c, const grid::Topology& topo, OperatingPoint& pt) {
  std::vector<std::vector<int>> adj(c.buses.size());
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    if (!grid::is_ac_branch(c.lines[l].kind)) continue;
    adj[static_cast<std::size_t>(topo.line_from[l])].push_back(static_cast<int>(l));
    adj[static_cast<std::size_t>(topo.line_to[l])].push_back(static_cast<int>(l));
  }
  std::vector<bool> seen(c.buses.size(), false);
  for (int root : topo.island_slack) {
    std::deque<int> queue{root};
    seen[static_cast<std::size_t>(root)] = true;
    pt.buses[static_cast<std::size_t>(root)].theta = 0.0;
    while (!queue.empty()) {
      const int b = queue.front();
      queue.pop_front();
      for (int l : adj[static_cast<std::size_t>(b)]) {
        const auto lu = static_cast<std::size_t>(l);
        const int s = topo.line_from[lu];
        const int r = topo.line_to[lu];
        const int other = s == b ? r : s;
        if (seen[static_cast<std::size_t>(other)]) continue;
        seen[static_cast<std::size_t>(other)] = true;
        const double th = pt.lines[lu].theta_l;
        pt.buses[static_cast<std::size_t>(other)].theta =
            pt.buses[static_cast<std::size_t>(b)].theta + (s == b ? -th : th);
        queue.push_back(other);
      }
    }
  }
}

}  // namespace

OperatingPoint recover_point(const grid::GridCase& c, const grid::Topology& topo, ModelKind kind,
                             const BlockHandles& h, std::span<const VarId> p_gen, const conic::Solution& sol) {
  OperatingPoint pt;
  pt.buses.resize(c.buses.size());
  pt.lines.resize(c.lines.size());
  pt.generators.resize(c.generators.size());
  pt.wind.resize(c.wind_farms.size());
  pt.converters.resize(c.converters.size());

  for (std::size_t b = 0; b < c.buses.size(); ++b) {
    auto& st = pt.buses[b];
    if (kind == ModelKind::Soc) {
      if (h.V[b].index >= 0) {
        const double V = sol.value(h.V[b]);
        if (V < -1e-9) {
          throw std::runtime_error("negative squared voltage " + std::to_string(V) + " at bus '" + c.buses[b].id + "'");
        }
        st.V = std::max(V, 0.0);
      }
    } else {
      st.V = 1.0;
      st.theta = value_or(sol, h.theta[b]);
    }
    st.p_shed = value_or(sol, h.p_shed[b]);
    st.p_spill = value_or(sol, h.p_spill[b]);
    st.q_shed = value_or(sol, h.q_shed_up[b]) - value_or(sol, h.q_shed_down[b]);
  }
  // SVC terminals take the voltage of the bus they hang off.
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    if (c.lines[l].kind == LineKind::SVC) {
      pt.buses[static_cast<std::size_t>(topo.line_to[l])].V = pt.buses[static_cast<std::size_t>(topo.line_from[l])].V;
    }
  }
  for (auto& st : pt.buses) st.v = std::sqrt(st.V);

  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& line = c.lines[l];
    auto& st = pt.lines[l];
    st.p_s = value_or(sol, h.p_s[l]);
    st.q_s = value_or(sol, h.q_s[l]);
    st.p_loss = value_or(sol, h.p_loss[l]);
    st.q_loss = value_or(sol, h.q_loss[l]);
    const auto& from = pt.buses[static_cast<std::size_t>(topo.line_from[l])];
    const auto& to = pt.buses[static_cast<std::size_t>(topo.line_to[l])];
    if (kind == ModelKind::Soc) {
      st.theta_l = value_or(sol, h.theta_l[l]);
    } else if (grid::is_ac_branch(line.kind)) {
      st.theta_l = from.theta - to.theta;
    }
    if (line.kind == LineKind::DC_MONO) st.current = from.v > 0.0 ? st.p_s / from.v : 0.0;
    if (line.kind == LineKind::DC_BI) st.current = from.v > 0.0 ? st.p_s / (2.0 * from.v) : 0.0;
    if (line.kind == LineKind::SVC) st.b = from.V > 0.0 ? -st.q_s / from.V : 0.0;
  }
  if (kind == ModelKind::Soc) propagate_angles(c, topo, pt);

  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    pt.generators[g].p = sol.value(p_gen[g]);
    pt.generators[g].q = value_or(sol, h.q_gen[g]);
  }
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    pt.wind[w].p = value_or(sol, h.p_wind[w]);
    pt.wind[w].q = value_or(sol, h.q_wind[w]);
  }
  if (kind == ModelKind::Soc) {
    for (std::size_t k = 0; k < c.converters.size(); ++k) {
      const auto& conv = c.converters[k];
      const auto& links = topo.converters[k];
      const double V_dc = pt.buses[static_cast<std::size_t>(links.dc_bus)].V;
      const auto& tr = c.lines[static_cast<std::size_t>(links.transformer)];
      const auto& vsc = c.lines[static_cast<std::size_t>(links.converter_line)];
      pt.converters[k].p_csh = V_dc / conv.r_shunt;
      pt.converters[k].p_sw = conv.r_sw ? V_dc / *conv.r_sw : 0.0;
      pt.converters[k].p_cse = vsc.r / tr.x * pt.lines[static_cast<std::size_t>(links.transformer)].q_loss;
    }
  }
  return pt;
}

OperatingPoint recover_physical(const grid::GridCase& c, const OpfModel& model, const conic::Solution& sol) {
  if (!sol.optimal()) throw std::runtime_error("cannot recover a point from a non-optimal solution");
  return recover_point(c, grid::resolve(c), model.kind, model.block, model.p_gen, sol);
}

std::string_view label(GapFamily f) {
  static constexpr std::array<std::string_view, 6> names = {"p_balance", "q_balance", "p_loss",
                                                            "q_loss",    "v_drop",    "angle"};
  return names[static_cast<std::size_t>(f)];
}

std::string_view description(GapFamily f) {
  static constexpr std::array<std::string_view, 6> names = {"active balance", "reactive balance", "active loss",
                                                            "reactive loss",  "voltage drop",     "angle"};
  return names[static_cast<std::size_t>(f)];
}

GapReport feasibility_gap(const grid::GridCase& c, const OperatingPoint& pt) {
  const auto topo = grid::resolve(c);
  const auto nb = c.buses.size();
  std::vector<double> p_net(nb, 0.0);
  std::vector<double> q_net(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& bus = c.buses[b];
    const auto& st = pt.buses[b];
    const double v2 = st.v * st.v;
    p_net[b] = st.p_shed - st.p_spill - bus.p_load - bus.shunt_g * v2;
    q_net[b] = st.q_shed - bus.q_load + bus.shunt_b * v2;
  }
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    const auto b = static_cast<std::size_t>(c.bus_index(c.generators[g].bus));
    p_net[b] += pt.generators[g].p;
    q_net[b] += pt.generators[g].q;
  }
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    const auto b = static_cast<std::size_t>(c.bus_index(c.wind_farms[w].bus));
    p_net[b] += pt.wind[w].p;
    q_net[b] += pt.wind[w].q;
  }
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& st = pt.lines[l];
    const auto s = static_cast<std::size_t>(topo.line_from[l]);
    const auto r = static_cast<std::size_t>(topo.line_to[l]);
    switch (c.lines[l].kind) {
      case LineKind::SVC:
        q_net[s] -= st.q_s;
        break;
      case LineKind::VSC_CONVERTER:
        p_net[s] -= st.p_s;
        p_net[r] += st.p_s - st.p_loss;
        q_net[r] += st.q_s;
        break;
      default:
        p_net[s] -= st.p_s;
        p_net[r] += st.p_s - st.p_loss;
        q_net[s] -= st.q_s;
        q_net[r] += st.q_s - st.q_loss;
        break;
    }
  }

  GapReport rep;
  auto bump = [&rep](GapFamily f, double v) {
    auto& slot = rep.max_abs[static_cast<std::size_t>(f)];
    slot = std::max(slot, std::abs(v));
  };
  for (std::size_t b = 0; b < nb; ++b) {
    if (c.buses[b].kind == BusKind::DC || topo.svc_terminal[b]) continue;
    bump(GapFamily::PBalance, p_net[b]);
    bump(GapFamily::QBalance, q_net[b]);
  }
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& line = c.lines[l];
    if (!grid::is_ac_branch(line.kind)) continue;
    const auto& st = pt.lines[l];
    const auto& s = pt.buses[static_cast<std::size_t>(topo.line_from[l])];
    const auto& r = pt.buses[static_cast<std::size_t>(topo.line_to[l])];
    const double flow2 = st.p_s * st.p_s + st.q_s * st.q_s;
    const double vs2 = s.v * s.v;
    bump(GapFamily::PLoss, st.p_loss - flow2 / vs2 * line.r);
    bump(GapFamily::QLoss, st.q_loss - flow2 / vs2 * line.x);
    bump(GapFamily::VoltageDrop, vs2 - r.v * r.v - 2.0 * (line.r * st.p_s + line.x * st.q_s) + line.r * st.p_loss +
                                     line.x * st.q_loss);
    bump(GapFamily::Angle, s.v * r.v * std::sin(s.theta - r.theta) - (line.x * st.p_s - line.r * st.q_s));
  }
  return rep;
}

std::vector<CycleResidual> angle_cycle_residuals(const grid::GridCase& c, const OperatingPoint& pt) {
  const auto topo = grid::resolve(c);
  std::vector<CycleResidual> out;
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    if (!grid::is_ac_branch(c.lines[l].kind)) continue;
    const double diff = pt.buses[static_cast<std::size_t>(topo.line_from[l])].theta -
                        pt.buses[static_cast<std::size_t>(topo.line_to[l])].theta;
    const double res = pt.lines[l].theta_l - diff;
    // Tree branches reproduce theta_l up to rounding.
    if (std::abs(res) > 1e-12 * (1.0 + std::abs(diff))) out.push_back({c.lines[l].id, res});
  }
  return out;
}

std::vector<std::string> slack_loss_cones(const grid::GridCase& c, const OperatingPoint& pt, double tol) {
  const auto topo = grid::resolve(c);
  std::vector<std::string> out;
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& line = c.lines[l];
    const auto& st = pt.lines[l];
    const double Vs = pt.buses[static_cast<std::size_t>(topo.line_from[l])].V;
    if (Vs <= 0.0) continue;
    double excess = 0.0;
    if (grid::is_ac_branch(line.kind)) {
      excess = st.q_loss - (st.p_s * st.p_s + st.q_s * st.q_s) / Vs * line.x;
    } else if (line.kind == LineKind::DC_MONO) {
      excess = st.p_loss - st.p_s * st.p_s / Vs * line.r;
    } else if (line.kind == LineKind::DC_BI) {
      excess = st.p_loss - st.p_s * st.p_s / (4.0 * Vs) * line.r;
    }
    if (excess > tol) out.push_back(line.id);
  }
  return out;
}

ShedSummary shed_summary(const OperatingPoint& pt) {
  ShedSummary s;
  for (const auto& b : pt.buses) {
    s.p_shed += b.p_shed;
    s.p_spill += b.p_spill;
    s.q_slack += std::abs(b.q_shed);
  }
  return s;
}

nlohmann::ordered_json to_json(const grid::GridCase& c, const OperatingPoint& pt) {
  nlohmann::ordered_json j;
  j["units"] = "per unit on s_base; angles in radians";
  j["s_base_mva"] = c.s_base;
  auto& buses = j["buses"] = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < c.buses.size(); ++b) {
    const auto& st = pt.buses[b];
    buses.push_back({{"id", c.buses[b].id},
                     {"V", st.V},
                     {"v", st.v},
                     {"theta", st.theta},
                     {"p_shed", st.p_shed},
                     {"p_spill", st.p_spill},
                     {"q_slack", st.q_shed}});
  }
  auto& lines = j["lines"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& st = pt.lines[l];
    nlohmann::ordered_json o = {{"id", c.lines[l].id},         {"kind", grid::to_string(c.lines[l].kind)},
                                {"p_s", st.p_s},               {"q_s", st.q_s},
                                {"p_loss", st.p_loss},         {"q_loss", st.q_loss},
                                {"theta_l", st.theta_l}};
    if (grid::is_dc_line(c.lines[l].kind)) o["current"] = st.current;
    if (c.lines[l].kind == LineKind::SVC) o["b"] = st.b;
    lines.push_back(std::move(o));
  }
  auto& gens = j["generators"] = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    gens.push_back({{"id", c.generators[g].id}, {"p", pt.generators[g].p}, {"q", pt.generators[g].q}});
  }
  auto& wind = j["wind_farms"] = nlohmann::ordered_json::array();
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    wind.push_back({{"id", c.wind_farms[w].id}, {"p", pt.wind[w].p}, {"q", pt.wind[w].q}});
  }
  auto& convs = j["converters"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < c.converters.size(); ++k) {
    const auto& st = pt.converters[k];
    convs.push_back({{"id", c.converters[k].id}, {"p_csh", st.p_csh}, {"p_sw", st.p_sw}, {"p_cse", st.p_cse}});
  }
  return j;
}

nlohmann::ordered_json to_json(const GapReport& gaps) {
  nlohmann::ordered_json j;
  for (auto f : kGapFamilies) j[std::string(label(f))] = gaps[f];
  return j;
}

std::string gap_csv(std::string_view case_name, ModelKind kind, const GapReport& gaps, bool with_header) {
  std::ostringstream os;
  if (with_header) os << "case,model,family,description,max_abs_gap\n";
  os << std::setprecision(6) << std::scientific;
  for (auto f : kGapFamilies) {
    os << case_name << ',' << to_string(kind) << ',' << label(f) << ',' << description(f) << ',' << gaps[f] << '\n';
  }
  return os.str();
}

}  // namespace windflow::acopf
