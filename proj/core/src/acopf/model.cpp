#include "windflow/acopf/model.hpp"

#include <cmath>
#include <stdexcept>

namespace windflow::acopf {
namespace {

using conic::AffineExpr;
using conic::ConicProgram;
using conic::EqRowId;
using conic::Term;
using conic::VarId;
using grid::BusKind;
using grid::LineKind;

void require_valid(const grid::GridCase& c) {
  const auto report = grid::validate(c);
  if (report.ok()) return;
  std::string msg = "invalid case";
  for (const auto& v : report.violations) msg += "\n  - " + v;
  throw std::invalid_argument(msg);
}

// Naming helper for `<kind>:<scenario>:<element>`.
struct Namer {
  const std::string& tag;
  [[nodiscard]] std::string operator()(std::string_view kind, std::string_view element) const {
    std::string s(kind);
    s += ':';
    s += tag;
    s += ':';
    s += element;
    return s;
  }
};

BlockHandles empty_handles(const grid::GridCase& c) {
  const auto nb = c.buses.size();
  const auto nl = c.lines.size();
  BlockHandles h;
  h.V.resize(nb);
  h.theta.resize(nb);
  h.p_s.resize(nl);
  h.q_s.resize(nl);
  h.p_loss.resize(nl);
  h.q_loss.resize(nl);
  h.theta_l.resize(nl);
  h.q_gen.resize(c.generators.size());
  h.p_wind.resize(c.wind_farms.size());
  h.q_wind.resize(c.wind_farms.size());
  h.p_shed.resize(nb);
  h.p_spill.resize(nb);
  h.q_shed_up.resize(nb);
  h.q_shed_down.resize(nb);
  h.p_balance.resize(nb);
  h.q_balance.resize(nb);
  return h;
}

std::vector<WindLimits> wind_windows(const grid::GridCase& c, const BlockSpec& spec) {
  if (spec.wind.empty()) {
    std::vector<WindLimits> w;
    for (const auto& f : c.wind_farms) w.push_back(nominal_wind(f, c.s_base));
    return w;
  }
  if (spec.wind.size() != c.wind_farms.size()) {
    throw std::invalid_argument("wind windows given for " + std::to_string(spec.wind.size()) + " farms, case has " +
                                std::to_string(c.wind_farms.size()));
  }
  return spec.wind;
}

// Injections shared by both models: generators, wind and (optionally) slacks.
// Appends their terms to the bus balance rows.
void add_injections(ConicProgram& prog, const grid::GridCase& c, const grid::Topology& topo,
                    std::span<const VarId> p_gen, const BlockSpec& spec, bool reactive, BlockHandles& h,
                    std::vector<std::vector<Term>>& p_rows, std::vector<std::vector<Term>>& q_rows) {
  const Namer n{spec.scenario};
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    const auto& gen = c.generators[g];
    const auto b = static_cast<std::size_t>(c.bus_index(gen.bus));
    p_rows[b].push_back({p_gen[g], 1.0});
    if (reactive) {
      h.q_gen[g] = prog.add_variable(n("q_gen", gen.id), gen.q_min, gen.q_max);
      q_rows[b].push_back({h.q_gen[g], 1.0});
    }
  }
  const auto windows = wind_windows(c, spec);
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    const auto& farm = c.wind_farms[w];
    const auto b = static_cast<std::size_t>(c.bus_index(farm.bus));
    h.p_wind[w] = prog.add_variable(n("p_wind", farm.id), 0.0, windows[w].p_max);
    if (farm.cost_c1 != 0.0) prog.add_linear_cost(h.p_wind[w], spec.weight * farm.cost_c1);
    p_rows[b].push_back({h.p_wind[w], 1.0});
    if (reactive) {
      h.q_wind[w] = prog.add_variable(n("q_wind", farm.id), windows[w].q_min, windows[w].q_max);
      q_rows[b].push_back({h.q_wind[w], 1.0});
    }
  }
  if (!spec.shedding) return;
  const double price = spec.weight * c.voll;
  for (std::size_t b = 0; b < c.buses.size(); ++b) {
    const auto& bus = c.buses[b];
    if (bus.kind != BusKind::AC || topo.svc_terminal[b]) continue;
    // Unserved energy at VoLL. Not capped by the local load: with a low
    // stage-1 dispatch the converters' no-load losses must still be covered.
    h.p_shed[b] = prog.add_variable(n("p_shed", bus.id), 0.0);
    prog.add_linear_cost(h.p_shed[b], price);
    p_rows[b].push_back({h.p_shed[b], 1.0});
    double installed = 0.0;
    for (int g : topo.generators_at_bus[b]) installed += c.generators[static_cast<std::size_t>(g)].p_max;
    if (installed > 0.0) {
      h.p_spill[b] = prog.add_variable(n("p_spill", bus.id), 0.0, installed);
      prog.add_linear_cost(h.p_spill[b], price);
      p_rows[b].push_back({h.p_spill[b], -1.0});
    }
    if (reactive) {
      h.q_shed_up[b] = prog.add_variable(n("q_slack_up", bus.id), 0.0);
      h.q_shed_down[b] = prog.add_variable(n("q_slack_down", bus.id), 0.0);
      prog.add_linear_cost(h.q_shed_up[b], price);
      prog.add_linear_cost(h.q_shed_down[b], price);
      q_rows[b].push_back({h.q_shed_up[b], 1.0});
      q_rows[b].push_back({h.q_shed_down[b], -1.0});
    }
  }
}

double value_or_zero(const conic::Solution& sol, VarId v) {
  return v.index >= 0 ? sol.value(v) : 0.0;
}

}  // namespace

std::string_view to_string(ModelKind k) { return k == ModelKind::Soc ? "soc" : "dc"; }

WindLimits wind_window(double p_max_pu, double power_factor_min) {
  const double q = p_max_pu * std::tan(std::acos(power_factor_min));
  return {p_max_pu, -q, q};
}

WindLimits nominal_wind(const grid::WindFarm& farm, double s_base) {
  return wind_window(farm.available_mw() / s_base, farm.power_factor_min);
}

std::vector<VarId> add_generator_dispatch(ConicProgram& prog, const grid::GridCase& c) {
  std::vector<VarId> p;
  p.reserve(c.generators.size());
  for (const auto& g : c.generators) {
    const VarId v = prog.add_variable("p_gen:" + g.id, g.p_min, g.p_max);
    if (g.cost_c2 > 0.0) prog.add_quadratic_cost(v, g.cost_c2);
    if (g.cost_c1 != 0.0) prog.add_linear_cost(v, g.cost_c1);
    prog.add_constant_cost(g.cost_c0);
    p.push_back(v);
  }
  return p;
}

BlockHandles add_soc_block(ConicProgram& prog, const grid::GridCase& c, const grid::Topology& topo,
                           std::span<const VarId> p_gen, const BlockSpec& spec) {
  const Namer n{spec.scenario};
  BlockHandles h = empty_handles(c);
  const auto nb = c.buses.size();
  std::vector<std::vector<Term>> p_rows(nb);
  std::vector<std::vector<Term>> q_rows(nb);

  for (std::size_t b = 0; b < nb; ++b) {
    if (topo.svc_terminal[b]) continue;
    const auto& bus = c.buses[b];
    h.V[b] = prog.add_variable(n("V", bus.id), bus.v_min_sq, bus.v_max_sq);
    // Shunts: G V leaves the bus, B V enters as reactive injection.
    if (bus.shunt_g != 0.0) p_rows[b].push_back({h.V[b], -bus.shunt_g});
    if (bus.shunt_b != 0.0 && bus.kind != BusKind::DC) q_rows[b].push_back({h.V[b], bus.shunt_b});
  }

  add_injections(prog, c, topo, p_gen, spec, true, h, p_rows, q_rows);

  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& line = c.lines[l];
    const auto s = static_cast<std::size_t>(topo.line_from[l]);
    const auto r = static_cast<std::size_t>(topo.line_to[l]);
    const double K = line.capacity_sq;
    const double R = line.r;
    const double X = line.x;
    const double cap = std::sqrt(K);
    switch (line.kind) {
      case LineKind::AC:
      case LineKind::PC_TRANSFORMER: {
        h.p_s[l] = prog.add_variable(n("p_s", line.id));
        h.q_s[l] = prog.add_variable(n("q_s", line.id));
        h.p_loss[l] = prog.add_variable(n("p_loss", line.id), 0.0);
        h.q_loss[l] = prog.add_variable(n("q_loss", line.id), 0.0, K * X);
        h.theta_l[l] = prog.add_variable(n("theta_l", line.id));
        if (spec.loss_penalty > 0.0) prog.add_linear_cost(h.q_loss[l], spec.weight * spec.loss_penalty);
        prog.add_equality(n("drop", line.id),
                          {{h.V[s], 1.0},
                           {h.V[r], -1.0},
                           {h.p_s[l], -2.0 * R},
                           {h.q_s[l], -2.0 * X},
                           {h.p_loss[l], R},
                           {h.q_loss[l], X}},
                          0.0);
        prog.add_equality(n("angle", line.id), {{h.theta_l[l], 1.0}, {h.p_s[l], -X}, {h.q_s[l], R}}, 0.0);
        prog.add_equality(n("loss_coupling", line.id), {{h.p_loss[l], X}, {h.q_loss[l], -R}}, 0.0);
        const double k = std::sqrt(2.0 * X);
        prog.add_rotated_cone(n("loss", line.id), AffineExpr::of(h.q_loss[l]), AffineExpr::of(h.V[s]),
                              {AffineExpr::of(h.p_s[l], k), AffineExpr::of(h.q_s[l], k)});
        prog.add_rotated_cone(n("thermal", line.id), AffineExpr::constant_value(K / 2.0),
                              AffineExpr::constant_value(1.0), {AffineExpr::of(h.p_s[l]), AffineExpr::of(h.q_s[l])});
        p_rows[s].push_back({h.p_s[l], -1.0});
        p_rows[r].push_back({h.p_s[l], 1.0});
        p_rows[r].push_back({h.p_loss[l], -1.0});
        q_rows[s].push_back({h.q_s[l], -1.0});
        q_rows[r].push_back({h.q_s[l], 1.0});
        q_rows[r].push_back({h.q_loss[l], -1.0});
        break;
      }
      case LineKind::DC_MONO:
      case LineKind::DC_BI: {
        const bool bi = line.kind == LineKind::DC_BI;
        h.p_s[l] = prog.add_variable(n("p_s", line.id), -cap, cap);
        h.p_loss[l] = prog.add_variable(n("p_loss", line.id), 0.0, bi ? K * R / 4.0 : K * R);
        prog.add_equality(n("drop", line.id),
                          {{h.V[s], 1.0}, {h.V[r], -1.0}, {h.p_s[l], (bi ? -1.0 : -2.0) * R}, {h.p_loss[l], R}},
                          0.0);
        const double k = bi ? std::sqrt(R / 2.0) : std::sqrt(2.0 * R);
        prog.add_rotated_cone(n("loss", line.id), AffineExpr::of(h.p_loss[l]), AffineExpr::of(h.V[s]),
                              {AffineExpr::of(h.p_s[l], k)});
        p_rows[s].push_back({h.p_s[l], -1.0});
        p_rows[r].push_back({h.p_s[l], 1.0});
        p_rows[r].push_back({h.p_loss[l], -1.0});
        break;
      }
      case LineKind::VSC_CONVERTER: {
        // DC bus -> PC bus. p_s leaves the DC bus; the PC bus receives
        // p_s minus the converter losses. q_s is the converter's reactive
        // output at the PC bus.
        const int k = topo.converter_of_line[l];
        const auto& links = topo.converters[static_cast<std::size_t>(k)];
        const auto& conv = c.converters[static_cast<std::size_t>(k)];
        h.p_s[l] = prog.add_variable(n("p_s", line.id));
        h.q_s[l] = prog.add_variable(n("q_s", line.id));
        h.p_loss[l] = prog.add_variable(n("p_loss", line.id), 0.0);
        prog.add_rotated_cone(n("thermal", line.id), AffineExpr::constant_value(K / 2.0),
                              AffineExpr::constant_value(1.0), {AffineExpr::of(h.p_s[l]), AffineExpr::of(h.q_s[l])});
        // Shunt and switching losses are linear in the DC-side V; the series
        // loss scales the transformer's reactive loss by R_Cse / X_T.
        const auto dc = static_cast<std::size_t>(links.dc_bus);
        const auto pc = static_cast<std::size_t>(links.pc_bus);
        const auto& tr = c.lines[static_cast<std::size_t>(links.transformer)];
        double v_coef = 1.0 / conv.r_shunt;
        if (conv.r_sw) v_coef += 1.0 / *conv.r_sw;
        prog.add_equality(n("conv_loss", conv.id),
                          {{h.p_loss[l], 1.0},
                           {h.V[dc], -v_coef},
                           {h.q_loss[static_cast<std::size_t>(links.transformer)], -line.r / tr.x}},
                          0.0);
        prog.add_inequality(n("mod_lo", conv.id), {{h.V[pc], 8.0 / conv.m_sq_max}, {h.V[dc], -1.0}}, 0.0);
        prog.add_inequality(n("mod_hi", conv.id), {{h.V[dc], 1.0}, {h.V[pc], -8.0 / conv.m_sq_min}}, 0.0);
        p_rows[s].push_back({h.p_s[l], -1.0});
        p_rows[r].push_back({h.p_s[l], 1.0});
        p_rows[r].push_back({h.p_loss[l], -1.0});
        q_rows[r].push_back({h.q_s[l], 1.0});
        break;
      }
      case LineKind::SVC: {
        h.q_s[l] = prog.add_variable(n("q_s", line.id), -cap, cap);
        prog.add_inequality(n("svc_lo", line.id), {{h.q_s[l], -1.0}, {h.V[s], -line.b_max}}, 0.0);
        prog.add_inequality(n("svc_hi", line.id), {{h.q_s[l], 1.0}, {h.V[s], line.b_min}}, 0.0);
        q_rows[s].push_back({h.q_s[l], -1.0});
        break;
      }
    }
  }

  for (std::size_t b = 0; b < nb; ++b) {
    if (topo.svc_terminal[b]) continue;
    const auto& bus = c.buses[b];
    h.p_balance[b] = prog.add_equality(n("p_bal", bus.id), std::move(p_rows[b]), bus.p_load);
    if (bus.kind != BusKind::DC) h.q_balance[b] = prog.add_equality(n("q_bal", bus.id), std::move(q_rows[b]), bus.q_load);
  }
  return h;
}

BlockHandles add_dc_block(ConicProgram& prog, const grid::GridCase& c, const grid::Topology& topo,
                          std::span<const VarId> p_gen, const BlockSpec& spec) {
  const Namer n{spec.scenario};
  BlockHandles h = empty_handles(c);
  const auto nb = c.buses.size();
  std::vector<std::vector<Term>> p_rows(nb);
  std::vector<std::vector<Term>> q_rows(nb);

  std::vector<bool> slack(nb, false);
  for (int s : topo.island_slack) slack[static_cast<std::size_t>(s)] = true;
  for (std::size_t b = 0; b < nb; ++b) {
    if (topo.svc_terminal[b] || c.buses[b].kind == BusKind::DC) continue;
    const double fix = slack[b] ? 0.0 : conic::kInfinity;
    h.theta[b] = prog.add_variable(n("theta", c.buses[b].id), -fix, fix);
  }

  add_injections(prog, c, topo, p_gen, spec, false, h, p_rows, q_rows);

  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    const auto& line = c.lines[l];
    if (line.kind == LineKind::SVC) continue;
    const auto s = static_cast<std::size_t>(topo.line_from[l]);
    const auto r = static_cast<std::size_t>(topo.line_to[l]);
    const double cap = std::sqrt(line.capacity_sq);
    h.p_s[l] = prog.add_variable(n("p_s", line.id), -cap, cap);
    if (grid::is_ac_branch(line.kind)) {
      prog.add_equality(n("flow", line.id), {{h.p_s[l], line.x}, {h.theta[s], -1.0}, {h.theta[r], 1.0}}, 0.0);
    }
    p_rows[s].push_back({h.p_s[l], -1.0});
    p_rows[r].push_back({h.p_s[l], 1.0});
  }

  for (std::size_t b = 0; b < nb; ++b) {
    if (topo.svc_terminal[b]) continue;
    const auto& bus = c.buses[b];
    // V = 1: the conductance draw is a constant.
    h.p_balance[b] = prog.add_equality(n("p_bal", bus.id), std::move(p_rows[b]), bus.p_load + bus.shunt_g);
  }
  return h;
}

double block_cost(const grid::GridCase& c, const BlockHandles& h, const BlockSpec& spec, const conic::Solution& sol) {
  double cost = 0.0;
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) cost += c.wind_farms[w].cost_c1 * value_or_zero(sol, h.p_wind[w]);
  double slack = 0.0;
  for (std::size_t b = 0; b < c.buses.size(); ++b) {
    slack += value_or_zero(sol, h.p_shed[b]) + value_or_zero(sol, h.p_spill[b]) + value_or_zero(sol, h.q_shed_up[b]) +
             value_or_zero(sol, h.q_shed_down[b]);
  }
  cost += c.voll * slack;
  if (spec.loss_penalty > 0.0) {
    for (std::size_t l = 0; l < c.lines.size(); ++l) {
      if (grid::is_ac_branch(c.lines[l].kind)) cost += spec.loss_penalty * value_or_zero(sol, h.q_loss[l]);
    }
  }
  return cost;
}

OpfModel build_soc_acopf(const grid::GridCase& c, const OpfOptions& opts) {
  require_valid(c);
  const auto topo = grid::resolve(c);
  OpfModel m;
  m.kind = ModelKind::Soc;
  m.p_gen = add_generator_dispatch(m.program, c);
  BlockSpec spec;
  spec.shedding = opts.shedding;
  spec.loss_penalty = opts.loss_penalty;
  spec.wind = opts.wind;
  m.block = add_soc_block(m.program, c, topo, m.p_gen, spec);
  return m;
}

OpfModel build_dc_opf(const grid::GridCase& c, const OpfOptions& opts) {
  require_valid(c);
  const auto topo = grid::resolve(c);
  OpfModel m;
  m.kind = ModelKind::Dc;
  m.p_gen = add_generator_dispatch(m.program, c);
  BlockSpec spec;
  spec.shedding = opts.shedding;
  spec.loss_penalty = opts.loss_penalty;
  spec.wind = opts.wind;
  m.block = add_dc_block(m.program, c, topo, m.p_gen, spec);
  return m;
}

}  // namespace windflow::acopf
