#include "windflow/stochastic/two_stage.hpp"

#include <cmath>
#include <stdexcept>

namespace windflow::stochastic {
namespace {

double value_or_zero(const conic::Solution& sol, conic::VarId v) { return v.index >= 0 ? sol.value(v) : 0.0; }

}  // namespace

std::vector<std::vector<acopf::WindLimits>> align_windows(const grid::GridCase& c, const wind::ScenarioSet& s) {
  const auto nf = c.wind_farms.size();
  if (s.farm_ids.size() != nf) {
    throw std::invalid_argument("scenario file has " + std::to_string(s.farm_ids.size()) + " farms, case '" + c.name +
                                "' has " + std::to_string(nf));
  }
  std::vector<std::size_t> column(nf);
  for (std::size_t w = 0; w < nf; ++w) {
    const auto& id = c.wind_farms[w].id;
    std::size_t k = 0;
    while (k < nf && s.farm_ids[k] != id) ++k;
    if (k == nf) throw std::invalid_argument("scenario file has no windows for wind farm '" + id + "'");
    column[w] = k;
  }
  std::vector<std::vector<acopf::WindLimits>> out;
  out.reserve(s.size());
  for (const auto& sc : s.scenarios) {
    std::vector<acopf::WindLimits> row(nf);
    for (std::size_t w = 0; w < nf; ++w) row[w] = sc.farms[column[w]];
    out.push_back(std::move(row));
  }
  return out;
}

TwoStageModel build_two_stage(const grid::GridCase& c, const wind::ScenarioSet& s, const StochasticOptions& opts) {
  const auto report = grid::validate(c);
  if (!report.ok()) throw std::invalid_argument("invalid case '" + c.name + "': " + report.violations.front());
  if (s.scenarios.empty()) throw std::invalid_argument("empty scenario set");
  const auto windows = align_windows(c, s);

  TwoStageModel m;
  m.topo = grid::resolve(c);
  m.p_gen = acopf::add_generator_dispatch(m.program, c);
  for (std::size_t j = 0; j < s.size(); ++j) {
    acopf::BlockSpec spec;
    spec.scenario = std::to_string(s.scenarios[j].j);
    spec.weight = s.scenarios[j].pi;
    spec.wind = windows[j];
    spec.shedding = opts.shedding;
    spec.loss_penalty = opts.loss_penalty;
    m.blocks.push_back(acopf::add_soc_block(m.program, c, m.topo, m.p_gen, spec));
    m.specs.push_back(std::move(spec));
    m.scenario_j.push_back(s.scenarios[j].j);
  }
  return m;
}

SizeCounts size_counts(const grid::GridCase& c, long long scenarios) {
  SizeCounts n;
  n.J = scenarios;
  n.L = static_cast<long long>(c.lines.size());
  n.G = static_cast<long long>(c.generators.size());
  n.E = static_cast<long long>(c.wind_farms.size());
  n.I = static_cast<long long>(c.buses.size());
  for (const auto& b : c.buses) (b.kind == grid::BusKind::DC ? n.i_dc : n.i_ac) += 1;
  for (const auto& l : c.lines) {
    switch (l.kind) {
      case grid::LineKind::AC:
      case grid::LineKind::PC_TRANSFORMER: ++n.l_ac; break;
      case grid::LineKind::DC_MONO:
      case grid::LineKind::DC_BI:
      case grid::LineKind::VSC_CONVERTER: ++n.l_dc; break;
      case grid::LineKind::SVC: ++n.l_svc; break;
    }
  }
  for (const auto& cv : c.converters) {
    ++n.conv;
    ++n.csh;
    if (cv.r_sw) ++n.sw;
  }
  return n;
}

long long formula_variables(const SizeCounts& n) { return n.J * (5 * n.L + n.G + 2 * n.E + n.I) + n.G; }

long long formula_constraints(const SizeCounts& n) {
  return n.J * (2 * n.i_ac + 5 * n.l_ac + n.i_dc + 5 * n.l_dc + n.csh + n.sw + 2 * n.conv + 2 * n.l_svc + 2 * n.E +
                2 * n.I) +
         2 * n.G;
}

ModelSize model_size(const grid::GridCase& c, const TwoStageModel& m) {
  ModelSize s;
  s.counts = size_counts(c, static_cast<long long>(m.blocks.size()));
  s.formula_variables = formula_variables(s.counts);
  s.formula_constraints = formula_constraints(s.counts);
  s.variables = static_cast<long long>(m.program.num_variables());
  s.equalities = static_cast<long long>(m.program.num_equalities());
  s.inequalities = static_cast<long long>(m.program.num_inequalities());
  s.cones = static_cast<long long>(m.program.num_cones());
  for (const auto& v : m.program.variables()) {
    s.bounds += (std::isfinite(v.lower) ? 1 : 0) + (std::isfinite(v.upper) ? 1 : 0);
  }
  return s;
}

nlohmann::ordered_json to_json(const ModelSize& s) {
  const auto& n = s.counts;
  nlohmann::ordered_json j;
  j["cardinalities"] = {{"J", n.J},       {"L", n.L},       {"G", n.G},       {"E", n.E},     {"I", n.I},
                        {"i_ac", n.i_ac}, {"l_ac", n.l_ac}, {"i_dc", n.i_dc}, {"l_dc", n.l_dc}, {"csh", n.csh},
                        {"sw", n.sw},     {"conv", n.conv}, {"l_svc", n.l_svc}};
  j["formula"] = {{"variables", s.formula_variables}, {"constraints", s.formula_constraints}};
  j["actual"] = {{"variables", s.variables},     {"equalities", s.equalities}, {"inequalities", s.inequalities},
                 {"cones", s.cones},             {"constraints", s.constraints()}, {"finite_bounds", s.bounds}};
  j["mapping"] =
      "formula: five flow/loss/angle variables per line, reactive output per generator, two per wind farm and one "
      "squared voltage per bus in each scenario; actual: DC lines carry two variables and SVCs one, every scenario "
      "adds VoLL slacks (unserved energy, spill, reactive up/down), and bounds are kept as variable bounds rather "
      "than rows. Constraints are equality rows, inequality rows and cones.";
  return j;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::SingleStage: return "single";
    case Method::SerialBda: return "serial-bda";
    case Method::ParallelBda: return "parallel-bda";
  }
  return "?";
}

double StochasticSolution::total_shed() const {
  double s = 0.0;
  for (const auto& sc : scenarios) s += sc.pi * sc.p_shed;
  return s;
}

double stage1_cost(const grid::GridCase& c, std::span<const double> p) {
  double cost = 0.0;
  for (std::size_t g = 0; g < c.generators.size(); ++g) cost += c.generators[g].cost(p[g]);
  return cost;
}

ScenarioSummary summarize_block(const grid::GridCase& c, const acopf::BlockSpec& spec, const acopf::BlockHandles& h,
                                const conic::Solution& sol, int j, double pi) {
  ScenarioSummary s;
  s.j = j;
  s.pi = pi;
  s.recourse_cost = acopf::block_cost(c, h, spec, sol);
  for (std::size_t b = 0; b < c.buses.size(); ++b) {
    s.p_shed += value_or_zero(sol, h.p_shed[b]);
    s.p_spill += value_or_zero(sol, h.p_spill[b]);
    s.q_slack += value_or_zero(sol, h.q_shed_up[b]) + value_or_zero(sol, h.q_shed_down[b]);
  }
  const auto windows = spec.wind.empty() ? std::vector<acopf::WindLimits>{} : spec.wind;
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    const double avail = windows.empty() ? acopf::nominal_wind(c.wind_farms[w], c.s_base).p_max : windows[w].p_max;
    const double p = value_or_zero(sol, h.p_wind[w]);
    s.wind += p;
    s.curtailment += std::max(0.0, avail - p);
  }
  return s;
}

StochasticSolution solve_single_stage(const grid::GridCase& c, const TwoStageModel& m, const StochasticOptions& opts) {
  const auto solver = conic::make_solver(opts.backend);
  const auto sol = solver->solve(m.program, opts.solver);
  StochasticSolution out;
  out.method = Method::SingleStage;
  out.status = sol.status;
  out.iterations = sol.info.iterations;
  if (!sol.optimal()) return out;
  out.objective = sol.objective_value;
  for (const auto v : m.p_gen) out.stage1.push_back(sol.value(v));
  out.stage1_cost = stage1_cost(c, out.stage1);
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    auto sum = summarize_block(c, m.specs[j], m.blocks[j], sol, m.scenario_j[j], m.specs[j].weight);
    out.expected_recourse += sum.pi * sum.recourse_cost;
    out.scenarios.push_back(sum);
    out.points.push_back(acopf::recover_point(c, m.topo, acopf::ModelKind::Soc, m.blocks[j], m.p_gen, sol));
  }
  return out;
}

StochasticSolution evaluate_dispatch(const grid::GridCase& c, const wind::ScenarioSet& s, std::span<const double> p,
                                     StochasticOptions opts) {
  if (p.size() != c.generators.size()) throw std::invalid_argument("dispatch size does not match the generators");
  opts.shedding = true;
  auto m = build_two_stage(c, s, opts);
  for (std::size_t g = 0; g < p.size(); ++g) m.program.set_bounds(m.p_gen[g], p[g], p[g]);
  return solve_single_stage(c, m, opts);
}

wind::ScenarioSet expected_value_scenario(const wind::ScenarioSet& s) {
  if (s.scenarios.empty()) throw std::invalid_argument("empty scenario set");
  std::vector<acopf::WindLimits> mean(s.farm_ids.size());
  for (const auto& sc : s.scenarios) {
    for (std::size_t e = 0; e < mean.size(); ++e) {
      mean[e].p_max += sc.pi * sc.farms[e].p_max;
      mean[e].q_max += sc.pi * sc.farms[e].q_max;
      mean[e].q_min += sc.pi * sc.farms[e].q_min;
    }
  }
  return wind::make_scenario_set(s.farm_ids, {{1.0, mean}});
}

VssResult compute_vss(const grid::GridCase& c, const wind::ScenarioSet& s, const StochasticOptions& opts) {
  auto require = [](const StochasticSolution& sol, const char* what) {
    if (!sol.optimal()) {
      throw std::runtime_error(std::string(what) + " solve failed: " + std::string(conic::to_string(sol.status)));
    }
  };
  VssResult r;
  const auto ev = solve_single_stage(c, build_two_stage(c, expected_value_scenario(s), opts), opts);
  require(ev, "expected-value");
  r.expected_value_dispatch = ev.stage1;
  r.cost_expected_value_model = ev.objective;
  const auto fixed = evaluate_dispatch(c, s, ev.stage1, opts);
  require(fixed, "fixed-dispatch");
  r.cost_deterministic = fixed.objective;
  const auto sto = solve_single_stage(c, build_two_stage(c, s, opts), opts);
  require(sto, "stochastic");
  r.cost_stochastic = sto.objective;
  r.vss = r.cost_deterministic - r.cost_stochastic;
  return r;
}

nlohmann::ordered_json to_json(const grid::GridCase& c, const StochasticSolution& s) {
  nlohmann::ordered_json j;
  j["method"] = to_string(s.method);
  j["status"] = conic::to_string(s.status);
  j["converged"] = s.converged;
  j["objective"] = s.objective;
  j["stage1_cost"] = s.stage1_cost;
  j["expected_recourse"] = s.expected_recourse;
  if (s.upper_bound) j["upper_bound"] = *s.upper_bound;
  if (s.lower_bound) j["lower_bound"] = *s.lower_bound;
  j["iterations"] = s.iterations;
  auto& disp = j["stage1_dispatch"] = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < s.stage1.size() && g < c.generators.size(); ++g) {
    disp.push_back({{"id", c.generators[g].id}, {"p_pu", s.stage1[g]}, {"p_mw", s.stage1[g] * c.s_base}});
  }
  j["expected_shed_pu"] = s.total_shed();
  auto& arr = j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& sc : s.scenarios) {
    arr.push_back({{"j", sc.j},
                   {"pi", sc.pi},
                   {"recourse_cost", sc.recourse_cost},
                   {"objective_share", sc.pi * sc.recourse_cost},
                   {"p_shed_pu", sc.p_shed},
                   {"p_spill_pu", sc.p_spill},
                   {"q_slack_pu", sc.q_slack},
                   {"wind_pu", sc.wind},
                   {"curtailment_pu", sc.curtailment}});
  }
  return j;
}

nlohmann::ordered_json to_json(const VssResult& v) {
  nlohmann::ordered_json j;
  j["cost_deterministic"] = v.cost_deterministic;
  j["cost_stochastic"] = v.cost_stochastic;
  j["vss"] = v.vss;
  j["cost_expected_value_model"] = v.cost_expected_value_model;
  j["expected_value_dispatch_pu"] = v.expected_value_dispatch;
  return j;
}

}  // namespace windflow::stochastic
