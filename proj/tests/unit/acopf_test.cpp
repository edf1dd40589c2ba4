#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ac_oracles.hpp"
#include "windflow/acopf/model.hpp"
#include "windflow/acopf/point.hpp"
#include "windflow/conic/check.hpp"
#include "windflow/conic/solver.hpp"
#include "windflow/grid/io.hpp"

namespace wa = windflow::acopf;
namespace wc = windflow::conic;
namespace wg = windflow::grid;

namespace {

wg::GridCase fixture(const std::string& name) {
  return wg::load_case_file(std::string(WINDFLOW_TEST_DATA_DIR) + "/cases/" + name + ".json");
}

struct Solved {
  wa::OpfModel model;
  wc::Solution solution;
  wa::OperatingPoint point;
};

Solved solve(const wg::GridCase& c, wa::ModelKind kind, const wa::OpfOptions& opts = {}) {
  Solved s{kind == wa::ModelKind::Soc ? wa::build_soc_acopf(c, opts) : wa::build_dc_opf(c, opts), {}, {}};
  s.solution = wc::solve(s.model.program);
  EXPECT_TRUE(s.solution.optimal()) << c.name;
  if (s.solution.optimal()) s.point = wa::recover_physical(c, s.model, s.solution);
  return s;
}

int line_index(const wg::GridCase& c, const std::string& id) {
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    if (c.lines[l].id == id) return static_cast<int>(l);
  }
  return -1;
}

// Two-bus case with a resistive line and a reactive load.
wg::GridCase lossy_two_bus() {
  auto c = fixture("two_bus");
  c.lines[0].r = 0.02;
  c.buses[1].q_load = 0.3;
  return c;
}

}  // namespace

TEST(SocAcopf, TwoBusLosslessLine) {
  const auto c = fixture("two_bus");
  const auto s = solve(c, wa::ModelKind::Soc);
  EXPECT_NEAR(s.point.generators[0].p, 1.0, 1e-6);
  EXPECT_NEAR(s.point.lines[0].p_loss, 0.0, 1e-8);
  // theta_l = X p_s - R q_s with R = 0.
  EXPECT_NEAR(s.point.lines[0].theta_l, 0.1, 1e-6);
  EXPECT_NEAR(s.point.buses[0].theta, 0.0, 1e-15);
  EXPECT_NEAR(s.point.buses[1].theta, -0.1, 1e-6);
}

TEST(SocAcopf, DcLineLossConesMatchQuadraticBounds) {
  const auto c = fixture("hybrid30");
  const auto m = wa::build_soc_acopf(c);
  // At p_s = 1, V_s = 1 the cone must accept p_loss = R (monopole) or R/4
  // (bipole) and reject anything smaller.
  for (const auto& [id, factor] : {std::pair<std::string, double>{"DC42", 1.0}, {"DC14", 0.25}}) {
    const int l = line_index(c, id);
    ASSERT_GE(l, 0);
    const double R = c.lines[static_cast<std::size_t>(l)].r;
    const auto& cones = m.program.cones();
    const auto it = std::find_if(cones.begin(), cones.end(),
                                 [&](const wc::RotatedCone& k) { return k.name == "loss:0:" + id; });
    ASSERT_NE(it, cones.end());
    std::vector<double> x(m.program.num_variables(), 0.0);
    x[static_cast<std::size_t>(m.block.p_s[static_cast<std::size_t>(l)].index)] = 1.0;
    x[static_cast<std::size_t>(m.block.V[static_cast<std::size_t>(c.bus_index(c.lines[static_cast<std::size_t>(l)].from_bus))].index)] = 1.0;
    auto margin = [&](double p_loss) {
      x[static_cast<std::size_t>(m.block.p_loss[static_cast<std::size_t>(l)].index)] = p_loss;
      double z2 = 0.0;
      for (const auto& z : it->z) z2 += std::pow(wc::evaluate(z, x), 2);
      return 2.0 * wc::evaluate(it->u, x) * wc::evaluate(it->w, x) - z2;
    };
    EXPECT_NEAR(margin(factor * R), 0.0, 1e-15) << id;
    EXPECT_LT(margin(0.99 * factor * R), 0.0) << id;
  }
}

TEST(SocAcopf, LossCouplingHoldsAtOptimum) {
  for (const char* name : {"ieee14", "ieee30", "hybrid30"}) {
    const auto c = fixture(name);
    const auto s = solve(c, wa::ModelKind::Soc);
    for (std::size_t l = 0; l < c.lines.size(); ++l) {
      if (!wg::is_ac_branch(c.lines[l].kind)) continue;
      const auto& st = s.point.lines[l];
      EXPECT_NEAR(st.p_loss * c.lines[l].x, st.q_loss * c.lines[l].r, 1e-9) << name << " " << c.lines[l].id;
    }
  }
}

TEST(SocAcopf, OptimumSatisfiesProgramWithinTolerance) {
  for (const char* name : {"ieee14", "hybrid30", "small_wind"}) {
    const auto c = fixture(name);
    const auto s = solve(c, wa::ModelKind::Soc);
    const auto rep = wc::check_solution(s.model.program, s.solution);
    EXPECT_LE(rep.max(), 1e-6) << name;
  }
}

TEST(SocAcopf, CasesAreTightAtTheOptimum) {
  for (const char* name : {"ieee14", "ieee30", "hybrid30"}) {
    const auto c = fixture(name);
    const auto s = solve(c, wa::ModelKind::Soc);
    EXPECT_TRUE(wa::slack_loss_cones(c, s.point).empty()) << name;
  }
}

TEST(SocAcopf, BalancesAreExactAndBeatDcOpf) {
  for (const char* name : {"ieee14", "ieee30"}) {
    const auto c = fixture(name);
    const auto soc = wa::feasibility_gap(c, solve(c, wa::ModelKind::Soc).point);
    const auto dc = wa::feasibility_gap(c, solve(c, wa::ModelKind::Dc).point);
    EXPECT_LE(soc[wa::GapFamily::PBalance], 1e-6) << name;
    EXPECT_LE(soc[wa::GapFamily::QBalance], 1e-6) << name;
    for (auto f : {wa::GapFamily::PBalance, wa::GapFamily::QBalance, wa::GapFamily::PLoss, wa::GapFamily::QLoss}) {
      EXPECT_LE(soc[f], dc[f] + 1e-9) << name << " " << wa::label(f);
    }
    EXPECT_GT(dc[wa::GapFamily::PLoss], soc[wa::GapFamily::PLoss]) << name;
  }
}

TEST(SocAcopf, InvalidCaseIsRejected) {
  auto c = fixture("two_bus");
  c.lines[0].x = 0.0;
  EXPECT_THROW((void)wa::build_soc_acopf(c), std::invalid_argument);
  EXPECT_THROW((void)wa::build_dc_opf(c), std::invalid_argument);
}

TEST(SocAcopf, RowsFollowTheNamingScheme) {
  const auto m = wa::build_soc_acopf(fixture("ieee14"));
  EXPECT_TRUE(m.program.find_equality("p_bal:0:4").has_value());
  EXPECT_TRUE(m.program.find_equality("drop:0:L1").has_value());
  EXPECT_TRUE(m.program.find_variable("p_gen:G1").has_value());
  EXPECT_TRUE(m.program.find_variable("V:0:14").has_value());
}

TEST(DcOpf, TwoBusAngle) {
  const auto s = solve(fixture("two_bus"), wa::ModelKind::Dc);
  EXPECT_NEAR(s.point.generators[0].p, 1.0, 1e-7);
  EXPECT_NEAR(s.point.lines[0].theta_l, 0.1, 1e-7);
}

TEST(DcOpf, RingSplitsTwoThirdsOneThird) {
  const auto c = fixture("three_bus_ring");
  const auto s = solve(c, wa::ModelKind::Dc);
  // Direct path 1-2 has impedance X, the detour 1-3-2 has 2X.
  EXPECT_NEAR(s.point.lines[static_cast<std::size_t>(line_index(c, "L12"))].p_s, 2.0 / 3.0, 1e-7);
  EXPECT_NEAR(s.point.lines[static_cast<std::size_t>(line_index(c, "L13"))].p_s, 1.0 / 3.0, 1e-7);
  EXPECT_NEAR(s.point.lines[static_cast<std::size_t>(line_index(c, "L23"))].p_s, -1.0 / 3.0, 1e-7);
}

TEST(DcOpf, ActiveLossGapIsTheClosedForm) {
  for (const char* name : {"three_bus_ring", "ieee14"}) {
    const auto c = fixture(name);
    const auto s = solve(c, wa::ModelKind::Dc);
    double expected = 0.0;
    for (std::size_t l = 0; l < c.lines.size(); ++l) {
      if (!wg::is_ac_branch(c.lines[l].kind)) continue;
      const double p = s.point.lines[l].p_s;
      expected = std::max(expected, p * p * c.lines[l].r);
    }
    EXPECT_NEAR(wa::feasibility_gap(c, s.point)[wa::GapFamily::PLoss], expected, 1e-12) << name;
  }
}

TEST(Recovery, UnitVoltagesGiveUnitMagnitudes) {
  const auto c = fixture("ieee14");
  auto s = solve(c, wa::ModelKind::Soc);
  for (std::size_t b = 0; b < c.buses.size(); ++b) s.solution.primal[static_cast<std::size_t>(s.model.block.V[b].index)] = 1.0;
  const auto pt = wa::recover_physical(c, s.model, s.solution);
  for (const auto& b : pt.buses) EXPECT_EQ(b.v, 1.0);
}

TEST(Recovery, MagnitudesAreRootsOfSquares) {
  const auto c = fixture("hybrid30");
  const auto s = solve(c, wa::ModelKind::Soc);
  for (const auto& b : s.point.buses) EXPECT_NEAR(b.v * b.v, b.V, 1e-12);
}

TEST(Recovery, BipolarCurrentIsHalfThePowerOverVoltage) {
  const auto c = fixture("hybrid30");
  auto s = solve(c, wa::ModelKind::Soc);
  const auto l = static_cast<std::size_t>(line_index(c, "DC14"));
  const auto from = static_cast<std::size_t>(c.bus_index(c.lines[l].from_bus));
  s.solution.primal[static_cast<std::size_t>(s.model.block.p_s[l].index)] = 1.0;
  s.solution.primal[static_cast<std::size_t>(s.model.block.V[from].index)] = 1.0;
  const auto pt = wa::recover_physical(c, s.model, s.solution);
  EXPECT_DOUBLE_EQ(pt.lines[l].current, 0.5);
}

TEST(Recovery, NegativeVoltageIsAnError) {
  const auto c = fixture("two_bus");
  auto s = solve(c, wa::ModelKind::Soc);
  s.solution.primal[static_cast<std::size_t>(s.model.block.V[1].index)] = -1e-3;
  EXPECT_THROW((void)wa::recover_physical(c, s.model, s.solution), std::runtime_error);
}

TEST(Recovery, SvcSusceptanceInvertsTheReactiveFlow) {
  const auto c = fixture("hybrid30");
  const auto s = solve(c, wa::ModelKind::Soc);
  for (std::size_t l = 0; l < c.lines.size(); ++l) {
    if (c.lines[l].kind != wg::LineKind::SVC) continue;
    const double Vs = s.point.buses[static_cast<std::size_t>(c.bus_index(c.lines[l].from_bus))].V;
    EXPECT_NEAR(-s.point.lines[l].b * Vs, s.point.lines[l].q_s, 1e-12);
    EXPECT_GE(s.point.lines[l].b, c.lines[l].b_min - 1e-7);
    EXPECT_LE(s.point.lines[l].b, c.lines[l].b_max + 1e-7);
  }
}

TEST(Recovery, RingHasOneCycleResidual) {
  const auto c = fixture("three_bus_ring");
  const auto s = solve(c, wa::ModelKind::Soc);
  const auto cycles = wa::angle_cycle_residuals(c, s.point);
  EXPECT_LE(cycles.size(), 1u);
}

TEST(FeasibilityGap, ExactTwoBusPointHasNoGap) {
  const auto c = lossy_two_bus();
  const auto pt = windflow::testing::exact_two_bus_point(c);
  const auto gaps = wa::feasibility_gap(c, pt);
  for (auto f : wa::kGapFamilies) EXPECT_LE(gaps[f], 1e-10) << wa::label(f);
}

TEST(FeasibilityGap, CsvHasOneRowPerFamily) {
  const auto csv = wa::gap_csv("x", wa::ModelKind::Soc, {});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "case,model,family,description,max_abs_gap");
}

TEST(Relaxation, DcBelowSocBelowExactOnTwoBus) {
  const auto c = lossy_two_bus();
  const double dc = solve(c, wa::ModelKind::Dc).solution.objective_value;
  const double soc = solve(c, wa::ModelKind::Soc, {.loss_penalty = 0.0}).solution.objective_value;
  const auto exact = windflow::testing::exact_two_bus_point(c);
  const double ac = c.generators[0].cost(exact.generators[0].p);
  EXPECT_LE(dc, soc + 1e-6);
  EXPECT_LE(soc, ac + 1e-6);
}

TEST(Shedding, ShortfallIsShedAtVoll) {
  auto c = fixture("two_bus");
  c.generators[0].p_max = 0.6;
  EXPECT_FALSE(wc::solve(wa::build_soc_acopf(c).program).optimal());
  const auto s = solve(c, wa::ModelKind::Soc, {.shedding = true});
  EXPECT_NEAR(wa::shed_summary(s.point).p_shed, 0.4, 1e-6);
  EXPECT_NEAR(s.solution.objective_value, c.generators[0].cost(0.6) + 0.4 * c.voll, 1e-3);
}

TEST(GridSearchOracle, RadialOptimaMatchTheRelaxation) {
  const double res = 1e-3;
  for (const auto& c : {lossy_two_bus(), fixture("three_bus_star")}) {
    const auto soc = solve(c, wa::ModelKind::Soc, {.loss_penalty = 0.0});
    const auto oracle = windflow::testing::grid_search_radial_opf(c, res);
    ASSERT_TRUE(std::isfinite(oracle.cost)) << c.name;
    // Each line's accepted grid point may sit up to `res` off the exact root.
    const double slack = 2.0 * res * static_cast<double>(c.lines.size()) *
                         c.generators[0].marginal_cost(c.generators[0].p_max);
    EXPECT_NEAR(soc.solution.objective_value, oracle.cost, slack) << c.name;
    EXPECT_TRUE(wa::slack_loss_cones(c, soc.point).empty()) << c.name;
  }
}
