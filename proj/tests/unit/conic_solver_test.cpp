#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "test_rng.hpp"
#include "windflow/conic/check.hpp"
#include "windflow/conic/solver.hpp"

namespace wc = windflow::conic;
using windflow::testing::Rng;

namespace {

wc::Solution run(const wc::ConicProgram& prog, std::string_view backend = "hsde") {
  return wc::make_solver(backend)->solve(prog, {});
}

// Grid search for min u + z^2/(2u) over u, the w-eliminated form of
// min u + w s.t. 2uw >= z^2.
double grid_min_u(double z) {
  double best_u = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (double u = 1e-3; u < 10.0; u += 1e-4) {
    const double f = u + z * z / (2.0 * u);
    if (f < best) {
      best = f;
      best_u = u;
    }
  }
  return best_u;
}

}  // namespace

TEST(ConicSolver, FixedVariableObjectiveAndDual) {
  wc::ConicProgram p;
  auto x = p.add_variable("x");
  p.add_linear_cost(x, 1.0);
  auto row = p.add_equality("fix:0:x", {{x, 1.0}}, 3.0);
  const auto sol = run(p);
  ASSERT_EQ(sol.status, wc::SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective_value, 3.0, 1e-8);
  EXPECT_NEAR(sol.value(x), 3.0, 1e-8);
  EXPECT_NEAR(sol.dual(row), 1.0, 1e-8);
}

TEST(ConicSolver, RotatedConeMatchesGridSearch) {
  for (double zval : {2.0, std::sqrt(2.0), 0.5}) {
    wc::ConicProgram p;
    auto u = p.add_variable("u");
    auto w = p.add_variable("w");
    auto z = p.add_variable("z");
    p.add_linear_cost(u, 1.0);
    p.add_linear_cost(w, 1.0);
    p.add_equality("fix:0:z", {{z, 1.0}}, zval);
    p.add_rotated_cone("cone:0:uwz", wc::AffineExpr::of(u), wc::AffineExpr::of(w), {wc::AffineExpr::of(z)});
    const auto sol = run(p);
    ASSERT_EQ(sol.status, wc::SolveStatus::Optimal);
    const double u_grid = grid_min_u(zval);
    EXPECT_NEAR(sol.value(u), u_grid, 2e-4);
    EXPECT_NEAR(sol.value(w), u_grid, 2e-4);
    // tight cone: 2uw = z^2
    EXPECT_NEAR(2.0 * sol.value(u) * sol.value(w), zval * zval, 1e-6);
  }
}

TEST(ConicSolver, UnitRotatedConeIsSymmetric) {
  wc::ConicProgram p;
  auto u = p.add_variable("u");
  auto w = p.add_variable("w");
  p.add_linear_cost(u, 1.0);
  p.add_linear_cost(w, 1.0);
  p.add_rotated_cone("cone:0:uw", wc::AffineExpr::of(u), wc::AffineExpr::of(w),
                     {wc::AffineExpr::constant_value(std::sqrt(2.0))});
  const auto sol = run(p);
  ASSERT_EQ(sol.status, wc::SolveStatus::Optimal);
  EXPECT_NEAR(sol.value(u), 1.0, 1e-6);
  EXPECT_NEAR(sol.value(w), 1.0, 1e-6);
}

TEST(ConicSolver, ContradictoryEqualitiesAreInfeasible) {
  wc::ConicProgram p;
  auto x = p.add_variable("x");
  p.add_linear_cost(x, 1.0);
  p.add_equality("a:0:x", {{x, 1.0}}, 3.0);
  p.add_equality("b:0:x", {{x, 1.0}}, 4.0);
  EXPECT_EQ(run(p).status, wc::SolveStatus::Infeasible);
}

TEST(ConicSolver, ConeInfeasibility) {
  // x <= -1 while x is the u side of a cone (u >= 0).
  wc::ConicProgram p;
  auto x = p.add_variable("x");
  auto y = p.add_variable("y", 1.0, 2.0);
  p.add_linear_cost(x, 1.0);
  p.add_inequality("ub:0:x", {{x, 1.0}}, -1.0);
  p.add_rotated_cone("cone:0:xy", wc::AffineExpr::of(x), wc::AffineExpr::of(y), {});
  EXPECT_EQ(run(p).status, wc::SolveStatus::Infeasible);
}

TEST(ConicSolver, FreeDescentIsUnbounded) {
  wc::ConicProgram p;
  auto x = p.add_variable("x");
  auto y = p.add_variable("y", 0.0, 1.0);
  p.add_linear_cost(x, -1.0);
  p.add_linear_cost(y, 1.0);
  p.add_inequality("row:0:xy", {{x, -1.0}, {y, 1.0}}, 5.0);
  EXPECT_EQ(run(p).status, wc::SolveStatus::Unbounded);
}

TEST(ConicSolver, QuadraticCostClosedForm) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const double q = rng.uniform(0.1, 50.0);
    const double l = rng.uniform(-100.0, 100.0);
    const double lo = rng.uniform(-3.0, 0.0);
    const double hi = rng.uniform(0.0, 3.0);
    wc::ConicProgram p;
    auto x = p.add_variable("x", lo, hi);
    p.add_linear_cost(x, l);
    p.add_quadratic_cost(x, q);
    p.add_constant_cost(4.0);
    const auto sol = run(p);
    ASSERT_EQ(sol.status, wc::SolveStatus::Optimal);
    const double xs = std::clamp(-l / (2.0 * q), lo, hi);
    // x is only pinned to sqrt(gap) accuracy by the objective tolerance
    EXPECT_NEAR(sol.value(x), xs, 1e-4 * (1.0 + std::abs(xs)));
    EXPECT_NEAR(sol.objective_value, 4.0 + l * xs + q * xs * xs, 1e-6 * (1.0 + std::abs(l * xs)));
  }
}

TEST(ConicSolver, LinearObjectiveOverBall) {
  // min c'x s.t. ||x|| <= r  ->  x = -r c / ||c||
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rng.integer(1, 6);
    const double r = rng.uniform(0.5, 3.0);
    wc::ConicProgram p;
    std::vector<wc::VarId> x;
    std::vector<double> c(static_cast<std::size_t>(n));
    std::vector<wc::AffineExpr> z;
    double cn = 0.0;
    for (int i = 0; i < n; ++i) {
      x.push_back(p.add_variable("x" + std::to_string(i)));
      c[static_cast<std::size_t>(i)] = rng.uniform(-2.0, 2.0);
      cn += c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
      p.add_linear_cost(x.back(), c[static_cast<std::size_t>(i)]);
      z.push_back(wc::AffineExpr::of(x.back()));
    }
    cn = std::sqrt(cn);
    // 2 * (r^2/2) * 1 >= ||x||^2
    p.add_rotated_cone("ball:0:x", wc::AffineExpr::constant_value(r * r / 2.0), wc::AffineExpr::constant_value(1.0), z);
    const auto sol = run(p);
    ASSERT_EQ(sol.status, wc::SolveStatus::Optimal);
    EXPECT_NEAR(sol.objective_value, -r * cn, 1e-6 * (1.0 + r * cn));
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(sol.value(x[static_cast<std::size_t>(i)]), -r * c[static_cast<std::size_t>(i)] / cn, 1e-5);
    }
  }
}

namespace {

// Random feasible program with equalities, inequalities, bounds, cones and
// quadratic costs. Feasibility comes from building rows around a known point.
wc::ConicProgram random_program(Rng& rng, std::vector<wc::EqRowId>& eq_rows) {
  wc::ConicProgram p;
  const int n = rng.integer(3, 8);
  std::vector<wc::VarId> x;
  std::vector<double> x0;
  for (int i = 0; i < n; ++i) {
    x0.push_back(rng.uniform(0.2, 1.5));
    x.push_back(p.add_variable("x" + std::to_string(i), -5.0, 5.0));
    p.add_linear_cost(x.back(), rng.uniform(-1.0, 1.0));
    p.add_quadratic_cost(x.back(), rng.uniform(0.05, 1.0));
  }
  const int neq = rng.integer(1, std::max(1, n / 2));
  for (int r = 0; r < neq; ++r) {
    std::vector<wc::Term> terms;
    double rhs = 0.0;
    for (int i = 0; i < n; ++i) {
      if (rng.uniform(0.0, 1.0) < 0.6) {
        const double a = rng.uniform(-1.0, 1.0);
        terms.push_back({x[static_cast<std::size_t>(i)], a});
        rhs += a * x0[static_cast<std::size_t>(i)];
      }
    }
    if (terms.empty()) {
      terms.push_back({x[0], 1.0});
      rhs = x0[0];
    }
    eq_rows.push_back(p.add_equality("eq:0:" + std::to_string(r), terms, rhs));
  }
  for (int r = 0; r < 2; ++r) {
    std::vector<wc::Term> terms;
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = rng.uniform(-1.0, 1.0);
      terms.push_back({x[static_cast<std::size_t>(i)], a});
      lhs += a * x0[static_cast<std::size_t>(i)];
    }
    p.add_inequality("ineq:0:" + std::to_string(r), terms, lhs + rng.uniform(0.0, 0.5));
  }
  // 2 * x0 * x1 >= x2^2 style cone, made feasible at x0 with slack.
  const auto& a = x[0];
  const auto& b = x[1];
  const double zc = std::sqrt(2.0 * x0[0] * x0[1]) * 0.7;
  p.add_rotated_cone("cone:0:0", wc::AffineExpr::of(a), wc::AffineExpr::of(b),
                     {wc::AffineExpr{{{x[2], 0.5}}, zc - 0.5 * x0[2]}});
  return p;
}

}  // namespace

TEST(ConicSolver, DualsMatchFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<wc::EqRowId> rows;
    wc::ConicProgram p = random_program(rng, rows);
    const auto base = run(p);
    ASSERT_EQ(base.status, wc::SolveStatus::Optimal);
    const double step = 1e-5;
    for (auto row : rows) {
      wc::ConicProgram up = p;
      wc::ConicProgram dn = p;
      const double rhs = p.equalities()[static_cast<std::size_t>(row.index)].rhs;
      up.set_equality_rhs(row, rhs + step);
      dn.set_equality_rhs(row, rhs - step);
      const auto su = run(up);
      const auto sd = run(dn);
      ASSERT_TRUE(su.optimal() && sd.optimal());
      const double fd = (su.objective_value - sd.objective_value) / (2.0 * step);
      EXPECT_NEAR(base.dual(row), fd, 1e-4 * std::max(1.0, std::abs(fd))) << "trial " << trial;
    }
  }
}

TEST(ConicSolver, OptimalSolutionsAreFeasible) {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<wc::EqRowId> rows;
    const auto p = random_program(rng, rows);
    const auto sol = run(p);
    ASSERT_EQ(sol.status, wc::SolveStatus::Optimal);
    EXPECT_TRUE(wc::check_solution(p, sol).within(1e-7)) << wc::check_solution(p, sol).max();
    EXPECT_LE(sol.info.primal_objective - sol.info.dual_objective, 1e-6 * (1.0 + std::abs(sol.objective_value)));
  }
}

TEST(ConicSolver, BackendsAgree) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<wc::EqRowId> rows;
    const auto p = random_program(rng, rows);
    const auto a = run(p, "hsde");
    const auto b = run(p, "pdip");
    ASSERT_TRUE(a.optimal() && b.optimal());
    EXPECT_NEAR(a.objective_value, b.objective_value, 1e-6 * std::max(1.0, std::abs(a.objective_value)));
  }
}

TEST(ConicSolver, UnknownBackendThrows) { EXPECT_THROW((void)wc::make_solver("nope"), std::invalid_argument); }

TEST(ConicSolver, InvalidProgramThrows) {
  wc::ConicProgram p;
  auto x = p.add_variable("x", 2.0, 1.0);
  p.add_linear_cost(x, 1.0);
  EXPECT_THROW((void)run(p), std::invalid_argument);
}
