#include "standard_form.hpp"

#include <cmath>

namespace windflow::conic::detail {
namespace {

using Triplet = Eigen::Triplet<double, int>;

void push_terms(std::vector<Triplet>& out, int row, const std::vector<Term>& terms, double scale) {
  for (const auto& t : terms) {
    if (t.coef != 0.0) out.emplace_back(row, t.var.index, scale * t.coef);
  }
}

}  // namespace

StandardForm to_standard_form(const ConicProgram& program) {
  program.validate();

  StandardForm sf;
  const auto& vars = program.variables();
  const auto& obj = program.objective();
  const int n0 = static_cast<int>(vars.size());
  sf.num_program_vars = n0;
  sf.num_program_eqs = static_cast<int>(program.num_equalities());

  std::vector<int> epigraph_of;
  for (int j = 0; j < n0; ++j) {
    if (obj.quadratic[static_cast<std::size_t>(j)] > 0.0) epigraph_of.push_back(j);
  }
  const int n = n0 + static_cast<int>(epigraph_of.size());

  sf.c = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n0; ++j) sf.c[j] = obj.linear[static_cast<std::size_t>(j)];
  for (int k = 0; k < static_cast<int>(epigraph_of.size()); ++k) sf.c[n0 + k] = 1.0;
  sf.c0 = obj.constant;

  // Equalities: program rows, then fixed variables.
  std::vector<Triplet> a_trip;
  std::vector<double> b_vals;
  for (const auto& row : program.equalities()) {
    push_terms(a_trip, static_cast<int>(b_vals.size()), row.terms, 1.0);
    b_vals.push_back(row.rhs);
  }
  for (int j = 0; j < n0; ++j) {
    const auto& v = vars[static_cast<std::size_t>(j)];
    if (std::isfinite(v.lower) && v.lower == v.upper) {
      a_trip.emplace_back(static_cast<int>(b_vals.size()), j, 1.0);
      b_vals.push_back(v.lower);
    }
  }
  sf.A.resize(static_cast<int>(b_vals.size()), n);
  sf.A.setFromTriplets(a_trip.begin(), a_trip.end());
  sf.b = Eigen::Map<const Eigen::VectorXd>(b_vals.data(), static_cast<Eigen::Index>(b_vals.size()));

  // Linear cone rows: inequalities, then bounds. SOC rows after.
  std::vector<Triplet> g_trip;
  std::vector<double> h_vals;
  auto next_row = [&] { return static_cast<int>(h_vals.size()); };
  for (const auto& row : program.inequalities()) {
    push_terms(g_trip, next_row(), row.terms, 1.0);
    h_vals.push_back(row.rhs);
  }
  for (int j = 0; j < n0; ++j) {
    const auto& v = vars[static_cast<std::size_t>(j)];
    if (std::isfinite(v.lower) && v.lower == v.upper) continue;
    if (std::isfinite(v.upper)) {
      g_trip.emplace_back(next_row(), j, 1.0);
      h_vals.push_back(v.upper);
    }
    if (std::isfinite(v.lower)) {
      g_trip.emplace_back(next_row(), j, -1.0);
      h_vals.push_back(-v.lower);
    }
  }
  sf.cones.linear = next_row();

  // Rotated cone (u, w, z) -> ((u+w)/sqrt2, (u-w)/sqrt2, z) in a standard SOC;
  // s = h - Gx means G carries the negated coefficients.
  const double r2 = 1.0 / std::sqrt(2.0);
  auto push_affine = [&](int row, const AffineExpr& e, double scale) {
    push_terms(g_trip, row, e.terms, -scale);
    return scale * e.constant;
  };
  auto push_rotated = [&](const AffineExpr& u, const AffineExpr& w, const std::vector<AffineExpr>& z) {
    int r = next_row();
    double h0 = push_affine(r, u, r2) + push_affine(r, w, r2);
    h_vals.push_back(h0);
    r = next_row();
    double h1 = push_affine(r, u, r2) + push_affine(r, w, -r2);
    h_vals.push_back(h1);
    for (const auto& zk : z) {
      r = next_row();
      h_vals.push_back(push_affine(r, zk, 1.0));
    }
    sf.cones.soc.push_back(2 + static_cast<int>(z.size()));
  };
  for (const auto& cone : program.cones()) push_rotated(cone.u, cone.w, cone.z);
  for (int k = 0; k < static_cast<int>(epigraph_of.size()); ++k) {
    const int j = epigraph_of[static_cast<std::size_t>(k)];
    const double q = obj.quadratic[static_cast<std::size_t>(j)];
    // 2 * t * (1/2) >= q x^2
    push_rotated(AffineExpr::of(VarId{n0 + k}), AffineExpr::constant_value(0.5),
                 {AffineExpr::of(VarId{j}, std::sqrt(q))});
  }

  sf.G.resize(next_row(), n);
  sf.G.setFromTriplets(g_trip.begin(), g_trip.end());
  sf.h = Eigen::Map<const Eigen::VectorXd>(h_vals.data(), static_cast<Eigen::Index>(h_vals.size()));
  return sf;
}

}  // namespace windflow::conic::detail
