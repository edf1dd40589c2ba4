#include "windflow/conic/check.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace windflow::conic {

double ResidualReport::max() const { return std::max({equality, inequality, cone, bounds}); }

ResidualReport check_point(const ConicProgram& program, const std::vector<double>& x) {
  if (x.size() != program.num_variables()) {
    throw std::invalid_argument("check_point: expected " + std::to_string(program.num_variables()) +
                                " values, got " + std::to_string(x.size()));
  }
  ResidualReport r;
  for (const auto& row : program.equalities()) {
    r.equality = std::max(r.equality, std::abs(evaluate(row.terms, x) - row.rhs));
  }
  for (const auto& row : program.inequalities()) {
    r.inequality = std::max(r.inequality, evaluate(row.terms, x) - row.rhs);
  }
  for (const auto& cone : program.cones()) {
    const double u = evaluate(cone.u, x);
    const double w = evaluate(cone.w, x);
    double zz = 0.0;
    for (const auto& z : cone.z) {
      const double v = evaluate(z, x);
      zz += v * v;
    }
    r.cone = std::max({r.cone, zz - 2.0 * u * w, -u, -w});
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& v = program.variables()[i];
    r.bounds = std::max({r.bounds, v.lower - x[i], x[i] - v.upper});
  }
  return r;
}

ResidualReport check_solution(const ConicProgram& program, const Solution& solution) {
  return check_point(program, solution.primal);
}

void write_cbf(const ConicProgram& program, std::ostream& out) {
  const auto& vars = program.variables();
  const auto& obj = program.objective();
  const int n0 = static_cast<int>(vars.size());
  std::vector<int> epi;
  for (int j = 0; j < n0; ++j) {
    if (obj.quadratic[static_cast<std::size_t>(j)] > 0.0) epi.push_back(j);
  }
  const int n = n0 + static_cast<int>(epi.size());

  struct Entry {
    int row;
    int col;
    double val;
  };
  std::vector<Entry> a;
  std::vector<std::pair<int, double>> bvec;
  std::vector<std::pair<const char*, int>> blocks;
  int row = 0;
  auto open_block = [&](const char* kind, int size) {
    if (!blocks.empty() && blocks.back().first == kind && kind[0] == 'L') {
      blocks.back().second += size;
    } else {
      blocks.emplace_back(kind, size);
    }
  };
  auto emit = [&](const std::vector<Term>& terms, double constant, double sign) {
    for (const auto& t : terms) {
      if (t.coef != 0.0) a.push_back({row, t.var.index, sign * t.coef});
    }
    if (constant != 0.0) bvec.emplace_back(row, sign * constant);
    ++row;
  };
  static const char* kEq = "L=";
  static const char* kNeg = "L-";
  static const char* kPos = "L+";
  static const char* kQr = "QR";
  for (const auto& r : program.equalities()) {
    open_block(kEq, 1);
    emit(r.terms, -r.rhs, 1.0);
  }
  for (const auto& r : program.inequalities()) {
    open_block(kNeg, 1);
    emit(r.terms, -r.rhs, 1.0);
  }
  for (int j = 0; j < n0; ++j) {
    const auto& v = vars[static_cast<std::size_t>(j)];
    if (std::isfinite(v.lower)) {
      open_block(kPos, 1);
      emit({{VarId{j}, 1.0}}, -v.lower, 1.0);
    }
    if (std::isfinite(v.upper)) {
      open_block(kNeg, 1);
      emit({{VarId{j}, 1.0}}, -v.upper, 1.0);
    }
  }
  for (const auto& c : program.cones()) {
    blocks.emplace_back(kQr, 2 + static_cast<int>(c.z.size()));
    emit(c.u.terms, c.u.constant, 1.0);
    emit(c.w.terms, c.w.constant, 1.0);
    for (const auto& z : c.z) emit(z.terms, z.constant, 1.0);
  }
  for (std::size_t k = 0; k < epi.size(); ++k) {
    const int j = epi[k];
    blocks.emplace_back(kQr, 3);
    emit({{VarId{n0 + static_cast<int>(k)}, 1.0}}, 0.0, 1.0);
    emit({}, 0.5, 1.0);
    emit({{VarId{j}, std::sqrt(obj.quadratic[static_cast<std::size_t>(j)])}}, 0.0, 1.0);
  }

  out.precision(17);
  out << "VER\n3\n\nOBJSENSE\nMIN\n\nVAR\n" << n << " 1\nF " << n << "\n\n";
  out << "CON\n" << row << " " << blocks.size() << "\n";
  for (const auto& [kind, size] : blocks) out << kind << " " << size << "\n";
  out << "\n";
  int nobj = 0;
  for (int j = 0; j < n0; ++j) nobj += obj.linear[static_cast<std::size_t>(j)] != 0.0 ? 1 : 0;
  nobj += static_cast<int>(epi.size());
  if (nobj > 0) {
    out << "OBJACOORD\n" << nobj << "\n";
    for (int j = 0; j < n0; ++j) {
      if (obj.linear[static_cast<std::size_t>(j)] != 0.0) out << j << " " << obj.linear[static_cast<std::size_t>(j)] << "\n";
    }
    for (std::size_t k = 0; k < epi.size(); ++k) out << n0 + static_cast<int>(k) << " 1\n";
    out << "\n";
  }
  if (obj.constant != 0.0) out << "OBJBCOORD\n" << obj.constant << "\n\n";
  if (!a.empty()) {
    out << "ACOORD\n" << a.size() << "\n";
    for (const auto& e : a) out << e.row << " " << e.col << " " << e.val << "\n";
    out << "\n";
  }
  if (!bvec.empty()) {
    out << "BCOORD\n" << bvec.size() << "\n";
    for (const auto& [r, v] : bvec) out << r << " " << v << "\n";
  }
}

}  // namespace windflow::conic
