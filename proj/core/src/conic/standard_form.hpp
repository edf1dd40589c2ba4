#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "windflow/conic/program.hpp"

namespace windflow::conic::detail {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Cone K = R^linear_+ x Q^{soc[0]} x Q^{soc[1]} x ...
struct ConeLayout {
  int linear = 0;
  std::vector<int> soc;

  [[nodiscard]] int dimension() const {
    int d = linear;
    for (int k : soc) d += k;
    return d;
  }
  [[nodiscard]] int degree() const { return linear + static_cast<int>(soc.size()); }
};

/// min c'x + c0  s.t.  A x = b,  G x + s = h,  s in K.
///
/// The first `num_program_vars` entries of x are the program variables; the
/// remainder are epigraph variables for quadratic costs. The first
/// `num_program_eqs` rows of A are the program's equality rows.
struct StandardForm {
  int num_program_vars = 0;
  int num_program_eqs = 0;
  Eigen::VectorXd c;
  double c0 = 0.0;
  SpMat A;
  Eigen::VectorXd b;
  SpMat G;
  Eigen::VectorXd h;
  ConeLayout cones;

  [[nodiscard]] int n() const { return static_cast<int>(c.size()); }
  [[nodiscard]] int p() const { return static_cast<int>(b.size()); }
  [[nodiscard]] int m() const { return static_cast<int>(h.size()); }
};

[[nodiscard]] StandardForm to_standard_form(const ConicProgram& program);

}  // namespace windflow::conic::detail
