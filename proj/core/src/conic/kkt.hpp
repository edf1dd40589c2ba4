#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <vector>

#include "cone_algebra.hpp"
#include "ldl.hpp"
#include "standard_form.hpp"

namespace windflow::conic::detail {

/// Regularized quasi-definite KKT system
///
///   [ dI   A'   G'       ] [x]   [rx]
///   [ A   -dI   0        ] [y] = [ry]
///   [ G    0   -W^2 - dI ] [z]   [rz]
///
/// factorized by sparse LDL' with a fill-reducing ordering computed once.
/// Solves are refined against the unregularized matrix. When the static
/// pivots lose too much accuracy (late iterations, badly scaled W), the
/// solve is redone with a pivoting sparse LU of the same matrix.
class KktSolver {
 public:
  KktSolver(const SpMat& A, const SpMat& G, const ConeOps& cones, double regularization);

  /// Loads W^2 into the matrix and factorizes. False on a numerical breakdown.
  bool factor(const NtScaling& w);

  void solve(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, const Eigen::VectorXd& rz,
             Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& z) const;

 private:
  [[nodiscard]] Eigen::VectorXd multiply_exact(const Eigen::VectorXd& u) const;
  double refine(const Eigen::VectorXd& rhs, Eigen::VectorXd& u,
                const std::function<void(Eigen::VectorXd&)>& inverse) const;
  bool lu_solve(Eigen::VectorXd& u) const;

  const SpMat* A_;
  const SpMat* G_;
  SpMat At_;
  SpMat Gt_;
  const ConeOps* cones_;
  const NtScaling* scaling_ = nullptr;
  double delta_;
  int n_;
  int p_;
  int m_;
  SpMat K_;
  std::vector<double*> lp_slots_;
  std::vector<std::vector<double*>> soc_slots_;  // lower triangle, column-major per block
  QuasiDefiniteLdl ldl_;
  bool ldl_ok_ = false;
  mutable std::unique_ptr<Eigen::SparseLU<SpMat>> lu_;
  mutable bool lu_current_ = false;
  mutable bool lu_failed_ = false;
};

}  // namespace windflow::conic::detail
