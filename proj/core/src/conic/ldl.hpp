#pragma once

#include <Eigen/Dense>
#include <vector>

#include "standard_form.hpp"

namespace windflow::conic::detail {

/// Sparse LDL' factorization for quasi-definite matrices with a fixed
/// sparsity pattern. Pivots whose sign disagrees with the expected inertia,
/// or which are tiny, are replaced by a small regularization of the
/// expected sign (dynamic regularization).
class QuasiDefiniteLdl {
 public:
  /// `lower` holds the lower triangle (with diagonal) of the symmetric
  /// matrix; `signs[i]` is +1 or -1, the expected sign of pivot i.
  void analyze(const SpMat& lower, std::vector<signed char> signs);

  /// Factorizes using values laid out like `lower.valuePtr()`.
  bool factor(const double* values);

  /// Solves in place.
  void solve(Eigen::VectorXd& x) const;

  [[nodiscard]] int regularized_pivots() const { return regularized_; }

 private:
  int n_ = 0;
  std::vector<int> perm_;   // perm_[new] = old
  std::vector<int> iperm_;  // iperm_[old] = new
  std::vector<signed char> sign_;  // by new index
  // Upper triangle of the permuted matrix, CSC.
  std::vector<int> cp_, ci_;
  std::vector<int> source_;  // value slot in `lower` for each entry of the permuted matrix
  std::vector<double> cx_;
  std::vector<int> etree_, lnz_, lp_;
  std::vector<int> li_;
  std::vector<double> lx_, d_, dinv_;
  int regularized_ = 0;
  // factorization workspace
  std::vector<int> y_idx_, elim_buf_, next_space_;
  std::vector<char> y_mark_;
  std::vector<double> y_val_;
  mutable std::vector<double> work_;
};

}  // namespace windflow::conic::detail
