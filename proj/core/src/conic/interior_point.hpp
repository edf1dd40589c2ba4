#pragma once

#include <Eigen/Dense>

#include "standard_form.hpp"
#include "windflow/conic/solver.hpp"

namespace windflow::conic::detail {

enum class IpmVariant {
  /// Homogeneous self-dual embedding; detects infeasibility by certificates.
  Homogeneous,
  /// Infeasible-start primal-dual path following without embedding.
  PrimalDual,
};

/// Iterates in the units of the standard form. For Optimal they are the
/// solution; for Infeasible (y, z) and for Unbounded (x, s) hold certificates.
struct IpmResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  Eigen::VectorXd s;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
};

[[nodiscard]] IpmResult run_interior_point(const StandardForm& sf, const SolverOptions& opts, IpmVariant variant);

}  // namespace windflow::conic::detail
