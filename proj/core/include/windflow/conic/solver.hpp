#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "windflow/conic/program.hpp"

namespace windflow::conic {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

[[nodiscard]] std::string_view to_string(SolveStatus s);

struct SolverOptions {
  /// Relative primal/dual residual tolerance.
  double feasibility_tol = 1e-8;
  /// Relative duality-gap tolerance.
  double gap = 1e-8;
  /// Absolute duality-gap tolerance.
  double abs_gap = 1e-8;
  int max_iterations = 100;
  bool verbose = false;
};

struct SolveInfo {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double primal_objective = 0.0;
  /// Lower bound certified by the returned duals (includes the objective constant).
  double dual_objective = 0.0;
  std::string backend;
};

/// Result of a solve.
///
/// `eq_duals[r]` is the sensitivity of the optimal objective to the
/// right-hand side of equality row r: increasing b_r by one unit changes the
/// optimum by eq_duals[r] (to first order). For `min x s.t. x = 3` the dual
/// is +1.
struct Solution {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> primal;
  std::vector<double> eq_duals;
  double objective_value = 0.0;
  SolveInfo info;

  [[nodiscard]] bool optimal() const { return status == SolveStatus::Optimal; }
  [[nodiscard]] double value(VarId v) const { return primal.at(static_cast<std::size_t>(v.index)); }
  [[nodiscard]] double dual(EqRowId r) const { return eq_duals.at(static_cast<std::size_t>(r.index)); }
};

/// Backend contract. Implementations are stateless; one instance may solve
/// distinct programs from several threads at once.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  [[nodiscard]] virtual std::string_view name() const = 0;
  [[nodiscard]] virtual Solution solve(const ConicProgram& program, const SolverOptions& opts) const = 0;
};

/// Names of the compiled-in backends, default first.
[[nodiscard]] std::vector<std::string> available_backends();

/// Creates a backend by name; an empty name consults WINDFLOW_SOLVER and
/// falls back to the default. Throws std::invalid_argument for unknown names.
[[nodiscard]] std::unique_ptr<ConicSolver> make_solver(std::string_view backend = {});

/// Convenience wrapper around the default backend.
[[nodiscard]] Solution solve(const ConicProgram& program, const SolverOptions& opts = {});

}  // namespace windflow::conic
