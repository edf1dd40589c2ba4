#include "windflow/conic/solver.hpp"

#include <cstdlib>
#include <stdexcept>

#include "interior_point.hpp"
#include "standard_form.hpp"

namespace windflow::conic {
namespace {

class InteriorPointBackend final : public ConicSolver {
 public:
  InteriorPointBackend(std::string_view name, detail::IpmVariant variant) : name_(name), variant_(variant) {}

  [[nodiscard]] std::string_view name() const override { return name_; }

  [[nodiscard]] Solution solve(const ConicProgram& program, const SolverOptions& opts) const override {
    const detail::StandardForm sf = detail::to_standard_form(program);
    const detail::IpmResult r = detail::run_interior_point(sf, opts, variant_);

    Solution sol;
    sol.status = r.status;
    sol.info.iterations = r.iterations;
    sol.info.primal_residual = r.primal_residual;
    sol.info.dual_residual = r.dual_residual;
    sol.info.gap = r.gap;
    sol.info.relative_gap = r.relative_gap;
    sol.info.primal_objective = r.primal_objective + sf.c0;
    sol.info.dual_objective = r.dual_objective + sf.c0;
    sol.info.backend = std::string(name_);
    if (r.status == SolveStatus::Optimal || r.status == SolveStatus::NumericalFailure) {
      if (r.x.size() == sf.n()) {
        sol.primal.assign(r.x.data(), r.x.data() + sf.num_program_vars);
        sol.objective_value = program.evaluate_objective(sol.primal);
      }
      if (r.y.size() == sf.p()) {
        sol.eq_duals.resize(static_cast<std::size_t>(sf.num_program_eqs));
        for (int i = 0; i < sf.num_program_eqs; ++i) sol.eq_duals[static_cast<std::size_t>(i)] = -r.y[i];
      }
    }
    return sol;
  }

 private:
  std::string_view name_;
  detail::IpmVariant variant_;
};

constexpr std::string_view kHsde = "hsde";
constexpr std::string_view kPrimalDual = "pdip";

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::Unbounded:
      return "Unbounded";
    case SolveStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

std::vector<std::string> available_backends() { return {std::string(kHsde), std::string(kPrimalDual)}; }

std::unique_ptr<ConicSolver> make_solver(std::string_view backend) {
  std::string name(backend);
  if (name.empty()) {
    const char* env = std::getenv("WINDFLOW_SOLVER");
    name = env != nullptr && *env != '\0' ? env : std::string(kHsde);
  }
  if (name == kHsde) return std::make_unique<InteriorPointBackend>(kHsde, detail::IpmVariant::Homogeneous);
  if (name == kPrimalDual) return std::make_unique<InteriorPointBackend>(kPrimalDual, detail::IpmVariant::PrimalDual);
  throw std::invalid_argument("unknown conic backend '" + name + "' (available: hsde, pdip)");
}

Solution solve(const ConicProgram& program, const SolverOptions& opts) { return make_solver()->solve(program, opts); }

}  // namespace windflow::conic
