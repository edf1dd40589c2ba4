#pragma once

#include <cstddef>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace windflow::conic {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Index of a variable inside one ConicProgram.
struct VarId {
  int index = -1;
  friend bool operator==(VarId, VarId) = default;
};

/// Index of an equality row.
struct EqRowId {
  int index = -1;
  friend bool operator==(EqRowId, EqRowId) = default;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

/// Linear function of the program variables plus a constant.
struct AffineExpr {
  std::vector<Term> terms;
  double constant = 0.0;

  static AffineExpr of(VarId v, double coef = 1.0) { return {{{v, coef}}, 0.0}; }
  static AffineExpr constant_value(double c) { return {{}, c}; }
};

struct Variable {
  std::string name;
  double lower = -kInfinity;
  double upper = kInfinity;
};

/// a·x = rhs (equalities) or a·x <= rhs (inequalities).
struct LinearRow {
  std::string name;
  std::vector<Term> terms;
  double rhs = 0.0;
};

/// 2·u·w >= sum_k z_k^2 with u, w >= 0.
struct RotatedCone {
  std::string name;
  AffineExpr u;
  AffineExpr w;
  std::vector<AffineExpr> z;
};

/// Objective: constant + sum_k linear_k x_k + sum_k quadratic_k x_k^2.
struct Objective {
  double constant = 0.0;
  std::vector<double> linear;
  std::vector<double> quadratic;
};

/// Container for a convex program with linear rows, variable bounds,
/// rotated second-order cones and a separable convex quadratic objective.
///
/// Row names follow `<kind>:<scenario>:<element>` so callers can address
/// individual rows (e.g. the dispatch anchors of a Benders subproblem).
class ConicProgram {
 public:
  ConicProgram() = default;
  ConicProgram(const ConicProgram& other);
  ConicProgram& operator=(const ConicProgram& other);
  ConicProgram(ConicProgram&&) noexcept;
  ConicProgram& operator=(ConicProgram&&) noexcept;
  ~ConicProgram();

  VarId add_variable(std::string name, double lower = -kInfinity, double upper = kInfinity);
  EqRowId add_equality(std::string name, std::vector<Term> terms, double rhs);
  int add_inequality(std::string name, std::vector<Term> terms, double rhs);
  int add_rotated_cone(std::string name, AffineExpr u, AffineExpr w, std::vector<AffineExpr> z);

  void add_linear_cost(VarId v, double coef);
  void add_quadratic_cost(VarId v, double coef);
  void add_constant_cost(double c) { objective_.constant += c; }

  void set_bounds(VarId v, double lower, double upper);
  void set_equality_rhs(EqRowId row, double rhs);

  [[nodiscard]] std::size_t num_variables() const { return variables_.size(); }
  [[nodiscard]] std::size_t num_equalities() const { return equalities_.size(); }
  [[nodiscard]] std::size_t num_inequalities() const { return inequalities_.size(); }
  [[nodiscard]] std::size_t num_cones() const { return cones_.size(); }

  [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
  [[nodiscard]] const std::vector<LinearRow>& equalities() const { return equalities_; }
  [[nodiscard]] const std::vector<LinearRow>& inequalities() const { return inequalities_; }
  [[nodiscard]] const std::vector<RotatedCone>& cones() const { return cones_; }
  [[nodiscard]] const Objective& objective() const { return objective_; }
  [[nodiscard]] const Variable& variable(VarId v) const { return variables_.at(static_cast<std::size_t>(v.index)); }

  /// Name lookups build their index on first use.
  [[nodiscard]] std::optional<VarId> find_variable(std::string_view name) const;
  [[nodiscard]] std::optional<EqRowId> find_equality(std::string_view name) const;

  /// Evaluates the objective at a point (no feasibility check).
  [[nodiscard]] double evaluate_objective(const std::vector<double>& x) const;

  /// Throws std::invalid_argument listing every structural problem:
  /// dangling variable references, negative quadratic coefficients,
  /// inverted bounds, non-finite data.
  void validate() const;

 private:
  void invalidate_index();
  void check_var(VarId v) const;

  std::vector<Variable> variables_;
  std::vector<LinearRow> equalities_;
  std::vector<LinearRow> inequalities_;
  std::vector<RotatedCone> cones_;
  Objective objective_;

  mutable std::mutex index_mutex_;
  mutable std::unordered_map<std::string, int> var_index_;
  mutable std::unordered_map<std::string, int> eq_index_;
  mutable bool var_index_built_ = false;
  mutable bool eq_index_built_ = false;
};

/// Evaluates a·x + constant.
[[nodiscard]] double evaluate(const AffineExpr& e, const std::vector<double>& x);
[[nodiscard]] double evaluate(const std::vector<Term>& terms, const std::vector<double>& x);

}  // namespace windflow::conic
