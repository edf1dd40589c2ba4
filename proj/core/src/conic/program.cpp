#include "windflow/conic/program.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace windflow::conic {

ConicProgram::ConicProgram(const ConicProgram& other)
    : variables_(other.variables_),
      equalities_(other.equalities_),
      inequalities_(other.inequalities_),
      cones_(other.cones_),
      objective_(other.objective_) {}

ConicProgram& ConicProgram::operator=(const ConicProgram& other) {
  if (this != &other) {
    variables_ = other.variables_;
    equalities_ = other.equalities_;
    inequalities_ = other.inequalities_;
    cones_ = other.cones_;
    objective_ = other.objective_;
    invalidate_index();
  }
  return *this;
}

ConicProgram::ConicProgram(ConicProgram&& other) noexcept
    : variables_(std::move(other.variables_)),
      equalities_(std::move(other.equalities_)),
      inequalities_(std::move(other.inequalities_)),
      cones_(std::move(other.cones_)),
      objective_(std::move(other.objective_)) {}

ConicProgram& ConicProgram::operator=(ConicProgram&& other) noexcept {
  if (this != &other) {
    variables_ = std::move(other.variables_);
    equalities_ = std::move(other.equalities_);
    inequalities_ = std::move(other.inequalities_);
    cones_ = std::move(other.cones_);
    objective_ = std::move(other.objective_);
    invalidate_index();
  }
  return *this;
}

ConicProgram::~ConicProgram() = default;

void ConicProgram::invalidate_index() {
  std::lock_guard lock(index_mutex_);
  var_index_.clear();
  eq_index_.clear();
  var_index_built_ = false;
  eq_index_built_ = false;
}

void ConicProgram::check_var(VarId v) const {
  if (v.index < 0 || static_cast<std::size_t>(v.index) >= variables_.size()) {
    throw std::out_of_range("conic program: variable id " + std::to_string(v.index) + " out of range");
  }
}

VarId ConicProgram::add_variable(std::string name, double lower, double upper) {
  variables_.push_back({std::move(name), lower, upper});
  objective_.linear.push_back(0.0);
  objective_.quadratic.push_back(0.0);
  invalidate_index();
  return VarId{static_cast<int>(variables_.size()) - 1};
}

EqRowId ConicProgram::add_equality(std::string name, std::vector<Term> terms, double rhs) {
  equalities_.push_back({std::move(name), std::move(terms), rhs});
  invalidate_index();
  return EqRowId{static_cast<int>(equalities_.size()) - 1};
}

int ConicProgram::add_inequality(std::string name, std::vector<Term> terms, double rhs) {
  inequalities_.push_back({std::move(name), std::move(terms), rhs});
  return static_cast<int>(inequalities_.size()) - 1;
}

int ConicProgram::add_rotated_cone(std::string name, AffineExpr u, AffineExpr w, std::vector<AffineExpr> z) {
  cones_.push_back({std::move(name), std::move(u), std::move(w), std::move(z)});
  return static_cast<int>(cones_.size()) - 1;
}

void ConicProgram::add_linear_cost(VarId v, double coef) {
  check_var(v);
  objective_.linear[static_cast<std::size_t>(v.index)] += coef;
}

void ConicProgram::add_quadratic_cost(VarId v, double coef) {
  check_var(v);
  objective_.quadratic[static_cast<std::size_t>(v.index)] += coef;
}

void ConicProgram::set_bounds(VarId v, double lower, double upper) {
  check_var(v);
  auto& var = variables_[static_cast<std::size_t>(v.index)];
  var.lower = lower;
  var.upper = upper;
}

void ConicProgram::set_equality_rhs(EqRowId row, double rhs) {
  equalities_.at(static_cast<std::size_t>(row.index)).rhs = rhs;
}

std::optional<VarId> ConicProgram::find_variable(std::string_view name) const {
  std::lock_guard lock(index_mutex_);
  if (!var_index_built_) {
    var_index_.reserve(variables_.size());
    for (std::size_t i = 0; i < variables_.size(); ++i) var_index_.emplace(variables_[i].name, static_cast<int>(i));
    var_index_built_ = true;
  }
  auto it = var_index_.find(std::string(name));
  if (it == var_index_.end()) return std::nullopt;
  return VarId{it->second};
}

std::optional<EqRowId> ConicProgram::find_equality(std::string_view name) const {
  std::lock_guard lock(index_mutex_);
  if (!eq_index_built_) {
    eq_index_.reserve(equalities_.size());
    for (std::size_t i = 0; i < equalities_.size(); ++i) eq_index_.emplace(equalities_[i].name, static_cast<int>(i));
    eq_index_built_ = true;
  }
  auto it = eq_index_.find(std::string(name));
  if (it == eq_index_.end()) return std::nullopt;
  return EqRowId{it->second};
}

double evaluate(const std::vector<Term>& terms, const std::vector<double>& x) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.coef * x[static_cast<std::size_t>(t.var.index)];
  return acc;
}

double evaluate(const AffineExpr& e, const std::vector<double>& x) { return evaluate(e.terms, x) + e.constant; }

double ConicProgram::evaluate_objective(const std::vector<double>& x) const {
  double acc = objective_.constant;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    acc += objective_.linear[i] * x[i] + objective_.quadratic[i] * x[i] * x[i];
  }
  return acc;
}

void ConicProgram::validate() const {
  std::ostringstream problems;
  int count = 0;
  const auto n = static_cast<int>(variables_.size());
  auto note = [&](const std::string& what) {
    problems << "\n  - " << what;
    ++count;
  };
  auto check_terms = [&](const std::string& owner, const std::vector<Term>& terms) {
    for (const auto& t : terms) {
      if (t.var.index < 0 || t.var.index >= n) note(owner + " references missing variable " + std::to_string(t.var.index));
      if (!std::isfinite(t.coef)) note(owner + " has a non-finite coefficient");
    }
  };
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) note("variable " + v.name + " has invalid bounds");
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (objective_.quadratic[i] < 0.0) note("variable " + variables_[i].name + " has a negative quadratic cost");
    if (!std::isfinite(objective_.linear[i]) || !std::isfinite(objective_.quadratic[i])) {
      note("variable " + variables_[i].name + " has a non-finite cost");
    }
  }
  for (const auto& r : equalities_) {
    check_terms("equality " + r.name, r.terms);
    if (!std::isfinite(r.rhs)) note("equality " + r.name + " has a non-finite rhs");
  }
  for (const auto& r : inequalities_) {
    check_terms("inequality " + r.name, r.terms);
    if (!std::isfinite(r.rhs)) note("inequality " + r.name + " has a non-finite rhs");
  }
  for (const auto& c : cones_) {
    check_terms("cone " + c.name, c.u.terms);
    check_terms("cone " + c.name, c.w.terms);
    for (const auto& z : c.z) check_terms("cone " + c.name, z.terms);
  }
  if (count > 0) {
    throw std::invalid_argument("invalid conic program (" + std::to_string(count) + " problems):" + problems.str());
  }
}

}  // namespace windflow::conic
