#pragma once

#include <iosfwd>
#include <vector>

#include "windflow/conic/program.hpp"
#include "windflow/conic/solver.hpp"

namespace windflow::conic {

/// Maximum constraint violation per constraint class. All entries are >= 0.
struct ResidualReport {
  double equality = 0.0;    // max |a·x - b|
  double inequality = 0.0;  // max(0, a·x - b)
  double cone = 0.0;        // max(0, ||z||^2 - 2uw, -u, -w) in the cone's units
  double bounds = 0.0;      // max distance outside [lower, upper]

  [[nodiscard]] double max() const;
  [[nodiscard]] bool within(double tol) const { return max() <= tol; }
};

/// Re-evaluates every row of `program` at `x`. Throws std::invalid_argument
/// when `x` does not hold one value per variable.
[[nodiscard]] ResidualReport check_point(const ConicProgram& program, const std::vector<double>& x);
[[nodiscard]] ResidualReport check_solution(const ConicProgram& program, const Solution& solution);

/// Writes the program in Conic Benchmark Format (CBF, version 3). Quadratic
/// objective terms are emitted through epigraph variables and QR cones.
void write_cbf(const ConicProgram& program, std::ostream& out);

}  // namespace windflow::conic
