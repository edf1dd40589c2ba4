#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "windflow/grid/types.hpp"

namespace windflow::grid {

inline constexpr std::string_view kCaseFormat = "windflow-case/1";

/// Raised for malformed or invalid case documents. `issues` lists every
/// problem found, each with its locus ("line 4, column 12" or "buses[3].v_min_sq").
class CaseError : public std::runtime_error {
 public:
  CaseError(std::string summary, std::vector<std::string> issues);
  [[nodiscard]] const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Parses a case document (MW/MVAr/MVA^2 and $/MWh units), converts to per
/// unit and validates. Throws CaseError.
[[nodiscard]] GridCase load_case(std::string_view text);
[[nodiscard]] GridCase load_case_file(const std::filesystem::path& path);

/// Inverse of load_case: writes physical units. load_case(save_case(c)) == c.
[[nodiscard]] std::string save_case(const GridCase& c);

/// Unit conversions between the document's physical units and per unit.
/// Conversion applies to loads, shunts, generator limits and costs, line
/// ratings, SVC limits and VoLL; impedances and voltages are already per unit.
[[nodiscard]] GridCase to_physical(const GridCase& per_unit);
[[nodiscard]] GridCase to_per_unit(const GridCase& physical);

}  // namespace windflow::grid
