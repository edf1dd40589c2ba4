#pragma once

#include <string>
#include <vector>

#include "windflow/grid/types.hpp"

namespace windflow::grid {

struct ValidationReport {
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Checks every case invariant and lists each violation.
[[nodiscard]] ValidationReport validate(const GridCase& c);

/// Bus-to-line incidence, dense [bus][line].
/// plus: +1 at the sending end, -1 at the receiving end.
/// minus: 1 at the sending end, 0 elsewhere.
struct IncidenceMatrices {
  std::vector<std::vector<int>> plus;
  std::vector<std::vector<int>> minus;
};

[[nodiscard]] IncidenceMatrices incidence(const GridCase& c);

/// Resolved view of the case used by the model builders.
struct Topology {
  struct ConverterLinks {
    int converter = -1;
    int pc_bus = -1;
    int dc_bus = -1;
    int converter_line = -1;  // VSC_CONVERTER line between dc_bus and pc_bus
    int transformer = -1;     // PC_TRANSFORMER leaving pc_bus
  };

  std::vector<int> line_from;
  std::vector<int> line_to;
  /// Buses that only terminate an SVC line; they carry no balance rows.
  std::vector<bool> svc_terminal;
  std::vector<ConverterLinks> converters;
  /// Converter index for each VSC_CONVERTER / PC_TRANSFORMER line, else -1.
  std::vector<int> converter_of_line;
  /// Connected groups of AC/PC buses joined by AC branches; each gets its own angle reference.
  std::vector<std::vector<int>> ac_islands;
  /// Reference bus per island (first generator or wind bus in file order, else first bus).
  std::vector<int> island_slack;
  std::vector<std::vector<int>> generators_at_bus;
  std::vector<std::vector<int>> wind_at_bus;
};

/// Requires a valid case.
[[nodiscard]] Topology resolve(const GridCase& c);

}  // namespace windflow::grid
