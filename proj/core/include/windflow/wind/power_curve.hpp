#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace windflow::wind {

/// Datasheet power curve of one turbine model: (speed m/s, power MW) points
/// with strictly increasing speeds. The first point is the cut-in speed and
/// the last the cut-out speed; output is zero outside that range.
struct PowerCurve {
  std::string model;
  std::vector<std::pair<double, double>> points;
  double rated_mw = 0.0;

  /// Checks ordering and sign and sets rated_mw to the largest power.
  /// Throws std::invalid_argument.
  static PowerCurve from_points(std::string model, std::vector<std::pair<double, double>> points);
};

/// Piecewise-linear interpolation of the curve; 0 outside [cut-in, cut-out].
[[nodiscard]] double power_output(const PowerCurve& curve, double speed);

/// Reads a two-column CSV (`speed,power` header, MW). The model name is the
/// file stem unless given.
[[nodiscard]] PowerCurve load_power_curve(const std::filesystem::path& path, std::string model = {});

/// Every *.csv in a directory, keyed by model name.
[[nodiscard]] std::map<std::string, PowerCurve> load_power_curves(const std::filesystem::path& dir);

}  // namespace windflow::wind
