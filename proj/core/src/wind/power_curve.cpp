#include "windflow/wind/power_curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace windflow::wind {

PowerCurve PowerCurve::from_points(std::string model, std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("power curve '" + model + "' needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [u, p] = points[i];
    if (!std::isfinite(u) || !std::isfinite(p) || u < 0.0 || p < 0.0) {
      throw std::invalid_argument("power curve '" + model + "': point " + std::to_string(i + 1) +
                                  " must have non-negative speed and power");
    }
    if (i > 0 && !(u > points[i - 1].first)) {
      throw std::invalid_argument("power curve '" + model + "': speeds must be strictly increasing");
    }
  }
  PowerCurve c{std::move(model), std::move(points), 0.0};
  for (const auto& pt : c.points) c.rated_mw = std::max(c.rated_mw, pt.second);
  return c;
}

double power_output(const PowerCurve& curve, double speed) {
  const auto& pts = curve.points;
  if (pts.empty() || speed < pts.front().first || speed > pts.back().first) return 0.0;
  const auto it = std::lower_bound(pts.begin(), pts.end(), speed,
                                   [](const auto& pt, double u) { return pt.first < u; });
  if (it->first == speed) return it->second;
  const auto& [u1, p1] = *it;
  const auto& [u0, p0] = *(it - 1);
  return p0 + (p1 - p0) * (speed - u0) / (u1 - u0);
}

PowerCurve load_power_curve(const std::filesystem::path& path, std::string model) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open power curve " + path.string());
  if (model.empty()) model = path.stem().string();
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<double, double>> points;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double u = 0.0, p = 0.0;
    if (!(row >> u >> p)) {
      throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) + ": expected speed,power");
    }
    points.emplace_back(u, p);
  }
  return PowerCurve::from_points(std::move(model), std::move(points));
}

std::map<std::string, PowerCurve> load_power_curves(const std::filesystem::path& dir) {
  std::map<std::string, PowerCurve> out;
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir.string());
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    auto c = load_power_curve(e.path());
    out.emplace(c.model, std::move(c));
  }
  return out;
}

}  // namespace windflow::wind
