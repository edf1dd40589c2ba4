#include "windflow/wind/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace windflow::wind {

FarmScenarioList farm_scenarios(const grid::WindFarm& farm, const WindDistribution& dist,
                                const std::map<std::string, PowerCurve>& curves, int count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("farm '" + farm.id + "': scenario count must be at least 1");
  std::vector<const PowerCurve*> turbine_curve;
  for (const auto& g : farm.turbines) {
    const auto it = curves.find(g.model);
    if (it == curves.end()) throw std::invalid_argument("farm '" + farm.id + "': no power curve for '" + g.model + "'");
    if (std::abs(it->second.rated_mw - g.rated_mw) > 1e-9 * std::max(1.0, g.rated_mw)) {
      throw std::invalid_argument("farm '" + farm.id + "': turbine '" + g.model + "' is rated " +
                                  std::to_string(g.rated_mw) + " MW but its curve peaks at " +
                                  std::to_string(it->second.rated_mw) + " MW");
    }
    turbine_curve.insert(turbine_curve.end(), static_cast<std::size_t>(g.count), &it->second);
  }

  FarmScenarioList out{farm.id, farm.wake_loss, farm.power_factor_min, {}};
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> jitter(0.95, 1.05);
  for (int j = 1; j <= count; ++j) {
    FarmScenario s;
    s.base_speed = dist.quantile((j - 0.5) / count);
    s.speeds.reserve(turbine_curve.size());
    for (const PowerCurve* curve : turbine_curve) {
      const double u = s.base_speed * jitter(gen);
      s.speeds.push_back(u);
      s.power_mw += power_output(*curve, u);
      s.weight += dist.pdf(u);
    }
    out.entries.push_back(std::move(s));
  }
  return out;
}

ScenarioSet combine(std::span<const FarmScenarioList> lists, double s_base) {
  if (lists.empty()) throw std::invalid_argument("no farm scenario lists to combine");
  const auto nf = lists.size();
  ScenarioSet set;
  std::vector<std::vector<double>> prob(nf);
  std::vector<std::vector<acopf::WindLimits>> window(nf);
  std::size_t total = 1;
  for (std::size_t e = 0; e < nf; ++e) {
    const auto& l = lists[e];
    if (l.entries.empty()) throw std::invalid_argument("farm '" + l.farm_id + "' has no scenarios");
    double norm = 0.0;
    for (const auto& s : l.entries) norm += s.weight;
    if (!(norm > 0.0)) throw std::invalid_argument("farm '" + l.farm_id + "': scenario weights sum to zero");
    for (const auto& s : l.entries) {
      prob[e].push_back(s.weight / norm);
      window[e].push_back(acopf::wind_window((1.0 - l.wake_loss) * s.power_mw / s_base, l.power_factor_min));
    }
    set.farm_ids.push_back(l.farm_id);
    set.per_farm_counts.push_back(static_cast<int>(l.entries.size()));
    total *= l.entries.size();
  }

  set.scenarios.reserve(total);
  std::vector<int> choice(nf, 0);
  for (std::size_t j = 0; j < total; ++j) {
    Scenario s;
    s.j = static_cast<int>(j + 1);
    s.pi = 1.0;
    s.choice = choice;
    for (std::size_t e = 0; e < nf; ++e) {
      const auto c = static_cast<std::size_t>(choice[e]);
      s.pi *= prob[e][c];
      s.farms.push_back(window[e][c]);
    }
    set.scenarios.push_back(std::move(s));
    // Odometer increment, last farm fastest.
    for (std::size_t e = nf; e-- > 0;) {
      if (++choice[e] < set.per_farm_counts[e]) break;
      choice[e] = 0;
    }
  }
  return set;
}

ScenarioSet make_scenario_set(std::vector<std::string> farm_ids,
                              const std::vector<std::pair<double, std::vector<acopf::WindLimits>>>& rows) {
  ScenarioSet set;
  set.farm_ids = std::move(farm_ids);
  set.per_farm_counts.assign(set.farm_ids.size(), 0);
  for (const auto& [pi, farms] : rows) {
    if (farms.size() != set.farm_ids.size()) throw std::invalid_argument("scenario window count does not match farms");
    Scenario s;
    s.j = static_cast<int>(set.scenarios.size() + 1);
    s.pi = pi;
    s.farms = farms;
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

nlohmann::ordered_json to_json(const ScenarioSet& s) {
  nlohmann::ordered_json doc;
  doc["format"] = "windflow-scenarios/1";
  doc["farms"] = s.farm_ids;
  doc["per_farm_counts"] = s.per_farm_counts;
  auto& arr = doc["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& sc : s.scenarios) {
    nlohmann::ordered_json row;
    row["j"] = sc.j;
    row["pi"] = sc.pi;
    auto& farms = row["farms"] = nlohmann::ordered_json::object();
    for (std::size_t e = 0; e < s.farm_ids.size(); ++e) {
      farms[s.farm_ids[e]] = {{"p_max_pu", sc.farms[e].p_max},
                              {"q_max_pu", sc.farms[e].q_max},
                              {"q_min_pu", sc.farms[e].q_min}};
    }
    arr.push_back(std::move(row));
  }
  return doc;
}

ScenarioSet scenarios_from_json(const nlohmann::json& doc) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("scenario file: " + m); };
  if (!doc.is_object() || doc.value("format", "") != "windflow-scenarios/1") {
    fail("expected format \"windflow-scenarios/1\"");
  }
  ScenarioSet set;
  try {
    set.farm_ids = doc.at("farms").get<std::vector<std::string>>();
    if (doc.contains("per_farm_counts")) set.per_farm_counts = doc.at("per_farm_counts").get<std::vector<int>>();
    const auto& arr = doc.at("scenarios");
    if (!arr.is_array() || arr.empty()) fail("no scenarios");
    double total = 0.0;
    for (const auto& row : arr) {
      Scenario s;
      s.j = row.at("j").get<int>();
      s.pi = row.at("pi").get<double>();
      if (!(s.pi >= 0.0)) fail("scenario " + std::to_string(s.j) + " has a negative probability");
      total += s.pi;
      const auto& farms = row.at("farms");
      for (const auto& id : set.farm_ids) {
        if (!farms.contains(id)) fail("scenario " + std::to_string(s.j) + " lacks farm '" + id + "'");
        const auto& f = farms.at(id);
        acopf::WindLimits w;
        w.p_max = f.at("p_max_pu").get<double>();
        w.q_max = f.at("q_max_pu").get<double>();
        w.q_min = f.contains("q_min_pu") ? f.at("q_min_pu").get<double>() : -w.q_max;
        if (w.p_max < 0.0 || w.q_min > w.q_max) fail("scenario " + std::to_string(s.j) + ": bad window for '" + id + "'");
        s.farms.push_back(w);
      }
      set.scenarios.push_back(std::move(s));
    }
    if (std::abs(total - 1.0) > 1e-6) fail("probabilities sum to " + std::to_string(total));
    for (auto& s : set.scenarios) s.pi /= total;
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  return set;
}

ScenarioSet load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
  try {
    return scenarios_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void save_scenarios(const std::filesystem::path& path, const ScenarioSet& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(s).dump(2) << '\n';
}

std::string scenario_csv(const ScenarioSet& s) {
  std::ostringstream out;
  out.precision(17);
  out << "j,pi";
  for (const auto& id : s.farm_ids) out << ',' << id << "_p_max_pu";
  out << '\n';
  for (const auto& sc : s.scenarios) {
    out << sc.j << ',' << sc.pi;
    for (const auto& f : sc.farms) out << ',' << f.p_max;
    out << '\n';
  }
  return out.str();
}

std::vector<double> load_measurements(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open measurements " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line.substr(0, line.find(',')));
    double u = 0.0;
    if (!(row >> u)) throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) + ": not a number");
    out.push_back(u);
  }
  return out;
}

void save_measurements(const std::filesystem::path& path, std::span<const double> speeds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "speed_mps\n";
  for (double u : speeds) out << u << '\n';
}

}  // namespace windflow::wind
