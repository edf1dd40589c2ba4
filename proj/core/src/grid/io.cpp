#include "windflow/grid/io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <sstream>

#include "windflow/grid/topology.hpp"

namespace windflow::grid {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join_issues(const std::string& summary, const std::vector<std::string>& issues) {
  std::string out = summary;
  for (const auto& i : issues) out += "\n  - " + i;
  return out;
}

// Reads typed fields from JSON objects, recording every problem instead of
// stopping at the first.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string>& issues) : issues_(issues) {}

  double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (!fallback) issues_.push_back(path + "." + key + ": missing required number");
      return fallback.value_or(0.0);
    }
    if (!it->is_number()) {
      issues_.push_back(path + "." + key + ": expected a number");
      return fallback.value_or(0.0);
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) issues_.push_back(path + "." + key + ": must be finite");
    return v;
  }

  std::optional<double> optional_number(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return number(obj, path, key, 0.0);
  }

  int integer(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
      issues_.push_back(path + "." + key + ": expected an integer");
      return 0;
    }
    return it->get<int>();
  }

  // Identifiers may be written as strings or integers.
  std::string id(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      issues_.push_back(path + "." + key + ": missing identifier");
      return {};
    }
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    issues_.push_back(path + "." + key + ": identifier must be a string or integer");
    return {};
  }

  std::string text(const json& obj, const std::string& path, const char* key, std::optional<std::string> fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (!fallback) issues_.push_back(path + "." + key + ": missing required string");
      return fallback.value_or("");
    }
    if (!it->is_string()) {
      issues_.push_back(path + "." + key + ": expected a string");
      return fallback.value_or("");
    }
    return it->get<std::string>();
  }

  void known_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool found = false;
      for (auto a : allowed) found = found || a == it.key();
      if (!found) issues_.push_back(path + ": unknown field '" + it.key() + "'");
    }
  }

  const json& array(const json& doc, const char* key) {
    static const json empty = json::array();
    auto it = doc.find(key);
    if (it == doc.end()) return empty;
    if (!it->is_array()) {
      issues_.push_back(std::string(key) + ": expected an array");
      return empty;
    }
    return *it;
  }

  bool object(const json& v, const std::string& path) {
    if (v.is_object()) return true;
    issues_.push_back(path + ": expected an object");
    return false;
  }

 private:
  std::vector<std::string>& issues_;
};

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// Returns w with w / s == v whenever such a double exists near v * s, so that
// per-unit values survive a save/load cycle bit for bit.
double scale_exact(double v, double s) {
  double w = v * s;
  if (w / s == v) return w;
  double up = w;
  double down = w;
  for (int k = 0; k < 8; ++k) {
    up = std::nextafter(up, HUGE_VAL);
    down = std::nextafter(down, -HUGE_VAL);
    if (up / s == v) return up;
    if (down / s == v) return down;
  }
  return w;
}

// Applies f(value, factor) to every quantity that has a power unit.
template <typename F>
GridCase convert(const GridCase& in, F f) {
  GridCase c = in;
  const double s = in.s_base;
  const double s2 = s * s;
  c.voll = f(in.voll, 1.0 / s);
  for (auto& b : c.buses) {
    b.shunt_g = f(b.shunt_g, s);
    b.shunt_b = f(b.shunt_b, s);
    b.p_load = f(b.p_load, s);
    b.q_load = f(b.q_load, s);
  }
  for (auto& l : c.lines) {
    l.capacity_sq = f(l.capacity_sq, s2);
    l.b_min = f(l.b_min, s);
    l.b_max = f(l.b_max, s);
  }
  for (auto& g : c.generators) {
    g.p_min = f(g.p_min, s);
    g.p_max = f(g.p_max, s);
    g.q_min = f(g.q_min, s);
    g.q_max = f(g.q_max, s);
    g.cost_c1 = f(g.cost_c1, 1.0 / s);
    g.cost_c2 = f(g.cost_c2, 1.0 / s2);
  }
  for (auto& w : c.wind_farms) w.cost_c1 = f(w.cost_c1, 1.0 / s);
  c.reindex();
  return c;
}

GridCase parse_document(const json& doc) {
  std::vector<std::string> issues;
  FieldReader rd(issues);
  if (!doc.is_object()) throw CaseError("case document must be a JSON object", {});
  rd.known_keys(doc, "case",
                {"format", "name", "s_base_mva", "voll", "buses", "lines", "converters", "generators", "wind_farms"});
  const std::string format = rd.text(doc, "case", "format", std::nullopt);
  if (!format.empty() && format != kCaseFormat) {
    issues.push_back("case.format: expected '" + std::string(kCaseFormat) + "', got '" + format + "'");
  }

  GridCase c;
  c.name = rd.text(doc, "case", "name", std::string{});
  c.s_base = rd.number(doc, "case", "s_base_mva", std::nullopt);
  const std::optional<double> voll = rd.optional_number(doc, "case", "voll");

  const auto& buses = rd.array(doc, "buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string path = "buses[" + std::to_string(i) + "]";
    if (!rd.object(buses[i], path)) continue;
    const auto& o = buses[i];
    rd.known_keys(o, path, {"id", "kind", "base_kv", "v_min_sq", "v_max_sq", "shunt_g", "shunt_b", "p_load", "q_load"});
    Bus b;
    b.id = rd.id(o, path, "id");
    const auto kind = rd.text(o, path, "kind", std::string("AC"));
    if (auto k = parse_bus_kind(kind)) {
      b.kind = *k;
    } else {
      issues.push_back(path + ".kind: unknown bus kind '" + kind + "'");
    }
    b.base_kv = rd.number(o, path, "base_kv", 0.0);
    b.v_min_sq = rd.number(o, path, "v_min_sq", std::nullopt);
    b.v_max_sq = rd.number(o, path, "v_max_sq", std::nullopt);
    b.shunt_g = rd.number(o, path, "shunt_g", 0.0);
    b.shunt_b = rd.number(o, path, "shunt_b", 0.0);
    b.p_load = rd.number(o, path, "p_load", 0.0);
    b.q_load = rd.number(o, path, "q_load", 0.0);
    c.buses.push_back(std::move(b));
  }

  const auto& lines = rd.array(doc, "lines");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string path = "lines[" + std::to_string(i) + "]";
    if (!rd.object(lines[i], path)) continue;
    const auto& o = lines[i];
    rd.known_keys(o, path, {"id", "kind", "from_bus", "to_bus", "r", "x", "capacity_sq", "b_min", "b_max"});
    Line l;
    l.id = rd.id(o, path, "id");
    const auto kind = rd.text(o, path, "kind", std::nullopt);
    if (auto k = parse_line_kind(kind)) {
      l.kind = *k;
    } else if (!kind.empty()) {
      issues.push_back(path + ".kind: unknown line kind '" + kind + "'");
    }
    l.from_bus = rd.id(o, path, "from_bus");
    l.to_bus = rd.id(o, path, "to_bus");
    l.r = rd.number(o, path, "r", 0.0);
    l.x = rd.number(o, path, "x", 0.0);
    l.capacity_sq = rd.number(o, path, "capacity_sq", std::nullopt);
    l.b_min = rd.number(o, path, "b_min", 0.0);
    l.b_max = rd.number(o, path, "b_max", 0.0);
    c.lines.push_back(std::move(l));
  }

  const auto& convs = rd.array(doc, "converters");
  for (std::size_t i = 0; i < convs.size(); ++i) {
    const std::string path = "converters[" + std::to_string(i) + "]";
    if (!rd.object(convs[i], path)) continue;
    const auto& o = convs[i];
    rd.known_keys(o, path, {"id", "pc_bus", "dc_bus", "r_shunt", "m_sq_min", "m_sq_max", "r_sw"});
    Converter v;
    v.id = rd.id(o, path, "id");
    v.pc_bus = rd.id(o, path, "pc_bus");
    v.dc_bus = rd.id(o, path, "dc_bus");
    v.r_shunt = rd.number(o, path, "r_shunt", std::nullopt);
    v.m_sq_min = rd.number(o, path, "m_sq_min", 0.25);
    v.m_sq_max = rd.number(o, path, "m_sq_max", 1.0);
    v.r_sw = rd.optional_number(o, path, "r_sw");
    c.converters.push_back(std::move(v));
  }

  const auto& gens = rd.array(doc, "generators");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string path = "generators[" + std::to_string(i) + "]";
    if (!rd.object(gens[i], path)) continue;
    const auto& o = gens[i];
    rd.known_keys(o, path, {"id", "bus", "p_min", "p_max", "q_min", "q_max", "cost_c0", "cost_c1", "cost_c2"});
    Generator g;
    g.id = rd.id(o, path, "id");
    g.bus = rd.id(o, path, "bus");
    g.p_min = rd.number(o, path, "p_min", 0.0);
    g.p_max = rd.number(o, path, "p_max", std::nullopt);
    g.q_min = rd.number(o, path, "q_min", 0.0);
    g.q_max = rd.number(o, path, "q_max", 0.0);
    g.cost_c0 = rd.number(o, path, "cost_c0", 0.0);
    g.cost_c1 = rd.number(o, path, "cost_c1", 0.0);
    g.cost_c2 = rd.number(o, path, "cost_c2", 0.0);
    c.generators.push_back(std::move(g));
  }

  const auto& farms = rd.array(doc, "wind_farms");
  for (std::size_t i = 0; i < farms.size(); ++i) {
    const std::string path = "wind_farms[" + std::to_string(i) + "]";
    if (!rd.object(farms[i], path)) continue;
    const auto& o = farms[i];
    rd.known_keys(o, path, {"id", "bus", "turbines", "power_factor_min", "wake_loss", "cost_c1"});
    WindFarm w;
    w.id = rd.id(o, path, "id");
    w.bus = rd.id(o, path, "bus");
    w.power_factor_min = rd.number(o, path, "power_factor_min", 0.95);
    w.wake_loss = rd.number(o, path, "wake_loss", 0.15);
    w.cost_c1 = rd.number(o, path, "cost_c1", 0.0);
    auto tit = o.find("turbines");
    if (tit == o.end() || !tit->is_array()) {
      issues.push_back(path + ".turbines: expected an array");
    } else {
      for (std::size_t t = 0; t < tit->size(); ++t) {
        const std::string tpath = path + ".turbines[" + std::to_string(t) + "]";
        if (!rd.object((*tit)[t], tpath)) continue;
        rd.known_keys((*tit)[t], tpath, {"model", "count", "rated_mw"});
        TurbineGroup g;
        g.model = rd.text((*tit)[t], tpath, "model", std::nullopt);
        g.count = rd.integer((*tit)[t], tpath, "count");
        g.rated_mw = rd.number((*tit)[t], tpath, "rated_mw", std::nullopt);
        w.turbines.push_back(std::move(g));
      }
    }
    c.wind_farms.push_back(std::move(w));
  }

  if (!issues.empty()) throw CaseError(join_issues("malformed case document", issues), issues);
  if (!(c.s_base > 0.0)) throw CaseError("s_base_mva must be positive", {"case.s_base_mva: must be positive"});

  c.voll = voll.value_or(0.0);
  c = to_per_unit(c);
  // Default VoLL: 100 x the most expensive marginal cost at full output.
  if (!voll) c.voll = 100.0 * c.max_marginal_cost();

  const auto report = validate(c);
  if (!report.ok()) throw CaseError(join_issues("invalid case", report.violations), report.violations);
  return c;
}

}  // namespace

CaseError::CaseError(std::string summary, std::vector<std::string> issues)
    : std::runtime_error(std::move(summary)), issues_(std::move(issues)) {}

GridCase to_physical(const GridCase& per_unit) {
  return convert(per_unit, [](double v, double s) { return scale_exact(v, s); });
}

GridCase to_per_unit(const GridCase& physical) {
  return convert(physical, [](double v, double s) { return v / s; });
}

GridCase load_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::string locus = line_column(text, e.byte);
    throw CaseError("case document is not valid JSON at " + locus, {locus + ": " + e.what()});
  }
  return parse_document(doc);
}

GridCase load_case_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CaseError("cannot open case file " + path.string(), {path.string() + ": cannot open"});
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_case(ss.str());
  } catch (const CaseError& e) {
    throw CaseError(path.string() + ": " + e.what(), e.issues());
  }
}

std::string save_case(const GridCase& pu) {
  const GridCase c = to_physical(pu);
  ordered_json doc;
  doc["format"] = kCaseFormat;
  doc["name"] = c.name;
  doc["s_base_mva"] = c.s_base;
  doc["voll"] = c.voll;
  auto& buses = doc["buses"] = ordered_json::array();
  for (const auto& b : c.buses) {
    buses.push_back({{"id", b.id},
                     {"kind", to_string(b.kind)},
                     {"base_kv", b.base_kv},
                     {"v_min_sq", b.v_min_sq},
                     {"v_max_sq", b.v_max_sq},
                     {"shunt_g", b.shunt_g},
                     {"shunt_b", b.shunt_b},
                     {"p_load", b.p_load},
                     {"q_load", b.q_load}});
  }
  auto& lines = doc["lines"] = ordered_json::array();
  for (const auto& l : c.lines) {
    ordered_json o = {{"id", l.id},     {"kind", to_string(l.kind)}, {"from_bus", l.from_bus}, {"to_bus", l.to_bus},
                      {"r", l.r},       {"x", l.x},                  {"capacity_sq", l.capacity_sq}};
    if (l.kind == LineKind::SVC || l.b_min != 0.0 || l.b_max != 0.0) {
      o["b_min"] = l.b_min;
      o["b_max"] = l.b_max;
    }
    lines.push_back(std::move(o));
  }
  auto& convs = doc["converters"] = ordered_json::array();
  for (const auto& v : c.converters) {
    ordered_json o = {{"id", v.id},           {"pc_bus", v.pc_bus},     {"dc_bus", v.dc_bus},
                      {"r_shunt", v.r_shunt}, {"m_sq_min", v.m_sq_min}, {"m_sq_max", v.m_sq_max}};
    if (v.r_sw) o["r_sw"] = *v.r_sw;
    convs.push_back(std::move(o));
  }
  auto& gens = doc["generators"] = ordered_json::array();
  for (const auto& g : c.generators) {
    gens.push_back({{"id", g.id},
                    {"bus", g.bus},
                    {"p_min", g.p_min},
                    {"p_max", g.p_max},
                    {"q_min", g.q_min},
                    {"q_max", g.q_max},
                    {"cost_c0", g.cost_c0},
                    {"cost_c1", g.cost_c1},
                    {"cost_c2", g.cost_c2}});
  }
  auto& farms = doc["wind_farms"] = ordered_json::array();
  for (const auto& w : c.wind_farms) {
    ordered_json turbines = ordered_json::array();
    for (const auto& t : w.turbines) turbines.push_back({{"model", t.model}, {"count", t.count}, {"rated_mw", t.rated_mw}});
    farms.push_back({{"id", w.id},
                     {"bus", w.bus},
                     {"turbines", std::move(turbines)},
                     {"power_factor_min", w.power_factor_min},
                     {"wake_loss", w.wake_loss},
                     {"cost_c1", w.cost_c1}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace windflow::grid
