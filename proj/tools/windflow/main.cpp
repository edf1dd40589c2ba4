// windflow command-line front end.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "windflow/acopf/model.hpp"
#include "windflow/acopf/point.hpp"
#include "windflow/conic/solver.hpp"
#include "windflow/grid/io.hpp"
#include "windflow/mbda/mbda.hpp"
#include "windflow/stochastic/two_stage.hpp"
#include "windflow/wind/distribution.hpp"
#include "windflow/wind/power_curve.hpp"
#include "windflow/wind/scenarios.hpp"

#ifndef WINDFLOW_GIT_DESCRIBE
#define WINDFLOW_GIT_DESCRIBE "unknown"
#endif
#ifndef WINDFLOW_DEFAULT_CURVES
#define WINDFLOW_DEFAULT_CURVES "curves"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace windflow;

namespace {

enum Exit : int { kOk = 0, kInput = 2, kSolver = 3, kNotConverged = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs f, reporting any failure as an input error of the named stage.
template <class F>
auto input_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const grid::CaseError& e) {
    std::string msg = stage + ": " + e.what();
    for (const auto& issue : e.issues()) msg += "\n  - " + issue;
    throw InputError(msg);
  } catch (const std::exception& e) {
    throw InputError(stage + ": " + e.what());
  }
}

template <class F>
auto solver_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw InputError(stage + ": " + e.what());
  } catch (const std::exception& e) {
    throw SolverError(stage + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void prepare_out(const fs::path& dir) {
  input_stage("creating output directory", [&] {
    fs::create_directories(dir);
    return 0;
  });
}

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> args)
      : command_(std::move(command)), args_(std::move(args)), start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& key, const std::string& path) { inputs_[key] = path; }
  void seed(std::uint64_t s) { seed_ = s; }
  void solver(const conic::SolverOptions& o) { solver_ = o; }

  void write(const fs::path& dir) const {
    json j;
    j["command"] = command_;
    j["arguments"] = args_;
    j["inputs"] = inputs_;
    j["seed"] = seed_ ? json(*seed_) : json(nullptr);
    if (solver_) {
      const char* env = std::getenv("WINDFLOW_SOLVER");
      j["solver"] = {{"backend", env != nullptr && *env != '\0' ? env : conic::available_backends().front()},
                     {"feasibility_tol", solver_->feasibility_tol},
                     {"gap", solver_->gap},
                     {"abs_gap", solver_->abs_gap},
                     {"max_iterations", solver_->max_iterations}};
    }
    j["build"] = WINDFLOW_GIT_DESCRIBE;
    j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_json(dir / "manifest.json", j);
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::map<std::string, std::string> inputs_;
  std::optional<std::uint64_t> seed_;
  std::optional<conic::SolverOptions> solver_;
  std::chrono::steady_clock::time_point start_;
};

grid::GridCase read_case(const std::string& path) {
  return input_stage("reading case " + path, [&] { return grid::load_case_file(path); });
}

void check_backend() {
  input_stage("selecting solver backend", [] {
    (void)conic::make_solver();
    return 0;
  });
}

// Largest residual of each family over several operating points.
acopf::GapReport worst_gaps(const grid::GridCase& c, const std::vector<acopf::OperatingPoint>& points) {
  acopf::GapReport worst;
  for (const auto& p : points) {
    const auto g = acopf::feasibility_gap(c, p);
    for (std::size_t k = 0; k < worst.max_abs.size(); ++k) worst.max_abs[k] = std::max(worst.max_abs[k], g.max_abs[k]);
  }
  return worst;
}

// ---- run-opf ---------------------------------------------------------------

struct RunOpfArgs {
  std::string case_path;
  std::string model = "soc";
  std::string out;
};

int run_opf(const RunOpfArgs& a, Manifest& manifest) {
  check_backend();
  const auto c = read_case(a.case_path);
  manifest.input("case", a.case_path);
  const conic::SolverOptions opts;
  manifest.solver(opts);
  const auto kind = a.model == "dc" ? acopf::ModelKind::Dc : acopf::ModelKind::Soc;
  const auto model = input_stage("building the model",
                                 [&] { return kind == acopf::ModelKind::Dc ? acopf::build_dc_opf(c) : acopf::build_soc_acopf(c); });
  const auto sol = solver_stage("solving the OPF", [&] { return conic::make_solver()->solve(model.program, opts); });
  if (!sol.optimal()) throw SolverError("solving the OPF: " + std::string(conic::to_string(sol.status)));
  const auto point = solver_stage("recovering the operating point", [&] { return acopf::recover_physical(c, model, sol); });
  const auto gaps = acopf::feasibility_gap(c, point);

  prepare_out(a.out);
  json j;
  j["case"] = c.name;
  j["model"] = acopf::to_string(kind);
  j["status"] = conic::to_string(sol.status);
  j["objective"] = sol.objective_value;
  j["iterations"] = sol.info.iterations;
  auto& gens = j["generators"] = json::array();
  for (std::size_t g = 0; g < c.generators.size(); ++g) {
    gens.push_back({{"id", c.generators[g].id},
                    {"p_mw", point.generators[g].p * c.s_base},
                    {"q_mvar", point.generators[g].q * c.s_base}});
  }
  auto& farms = j["wind_farms"] = json::array();
  for (std::size_t w = 0; w < c.wind_farms.size(); ++w) {
    farms.push_back({{"id", c.wind_farms[w].id},
                     {"p_mw", point.wind[w].p * c.s_base},
                     {"q_mvar", point.wind[w].q * c.s_base}});
  }
  const auto shed = acopf::shed_summary(point);
  j["shed_mw"] = shed.p_shed * c.s_base;
  j["feasibility_gap"] = acopf::to_json(gaps);
  write_json(fs::path(a.out) / "solution.json", j);
  write_json(fs::path(a.out) / "point.json", acopf::to_json(c, point));
  write_text(fs::path(a.out) / "gaps.csv", acopf::gap_csv(c.name, kind, gaps));
  manifest.write(a.out);

  std::printf("%s %s objective %.10g\n", c.name.c_str(), std::string(acopf::to_string(kind)).c_str(),
              sol.objective_value);
  for (const auto f : acopf::kGapFamilies) {
    std::printf("  %-12s %.3e\n", std::string(acopf::label(f)).c_str(), gaps[f]);
  }
  return kOk;
}

// ---- gen-scenarios -----------------------------------------------------------

struct GenScenariosArgs {
  std::string case_path;
  std::vector<std::string> measurements;
  std::vector<double> synthetic;  // shape, scale, sample count
  std::string family = "weibull";
  std::vector<int> per_farm;
  std::uint64_t seed = 42;
  std::string curves = WINDFLOW_DEFAULT_CURVES;
  std::string out;
};

int gen_scenarios(const GenScenariosArgs& a, Manifest& manifest) {
  const auto c = read_case(a.case_path);
  manifest.input("case", a.case_path);
  manifest.input("curves", a.curves);
  manifest.seed(a.seed);
  const std::size_t farms = c.wind_farms.size();
  if (farms == 0) throw InputError("case " + c.name + " has no wind farms");

  auto expand = [&](std::size_t given, const char* what) {
    if (given != 1 && given != farms) {
      throw InputError(std::string(what) + ": expected 1 or " + std::to_string(farms) + " values, got " +
                       std::to_string(given));
    }
  };
  expand(a.per_farm.size(), "--per-farm");
  for (int n : a.per_farm) {
    if (n < 1) throw InputError("--per-farm: every count must be at least 1");
  }
  const auto family = input_stage("--family", [&] { return wind::parse_family(a.family); });

  // One fitted distribution per farm.
  std::vector<wind::WindDistribution> dists;
  if (!a.synthetic.empty()) {
    const double n = a.synthetic[2];
    if (!(n >= 1.0) || n != std::floor(n)) throw InputError("--synthetic: sample count must be a positive integer");
    const auto samples = input_stage("drawing synthetic measurements", [&] {
      return wind::sample(wind::WindDistribution::weibull(a.synthetic[0], a.synthetic[1]), static_cast<std::size_t>(n),
                          a.seed);
    });
    dists.assign(farms, input_stage("fitting the wind distribution", [&] { return wind::fit_distribution(samples, family); }));
  } else {
    expand(a.measurements.size(), "--measurements");
    for (std::size_t e = 0; e < farms; ++e) {
      const auto& path = a.measurements[a.measurements.size() == 1 ? 0 : e];
      manifest.input("measurements:" + c.wind_farms[e].id, path);
      const auto speeds = input_stage("reading measurements " + path, [&] { return wind::load_measurements(path); });
      dists.push_back(input_stage("fitting " + path, [&] { return wind::fit_distribution(speeds, family); }));
    }
  }

  const auto curves = input_stage("reading power curves " + a.curves, [&] { return wind::load_power_curves(a.curves); });
  std::vector<wind::FarmScenarioList> lists;
  for (std::size_t e = 0; e < farms; ++e) {
    const int count = a.per_farm[a.per_farm.size() == 1 ? 0 : e];
    lists.push_back(input_stage("scenarios for farm " + c.wind_farms[e].id, [&] {
      return wind::farm_scenarios(c.wind_farms[e], dists[e], curves, count, a.seed + 1 + e);
    }));
  }
  const auto set = input_stage("combining farm scenarios", [&] { return wind::combine(lists, c.s_base); });

  prepare_out(a.out);
  auto doc = wind::to_json(set);
  auto& fitted = doc["distributions"] = json::array();
  for (std::size_t e = 0; e < farms; ++e) {
    fitted.push_back({{"farm", c.wind_farms[e].id},
                      {"family", wind::to_string(dists[e].family)},
                      {"shape", dists[e].shape},
                      {"scale", dists[e].scale},
                      {"samples", dists[e].source_sample_size}});
  }
  write_json(fs::path(a.out) / "scenarios.json", doc);
  write_text(fs::path(a.out) / "scenarios.csv", wind::scenario_csv(set));
  manifest.write(a.out);
  std::printf("%zu\n", set.size());
  return kOk;
}

// ---- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string case_path;
  std::string scenarios_path;
  std::string method = "single";
  int workers = 1;
  double gap = 0.02;
  int max_iter = 50;
  std::string out;
};

wind::ScenarioSet read_scenarios(const grid::GridCase& c, const std::string& path) {
  auto set = input_stage("reading scenarios " + path, [&] { return wind::load_scenarios(path); });
  input_stage("matching scenarios to the case", [&] { return stochastic::align_windows(c, set); });
  return set;
}

int solve(const SolveArgs& a, Manifest& manifest) {
  check_backend();
  const auto c = read_case(a.case_path);
  const auto set = read_scenarios(c, a.scenarios_path);
  manifest.input("case", a.case_path);
  manifest.input("scenarios", a.scenarios_path);
  stochastic::StochasticOptions opts;
  manifest.solver(opts.solver);

  const auto model = input_stage("building the two-stage model", [&] { return stochastic::build_two_stage(c, set, opts); });
  const auto size = stochastic::model_size(c, model);

  stochastic::StochasticSolution sol;
  std::optional<mbda::MbdaResult> bda;
  if (a.method == "single") {
    sol = solver_stage("single-stage solve", [&] { return stochastic::solve_single_stage(c, model, opts); });
    if (!sol.optimal()) throw SolverError("single-stage solve: " + std::string(conic::to_string(sol.status)));
  } else {
    mbda::MbdaOptions o;
    o.workers = a.workers;
    o.mode = a.method == "parallel-bda" ? mbda::Mode::Parallel : mbda::Mode::Serial;
    o.gap = a.gap;
    o.max_iter = a.max_iter;
    o.stochastic = opts;
    bda = solver_stage("decomposition", [&] { return mbda::run_mbda(c, set, o); });
    sol = bda->solution;
  }

  prepare_out(a.out);
  auto doc = stochastic::to_json(c, sol);
  doc["scenario_count"] = set.size();
  if (bda) {
    doc["workers"] = a.workers;
    doc["subproblems"] = bda->partition.blocks.size();
    doc["gap_target"] = a.gap;
  }
  doc["model_size"] = stochastic::to_json(size);
  write_json(fs::path(a.out) / "solution.json", doc);
  if (!sol.points.empty()) {
    json pts = json::array();
    for (std::size_t k = 0; k < sol.points.size(); ++k) {
      pts.push_back({{"j", sol.scenarios[k].j}, {"point", acopf::to_json(c, sol.points[k])}});
    }
    write_json(fs::path(a.out) / "point.json", pts);
    write_text(fs::path(a.out) / "gaps.csv", acopf::gap_csv(c.name, acopf::ModelKind::Soc, worst_gaps(c, sol.points)));
  }
  if (bda) {
    write_text(fs::path(a.out) / "trace.csv", mbda::trace_csv(bda->trace));
    write_json(fs::path(a.out) / "cuts.json", mbda::to_json(bda->cuts));
  }
  manifest.write(a.out);

  std::printf("%s %s scenarios %zu objective %.10g\n", c.name.c_str(), std::string(stochastic::to_string(sol.method)).c_str(),
              set.size(), sol.objective);
  if (bda) {
    std::printf("  lower %.10g upper %.10g iterations %d%s\n", *sol.lower_bound, *sol.upper_bound, sol.iterations,
                sol.converged ? "" : " (not converged)");
  }
  std::printf("  model: %lld variables, %lld constraints (formula: %lld variables, %lld constraints)\n", size.variables,
              size.constraints(), size.formula_variables, size.formula_constraints);
  if (!sol.converged) {
    std::fprintf(stderr, "windflow: decomposition stopped after %d iterations above the %.4g gap\n", sol.iterations, a.gap);
    return kNotConverged;
  }
  return kOk;
}

// ---- vss ---------------------------------------------------------------------

struct VssArgs {
  std::string case_path;
  std::string scenarios_path;
  std::string out;
};

int vss(const VssArgs& a, Manifest& manifest) {
  check_backend();
  const auto c = read_case(a.case_path);
  const auto set = read_scenarios(c, a.scenarios_path);
  manifest.input("case", a.case_path);
  manifest.input("scenarios", a.scenarios_path);
  const stochastic::StochasticOptions opts;
  manifest.solver(opts.solver);
  const auto v = solver_stage("value of the stochastic solution", [&] { return stochastic::compute_vss(c, set, opts); });

  prepare_out(a.out);
  auto doc = stochastic::to_json(v);
  doc["case"] = c.name;
  doc["scenario_count"] = set.size();
  write_json(fs::path(a.out) / "solution.json", doc);
  manifest.write(a.out);
  std::printf("%-16s %-16s %-16s\n", "Cost^D", "Cost^S", "VSS");
  std::printf("%-16.8g %-16.8g %-16.8g\n", v.cost_deterministic, v.cost_stochastic, v.vss);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic SOC optimal power flow for hybrid AC/DC grids with wind"};
  app.require_subcommand(1);
  std::vector<std::string> args(argv, argv + argc);

  RunOpfArgs ro;
  auto* cmd_opf = app.add_subcommand("run-opf", "Deterministic OPF with feasibility-gap report");
  cmd_opf->add_option("case", ro.case_path, "Case file")->required();
  cmd_opf->add_option("--model", ro.model, "Network model")->check(CLI::IsMember({"soc", "dc"}));
  cmd_opf->add_option("--out", ro.out, "Output directory")->required();

  GenScenariosArgs gs;
  auto* cmd_gen = app.add_subcommand("gen-scenarios", "Wind scenarios from measurements or a synthetic Weibull");
  cmd_gen->add_option("case", gs.case_path, "Case file holding the wind farms")->required();
  auto* meas = cmd_gen->add_option("--measurements", gs.measurements,
                                   "Wind speed CSV, one for all farms or one per farm")
                   ->delimiter(',');
  auto* synth = cmd_gen->add_option("--synthetic", gs.synthetic, "Draw n samples from Weibull(k, lambda): k lambda n")
                    ->expected(3);
  meas->excludes(synth);
  cmd_gen->add_option("--family", gs.family, "Fitted family")->check(CLI::IsMember({"weibull", "rayleigh"}));
  cmd_gen->add_option("--per-farm", gs.per_farm, "Scenario count, one for all farms or one per farm")
      ->delimiter(',')
      ->required();
  cmd_gen->add_option("--seed", gs.seed, "Random seed");
  cmd_gen->add_option("--curves", gs.curves, "Directory of power-curve CSV files");
  cmd_gen->add_option("--out", gs.out, "Output directory")->required();

  SolveArgs so;
  auto* cmd_solve = app.add_subcommand("solve", "Two-stage stochastic OPF");
  cmd_solve->add_option("case", so.case_path, "Case file")->required();
  cmd_solve->add_option("scenarios", so.scenarios_path, "Scenario JSON")->required();
  cmd_solve->add_option("--method", so.method, "Solution method")
      ->check(CLI::IsMember({"single", "serial-bda", "parallel-bda"}));
  cmd_solve->add_option("--workers", so.workers, "Scenario subproblems (and threads in parallel mode)")
      ->check(CLI::PositiveNumber);
  cmd_solve->add_option("--gap", so.gap, "Relative bound gap that stops the decomposition")
      ->check(CLI::Range(0.0, 1.0));
  cmd_solve->add_option("--max-iter", so.max_iter, "Decomposition iteration limit")->check(CLI::PositiveNumber);
  cmd_solve->add_option("--out", so.out, "Output directory")->required();

  VssArgs vs;
  auto* cmd_vss = app.add_subcommand("vss", "Value of the stochastic solution");
  cmd_vss->add_option("case", vs.case_path, "Case file")->required();
  cmd_vss->add_option("scenarios", vs.scenarios_path, "Scenario JSON")->required();
  cmd_vss->add_option("--out", vs.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*cmd_opf) {
      Manifest m("run-opf", args);
      return run_opf(ro, m);
    }
    if (*cmd_gen) {
      if (gs.measurements.empty() && gs.synthetic.empty()) {
        throw InputError("gen-scenarios needs --measurements or --synthetic");
      }
      Manifest m("gen-scenarios", args);
      return gen_scenarios(gs, m);
    }
    if (*cmd_solve) {
      Manifest m("solve", args);
      return solve(so, m);
    }
    Manifest m("vss", args);
    return vss(vs, m);
  } catch (const InputError& e) {
    std::fprintf(stderr, "windflow: input error: %s\n", e.what());
    return kInput;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "windflow: solver error: %s\n", e.what());
    return kSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "windflow: error: %s\n", e.what());
    return kInput;
  }
}
