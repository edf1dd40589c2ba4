#include "windflow/mbda/mbda.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace windflow::mbda {

Partition partition_scenarios(std::size_t scenarios, int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be at least 1");
  if (scenarios == 0) throw std::invalid_argument("no scenarios to partition");
  Partition p;
  p.requested = workers;
  auto n = static_cast<std::size_t>(workers);
  if (n > scenarios) {
    n = scenarios;
    p.clamped = true;
  }
  const std::size_t base = scenarios / n;
  const std::size_t extra = scenarios % n;
  int next = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    std::vector<int> block(size);
    for (auto& j : block) j = next++;
    p.blocks.push_back(std::move(block));
  }
  return p;
}

double BendersCut::evaluate(std::span<const double> p) const {
  double v = intercept;
  for (std::size_t i = 0; i < mu.size(); ++i) v += mu[i] * (p[i] - anchor[i]);
  return v;
}

Subproblem::Subproblem(const grid::GridCase& c, const grid::Topology& topo, const wind::ScenarioSet& set,
                       const std::vector<std::vector<acopf::WindLimits>>& windows, std::vector<int> scenarios,
                       int index, const stochastic::StochasticOptions& opts)
    : case_(&c), index_(index), scenarios_(std::move(scenarios)), opts_(opts) {
  const std::string tag = std::to_string(index_);
  for (const auto& g : c.generators) {
    // Free here: the anchor row alone carries the stage-1 value, so its dual
    // is the full sensitivity.
    const auto v = program_.add_variable("p_gen:" + g.id);
    p_gen_.push_back(v);
    anchors_.push_back(program_.add_equality("anchor:" + tag + ":" + g.id, {{v, 1.0}}, 0.0));
  }
  for (int j : scenarios_) {
    const auto& sc = set.scenarios.at(static_cast<std::size_t>(j));
    acopf::BlockSpec spec;
    spec.scenario = std::to_string(sc.j);
    spec.weight = sc.pi;
    spec.wind = windows.at(static_cast<std::size_t>(j));
    spec.shedding = true;
    spec.loss_penalty = opts.loss_penalty;
    blocks_.push_back(acopf::add_soc_block(program_, c, topo, p_gen_, spec));
    specs_.push_back(std::move(spec));
    pi_.push_back(sc.pi);
    scenario_j_.push_back(sc.j);
  }
}

SubproblemResult Subproblem::solve(std::span<const double> anchor) {
  for (std::size_t g = 0; g < anchors_.size(); ++g) program_.set_equality_rhs(anchors_[g], anchor[g]);
  const auto solver = conic::make_solver(opts_.backend);
  last_ = solver->solve(program_, opts_.solver);
  if (!last_.optimal()) {
    throw std::runtime_error("subproblem " + std::to_string(index_) + " (" + std::to_string(scenarios_.size()) +
                             " scenarios, " + std::to_string(program_.num_variables()) +
                             " variables) failed: " + std::string(conic::to_string(last_.status)));
  }
  SubproblemResult r;
  r.subproblem = index_;
  r.cost = last_.objective_value;
  for (const auto a : anchors_) r.mu.push_back(last_.dual(a));
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    auto s = stochastic::summarize_block(*case_, specs_[k], blocks_[k], last_, scenario_j_[k], pi_[k]);
    r.expected_shed += s.pi * s.p_shed;
    r.scenarios.push_back(s);
  }
  return r;
}

SubproblemResult solve_subproblem(const grid::GridCase& c, const wind::ScenarioSet& set,
                                  const std::vector<int>& scenarios, std::span<const double> anchor,
                                  const stochastic::StochasticOptions& opts) {
  const auto topo = grid::resolve(c);
  Subproblem sp(c, topo, set, stochastic::align_windows(c, set), scenarios, 0, opts);
  return sp.solve(anchor);
}

MasterResult solve_master(const grid::GridCase& c, std::span<const BendersCut> cuts, int subproblems,
                          const stochastic::StochasticOptions& opts) {
  conic::ConicProgram prog;
  const auto p = acopf::add_generator_dispatch(prog, c);
  std::vector<conic::VarId> theta;
  for (int n = 0; n < subproblems; ++n) {
    // Recourse cost is non-negative: wind cost, VoLL and the loss price are.
    theta.push_back(prog.add_variable("recourse:" + std::to_string(n), 0.0));
    prog.add_linear_cost(theta.back(), 1.0);
  }
  for (const auto& cut : cuts) {
    std::vector<conic::Term> terms{{theta.at(static_cast<std::size_t>(cut.subproblem)), -1.0}};
    double rhs = -cut.intercept;
    for (std::size_t g = 0; g < p.size(); ++g) {
      if (cut.mu[g] == 0.0) continue;
      terms.push_back({p[g], cut.mu[g]});
      rhs += cut.mu[g] * cut.anchor[g];
    }
    prog.add_inequality("cut:" + std::to_string(cut.subproblem) + ":" + std::to_string(cut.iteration),
                        std::move(terms), rhs);
  }
  const auto sol = conic::make_solver(opts.backend)->solve(prog, opts.solver);
  if (!sol.optimal()) {
    throw std::runtime_error("master problem with " + std::to_string(cuts.size()) +
                             " cuts failed: " + std::string(conic::to_string(sol.status)));
  }
  MasterResult r;
  for (const auto v : p) r.dispatch.push_back(sol.value(v));
  r.lower_bound = sol.objective_value;
  return r;
}

MbdaResult run_mbda(const grid::GridCase& c, const wind::ScenarioSet& set, const MbdaOptions& opts) {
  if (opts.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  const auto report = grid::validate(c);
  if (!report.ok()) throw std::invalid_argument("invalid case '" + c.name + "': " + report.violations.front());
  const auto t0 = std::chrono::steady_clock::now();

  MbdaResult out;
  out.partition = partition_scenarios(set.size(), opts.workers);
  const auto topo = grid::resolve(c);
  const auto windows = stochastic::align_windows(c, set);
  const int nsub = static_cast<int>(out.partition.blocks.size());
  std::vector<Subproblem> subs;
  subs.reserve(static_cast<std::size_t>(nsub));
  for (int n = 0; n < nsub; ++n) {
    subs.emplace_back(c, topo, set, windows, out.partition.blocks[static_cast<std::size_t>(n)], n, opts.stochastic);
  }

  auto& sol = out.solution;
  sol.method = opts.mode == Mode::Parallel ? stochastic::Method::ParallelBda : stochastic::Method::SerialBda;
  sol.converged = false;
  double ub = INFINITY;
  double lb = -INFINITY;
  std::vector<SubproblemResult> results(static_cast<std::size_t>(nsub));
  std::vector<SubproblemResult> incumbent;

  for (int k = 1; k <= opts.max_iter; ++k) {
    const auto master = solve_master(c, out.cuts, nsub, opts.stochastic);
    lb = std::max(lb, master.lower_bound);
    const auto& p_hat = master.dispatch;

    if (opts.mode == Mode::Serial || nsub == 1) {
      for (int n = 0; n < nsub; ++n) results[static_cast<std::size_t>(n)] = subs[static_cast<std::size_t>(n)].solve(p_hat);
    } else {
      // At most `workers` solves in flight; each task writes only its own slot.
      std::atomic<int> next{0};
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nsub));
      auto work = [&] {
        for (int n = next++; n < nsub; n = next++) {
          try {
            results[static_cast<std::size_t>(n)] = subs[static_cast<std::size_t>(n)].solve(p_hat);
          } catch (...) {
            errors[static_cast<std::size_t>(n)] = std::current_exception();
          }
        }
      };
      const int threads = std::min(opts.workers, nsub);
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    // Merge in block order.
    double recourse = 0.0;
    for (const auto& r : results) recourse += r.cost;
    const double candidate = stochastic::stage1_cost(c, p_hat) + recourse;
    if (candidate < ub) {
      ub = candidate;
      sol.stage1 = p_hat;
      sol.expected_recourse = recourse;
      incumbent = results;
    }
    for (const auto& r : results) out.cuts.push_back({r.subproblem, k, r.cost, r.mu, p_hat});

    const double gap = (ub - lb) / std::max(std::abs(ub), 1e-6);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.trace.push_back({k, lb, ub, gap, ms});
    sol.iterations = k;
    if (gap <= opts.gap) {
      sol.converged = true;
      break;
    }
  }

  sol.status = conic::SolveStatus::Optimal;
  sol.objective = ub;
  sol.upper_bound = ub;
  sol.lower_bound = lb;
  sol.stage1_cost = stochastic::stage1_cost(c, sol.stage1);
  for (const auto& r : incumbent) sol.scenarios.insert(sol.scenarios.end(), r.scenarios.begin(), r.scenarios.end());
  return out;
}

std::string trace_csv(std::span<const TraceRow> trace) {
  std::ostringstream out;
  out.precision(12);
  out << "iteration,lower_bound,upper_bound,gap,wall_ms\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << r.lower_bound << ',' << r.upper_bound << ',' << r.gap << ',';
    out.precision(6);
    out << r.wall_ms << '\n';
    out.precision(12);
  }
  return out.str();
}

nlohmann::ordered_json to_json(std::span<const BendersCut> cuts) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cuts) {
    arr.push_back({{"subproblem", c.subproblem},
                   {"iteration", c.iteration},
                   {"intercept", c.intercept},
                   {"mu", c.mu},
                   {"anchor", c.anchor}});
  }
  return arr;
}

}  // namespace windflow::mbda
