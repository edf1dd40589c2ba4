#pragma once

// Independent reference computations for small AC networks.

#include <cmath>
#include <stdexcept>

#include "windflow/acopf/point.hpp"
#include "windflow/grid/types.hpp"

namespace windflow::testing {

/// Exact AC flow on a single line feeding a PQ load from a bus held at v_s.
struct ExactLineFlow {
  double p_s = 0.0;
  double q_s = 0.0;
  double p_loss = 0.0;
  double q_loss = 0.0;
  double v_r = 0.0;
  double theta = 0.0;  // theta_s - theta_r
};

/// Solves p_s - R S / v_s^2 = P, q_s - X S / v_s^2 = Q with S = p_s^2 + q_s^2
/// for the physical (smallest) root by bisection on S.
inline ExactLineFlow exact_line_flow(double R, double X, double P, double Q, double v_s) {
  const double vs2 = v_s * v_s;
  auto f = [&](double S) {
    const double p = P + R * S / vs2;
    const double q = Q + X * S / vs2;
    return p * p + q * q - S;
  };
  double lo = 0.0;
  double hi = P * P + Q * Q;
  // Walk right until f changes sign (it is convex in S).
  while (f(hi) > 0.0) {
    hi = 2.0 * hi + 1e-3;
    if (hi > 1e6) throw std::runtime_error("no power-flow solution for this load");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double S = 0.5 * (lo + hi);
  ExactLineFlow out;
  out.p_s = P + R * S / vs2;
  out.q_s = Q + X * S / vs2;
  const double S_exact = out.p_s * out.p_s + out.q_s * out.q_s;
  out.p_loss = R * S_exact / vs2;
  out.q_loss = X * S_exact / vs2;
  // Keep the balance exact at the receiving end.
  out.p_s = P + out.p_loss;
  out.q_s = Q + out.q_loss;
  const double vr2 = vs2 - 2.0 * (R * out.p_s + X * out.q_s) + R * out.p_loss + X * out.q_loss;
  out.v_r = std::sqrt(vr2);
  out.theta = std::asin((X * out.p_s - R * out.q_s) / (v_s * out.v_r));
  return out;
}

/// Operating point of a two-bus case (generator at bus 0, load at bus 1,
/// one AC line 0 -> 1) solved exactly with v_0 = 1.
inline acopf::OperatingPoint exact_two_bus_point(const grid::GridCase& c) {
  const auto& line = c.lines.at(0);
  const auto& load = c.buses.at(1);
  const auto flow = exact_line_flow(line.r, line.x, load.p_load, load.q_load, 1.0);
  acopf::OperatingPoint pt;
  pt.buses.resize(2);
  pt.buses[0].V = 1.0;
  pt.buses[0].v = 1.0;
  pt.buses[1].v = flow.v_r;
  pt.buses[1].V = flow.v_r * flow.v_r;
  pt.buses[1].theta = -flow.theta;
  pt.lines.resize(1);
  pt.lines[0] = {flow.p_s, flow.q_s, flow.p_loss, flow.q_loss, flow.theta, 0.0, 0.0};
  pt.generators.resize(1);
  pt.generators[0] = {flow.p_s, flow.q_s};
  return pt;
}

/// Brute-force optimum of a radial case fed by one generator: every line runs
/// from the generator bus to a load bus. For each squared generator voltage V
/// on a grid of step `res`, each line's (p_s, q_s) is searched on the same
/// grid; points whose exact balance residuals and receiving voltage bound are
/// within `res` are accepted. Losses are non-negative, so p_s >= P and
/// q_s >= Q, and the window above the load covers the physical root.
struct GridSearchResult {
  double cost = INFINITY;
  double V = 0.0;
  double p_gen = 0.0;
};

inline GridSearchResult grid_search_radial_opf(const grid::GridCase& c, double res, double window_p = 0.2,
                                               double window_q = 0.3) {
  if (c.generators.size() != 1) throw std::invalid_argument("oracle needs exactly one generator");
  const auto& gen = c.generators[0];
  const int hub = c.bus_index(gen.bus);
  GridSearchResult best;
  const auto& hb = c.buses[static_cast<std::size_t>(hub)];
  const int nv = static_cast<int>(std::floor((hb.v_max_sq - hb.v_min_sq) / res));
  for (int iv = 0; iv <= nv + 1; ++iv) {
    const double V = iv <= nv ? hb.v_min_sq + iv * res : hb.v_max_sq;
    double p_total = 0.0, q_total = 0.0;
    bool ok = true;
    for (const auto& line : c.lines) {
      if (line.kind != grid::LineKind::AC || c.bus_index(line.from_bus) != hub) {
        throw std::invalid_argument("oracle needs AC lines leaving the generator bus");
      }
      const auto& load = c.buses[static_cast<std::size_t>(c.bus_index(line.to_bus))];
      const double R = line.r, X = line.x, P = load.p_load, Q = load.q_load;
      double best_p = INFINITY, best_q = 0.0;
      for (long ip = static_cast<long>(std::floor(P / res)); ip * res <= P + window_p; ++ip) {
        const double p = ip * res;
        if (p >= best_p) break;
        for (long iq = static_cast<long>(std::floor(Q / res)); iq * res <= Q + window_q; ++iq) {
          const double q = iq * res;
          const double S = p * p + q * q;
          if (S > line.capacity_sq) continue;
          const double pl = R * S / V, ql = X * S / V;
          if (std::abs(p - pl - P) > res || std::abs(q - ql - Q) > res) continue;
          const double Vr = V - 2.0 * (R * p + X * q) + R * pl + X * ql;
          if (Vr < load.v_min_sq - res || Vr > load.v_max_sq + res) continue;
          best_p = p;
          best_q = q;
          break;
        }
      }
      if (!std::isfinite(best_p)) {
        ok = false;
        break;
      }
      p_total += best_p;
      q_total += best_q;
    }
    if (!ok || p_total > gen.p_max || q_total > gen.q_max + res || q_total < gen.q_min - res) continue;
    const double cost = gen.cost(p_total);
    if (cost < best.cost) best = {cost, V, p_total};
  }
  return best;
}

}  // namespace windflow::testing
