#include "interior_point.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cone_algebra.hpp"
#include "kkt.hpp"

namespace windflow::conic::detail {
namespace {

using Eigen::VectorXd;
constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Diagonal scalings: A~ = Ea A D, G~ = Eg G D, c~ = D c / cost, b~ = Ea b / rhs, h~ = Eg h / rhs.
struct Equilibration {
  VectorXd d;
  VectorXd ea;
  VectorXd eg;
  double cost = 1.0;
  double rhs = 1.0;
};

void scale_matrix(SpMat& M, const VectorXd& rows, const VectorXd& cols) {
  for (int j = 0; j < M.outerSize(); ++j) {
    for (SpMat::InnerIterator it(M, j); it; ++it) it.valueRef() *= rows[it.row()] * cols[j];
  }
}

Equilibration equilibrate(const StandardForm& sf, const ConeOps& cones, SpMat& A, SpMat& G, VectorXd& c,
                          VectorXd& b, VectorXd& h) {
  const int n = sf.n();
  const int p = sf.p();
  const int m = sf.m();
  Equilibration eq{VectorXd::Ones(n), VectorXd::Ones(p), VectorXd::Ones(m)};
  A = sf.A;
  G = sf.G;
  constexpr double kMin = 1e-4;
  constexpr double kMax = 1e4;
  auto step_factor = [&](double norm, double current) {
    const double f = norm > 0.0 ? 1.0 / std::sqrt(norm) : 1.0;
    return std::clamp(current * f, kMin, kMax) / current;
  };
  for (int pass = 0; pass < 15; ++pass) {
    VectorXd col = VectorXd::Zero(n);
    VectorXd row_a = VectorXd::Zero(p);
    VectorXd row_g = VectorXd::Zero(m);
    for (int j = 0; j < n; ++j) {
      for (SpMat::InnerIterator it(A, j); it; ++it) {
        const double v = std::abs(it.value());
        col[j] = std::max(col[j], v);
        row_a[it.row()] = std::max(row_a[it.row()], v);
      }
      for (SpMat::InnerIterator it(G, j); it; ++it) {
        const double v = std::abs(it.value());
        col[j] = std::max(col[j], v);
        row_g[it.row()] = std::max(row_g[it.row()], v);
      }
    }
    // A second-order cone block must share one row scale.
    for (std::size_t k = 0; k < cones.soc_start().size(); ++k) {
      auto blk = row_g.segment(cones.soc_start()[k], cones.soc_size()[k]);
      blk.setConstant(blk.maxCoeff());
    }
    VectorXd fd(n);
    VectorXd fa(p);
    VectorXd fg(m);
    for (int j = 0; j < n; ++j) fd[j] = step_factor(col[j], eq.d[j]);
    for (int i = 0; i < p; ++i) fa[i] = step_factor(row_a[i], eq.ea[i]);
    for (int i = 0; i < m; ++i) fg[i] = step_factor(row_g[i], eq.eg[i]);
    scale_matrix(A, fa, fd);
    scale_matrix(G, fg, fd);
    eq.d = eq.d.cwiseProduct(fd);
    eq.ea = eq.ea.cwiseProduct(fa);
    eq.eg = eq.eg.cwiseProduct(fg);
    const double spread = std::max({inf_norm(fd.array().log().abs().matrix()), inf_norm(fa.array().log().abs().matrix()),
                                    inf_norm(fg.array().log().abs().matrix())});
    if (spread < 1e-3) break;
  }
  c = eq.d.cwiseProduct(sf.c);
  b = eq.ea.cwiseProduct(sf.b);
  h = eq.eg.cwiseProduct(sf.h);
  eq.cost = std::max(1.0, inf_norm(c));
  eq.rhs = std::max({1.0, inf_norm(b), inf_norm(h)});
  c /= eq.cost;
  b /= eq.rhs;
  h /= eq.rhs;
  return eq;
}

struct Metrics {
  double pres = kInf;
  double dres = kInf;
  double pcost = 0.0;
  double dcost = 0.0;
  double gap = kInf;
  double relgap = kInf;
  double merit() const { return std::max({pres, dres, std::min(gap, relgap)}); }
};

struct Point {
  VectorXd x, y, z, s;
  double tau = 1.0;
  double kappa = 1.0;
};

class Engine {
 public:
  Engine(const StandardForm& sf, const SolverOptions& opts, IpmVariant variant)
      : sf_(sf), opts_(opts), homogeneous_(variant == IpmVariant::Homogeneous), cones_(sf.cones), w_(cones_) {
    eq_ = equilibrate(sf, cones_, A_, G_, c_, b_, h_);
    norm_b_ = std::max({1.0, inf_norm(sf.b), inf_norm(sf.h)});
    norm_c_ = std::max(1.0, inf_norm(sf.c));
  }

  IpmResult run();

 private:
  struct Direction {
    VectorXd dx, dy, dz, ds;
    double dtau = 0.0;
    double dkappa = 0.0;
  };

  Point unscale(const Point& p) const;
  Metrics measure(const Point& orig) const;
  bool initialize(KktSolver& kkt);
  Direction newton(const KktSolver& kkt, double eta, const VectorXd& xi, double xi_tau, const VectorXd& lambda,
                   const VectorXd& rx, const VectorXd& ry, const VectorXd& rz, double rt, const Direction& u1) const;
  double step_length(const Direction& d) const;
  IpmResult finish(SolveStatus status, const Point& orig, const Metrics& m, int iterations) const;

  const StandardForm& sf_;
  const SolverOptions& opts_;
  bool homogeneous_;
  ConeOps cones_;
  NtScaling w_;
  SpMat A_;
  SpMat G_;
  VectorXd c_, b_, h_;
  Equilibration eq_;
  double norm_b_ = 1.0;
  double norm_c_ = 1.0;
  Point pt_;
};

Point Engine::unscale(const Point& p) const {
  Point o;
  o.x = eq_.d.cwiseProduct(p.x) * eq_.rhs;
  o.s = p.s.cwiseQuotient(eq_.eg) * eq_.rhs;
  o.y = eq_.ea.cwiseProduct(p.y) * eq_.cost;
  o.z = eq_.eg.cwiseProduct(p.z) * eq_.cost;
  o.tau = p.tau;
  o.kappa = p.kappa;
  return o;
}

Metrics Engine::measure(const Point& o) const {
  Metrics m;
  const double tau = o.tau;
  const VectorXd ry = sf_.A * o.x - sf_.b * tau;
  const VectorXd rz = sf_.G * o.x + o.s - sf_.h * tau;
  const VectorXd rx = sf_.A.transpose() * o.y + sf_.G.transpose() * o.z + sf_.c * tau;
  m.pres = std::max(inf_norm(ry), inf_norm(rz)) / tau / norm_b_;
  m.dres = inf_norm(rx) / tau / norm_c_;
  m.pcost = sf_.c.dot(o.x) / tau;
  m.dcost = -(sf_.b.dot(o.y) + sf_.h.dot(o.z)) / tau;
  m.gap = std::max(0.0, o.s.dot(o.z)) / (tau * tau);
  if (m.pcost < 0.0) {
    m.relgap = m.gap / -m.pcost;
  } else if (m.dcost > 0.0) {
    m.relgap = m.gap / m.dcost;
  }
  if (!std::isfinite(m.pres) || !std::isfinite(m.dres) || !std::isfinite(m.gap)) {
    m.pres = m.dres = m.gap = m.relgap = kInf;
  }
  return m;
}

bool Engine::initialize(KktSolver& kkt) {
  const int n = sf_.n();
  const int p = sf_.p();
  const int mdim = sf_.m();
  w_.set_identity();
  if (!kkt.factor(w_)) return false;
  VectorXd x, y, z;
  kkt.solve(VectorXd::Zero(n), b_, h_, x, y, z);
  pt_.x = x;
  pt_.s = -z;
  cones_.shift_inside(pt_.s);
  kkt.solve(-c_, VectorXd::Zero(p), VectorXd::Zero(mdim), x, y, z);
  pt_.y = y;
  pt_.z = z;
  cones_.shift_inside(pt_.z);
  pt_.tau = 1.0;
  pt_.kappa = 1.0;
  return pt_.x.allFinite() && pt_.y.allFinite() && pt_.z.allFinite() && pt_.s.allFinite();
}

Engine::Direction Engine::newton(const KktSolver& kkt, double eta, const VectorXd& xi, double xi_tau,
                                 const VectorXd& lambda, const VectorXd& rx, const VectorXd& ry, const VectorXd& rz,
                                 double rt, const Direction& u1) const {
  Direction d;
  const VectorXd v = cones_.divide(lambda, xi);
  const VectorXd wv = w_.apply(v);
  kkt.solve(-eta * rx, -eta * ry, -eta * rz - wv, d.dx, d.dy, d.dz);
  if (homogeneous_) {
    const double num = -eta * rt - xi_tau / pt_.tau - (c_.dot(d.dx) + b_.dot(d.dy) + h_.dot(d.dz));
    const double den = c_.dot(u1.dx) + b_.dot(u1.dy) + h_.dot(u1.dz) - pt_.kappa / pt_.tau;
    d.dtau = num / den;
    d.dx += d.dtau * u1.dx;
    d.dy += d.dtau * u1.dy;
    d.dz += d.dtau * u1.dz;
    d.dkappa = (xi_tau - pt_.kappa * d.dtau) / pt_.tau;
  }
  d.ds = w_.apply(v - w_.apply(d.dz));
  return d;
}

double Engine::step_length(const Direction& d) const {
  double alpha = std::min(cones_.max_step(pt_.s, d.ds), cones_.max_step(pt_.z, d.dz));
  if (homogeneous_) {
    if (d.dtau < 0.0) alpha = std::min(alpha, -pt_.tau / d.dtau);
    if (d.dkappa < 0.0) alpha = std::min(alpha, -pt_.kappa / d.dkappa);
  }
  return alpha;
}

IpmResult Engine::finish(SolveStatus status, const Point& o, const Metrics& m, int iterations) const {
  IpmResult r;
  r.status = status;
  r.iterations = iterations;
  r.primal_residual = m.pres;
  r.dual_residual = m.dres;
  r.gap = m.gap;
  r.relative_gap = m.relgap;
  r.primal_objective = m.pcost;
  r.dual_objective = m.dcost;
  const double t = (status == SolveStatus::Infeasible || status == SolveStatus::Unbounded) ? 1.0 : o.tau;
  r.x = o.x / t;
  r.y = o.y / t;
  r.z = o.z / t;
  r.s = o.s / t;
  return r;
}

IpmResult Engine::run() {
  const int n = sf_.n();
  KktSolver kkt(A_, G_, cones_, 1e-8);
  const double feas = opts_.feasibility_tol;
  const double loose_feas = std::max(1e-5, feas * 1e3);
  const double loose_gap = std::max(5e-5, opts_.gap * 1e3);

  // Best iterate seen so far; returned at reduced accuracy when the method stalls.
  Point best_orig;
  Metrics best;
  auto fallback = [&](int iter, const char* why) {
    if (opts_.verbose) std::fprintf(stderr, "stopped: %s\n", why);
    if (best_orig.x.size() != n) return finish(SolveStatus::NumericalFailure, unscale(pt_), best, iter);
    const bool close = best.pres <= loose_feas && best.dres <= loose_feas &&
                       (best.gap <= std::max(opts_.abs_gap, loose_gap) || best.relgap <= loose_gap);
    return finish(close ? SolveStatus::Optimal : SolveStatus::NumericalFailure, best_orig, best, iter);
  };

  if (!initialize(kkt)) {
    if (opts_.verbose) std::fprintf(stderr, "initialization failed\n");
    IpmResult r;
    r.iterations = 0;
    return r;
  }

  // Iterations in which neither residual nor the absolute gap drops 10% below
  // its best value so far. The relative gap is no use here: it grows while the
  // objective passes through zero.
  constexpr int kStallLimit = 10;
  std::array<double, 3> progress_ref{kInf, kInf, kInf};
  int stalled = 0;
  const int degree = cones_.degree();
  const VectorXd e = cones_.identity();
  for (int iter = 0; iter <= opts_.max_iterations; ++iter) {
    const Point orig = unscale(pt_);
    const Metrics m = measure(orig);
    bool progressed = false;
    const std::array<double, 3> now{m.pres, m.dres, m.gap};
    for (std::size_t k = 0; k < now.size(); ++k) {
      if (now[k] < 0.9 * progress_ref[k]) {
        progress_ref[k] = now[k];
        progressed = true;
      }
    }
    stalled = progressed ? 0 : stalled + 1;
    if (m.merit() < best.merit()) {
      best = m;
      best_orig = orig;
    }
    if (opts_.verbose) {
      std::fprintf(stderr, "%3d pcost %+.6e dcost %+.6e gap %.2e pres %.2e dres %.2e tau %.2e kappa %.2e\n", iter,
                   m.pcost, m.dcost, m.gap, m.pres, m.dres, pt_.tau, pt_.kappa);
    }
    if (m.pres <= feas && m.dres <= feas && (m.gap <= opts_.abs_gap || m.relgap <= opts_.gap)) {
      return finish(SolveStatus::Optimal, orig, m, iter);
    }
    if (homogeneous_ && pt_.kappa > pt_.tau) {
      const double by_hz = sf_.b.dot(orig.y) + sf_.h.dot(orig.z);
      if (by_hz < 0.0) {
        const VectorXd aty = sf_.A.transpose() * orig.y + sf_.G.transpose() * orig.z;
        if (inf_norm(aty) / -by_hz <= feas) {
          const double scale = -by_hz;
          Point cert = orig;
          cert.y /= scale;
          cert.z /= scale;
          return finish(SolveStatus::Infeasible, cert, m, iter);
        }
      }
      const double cx = sf_.c.dot(orig.x);
      if (cx < 0.0) {
        const double res = std::max(inf_norm(sf_.A * orig.x), inf_norm(sf_.G * orig.x + orig.s));
        if (res / -cx <= feas) {
          Point cert = orig;
          cert.x /= -cx;
          cert.s /= -cx;
          return finish(SolveStatus::Unbounded, cert, m, iter);
        }
      }
    }
    if (iter == opts_.max_iterations) break;
    if (stalled >= kStallLimit) return fallback(iter, "no progress");

    const double tau = homogeneous_ ? pt_.tau : 1.0;
    const VectorXd rx = A_.transpose() * pt_.y + G_.transpose() * pt_.z + c_ * tau;
    const VectorXd ry = A_ * pt_.x - b_ * tau;
    const VectorXd rz = G_ * pt_.x + pt_.s - h_ * tau;
    const double rt = pt_.kappa + c_.dot(pt_.x) + b_.dot(pt_.y) + h_.dot(pt_.z);

    if (!w_.update(pt_.s, pt_.z)) return fallback(iter, "scaling update failed");
    if (!kkt.factor(w_)) return fallback(iter, "factorization failed");
    const VectorXd lambda = w_.apply(pt_.z);
    const double mu = (pt_.s.dot(pt_.z) + (homogeneous_ ? pt_.tau * pt_.kappa : 0.0)) /
                      (degree + (homogeneous_ ? 1 : 0));

    Direction u1;
    if (homogeneous_) kkt.solve(-c_, b_, h_, u1.dx, u1.dy, u1.dz);

    const VectorXd ll = cones_.product(lambda, lambda);
    const Direction aff = newton(kkt, 1.0, -ll, -pt_.tau * pt_.kappa, lambda, rx, ry, rz, rt, u1);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 0.0, 1.0);

    const VectorXd corr = cones_.product(w_.apply_inverse(aff.ds), w_.apply(aff.dz));
    const VectorXd xi = -ll - corr + sigma * mu * e;
    const double xi_tau = -pt_.tau * pt_.kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction d = newton(kkt, 1.0 - sigma, xi, xi_tau, lambda, rx, ry, rz, rt, u1);
    if (!d.dx.allFinite() || !d.dz.allFinite() || !d.ds.allFinite() || !std::isfinite(d.dtau)) {
      return fallback(iter, "non-finite direction");
    }
    const double alpha = std::min(1.0, 0.99 * step_length(d));
    if (opts_.verbose) std::fprintf(stderr, "    alpha_aff %.3e sigma %.3e alpha %.3e\n", alpha_aff, sigma, alpha);
    if (!(alpha > 1e-10)) return fallback(iter, "step too short");

    pt_.x += alpha * d.dx;
    pt_.y += alpha * d.dy;
    pt_.z += alpha * d.dz;
    pt_.s += alpha * d.ds;
    if (homogeneous_) {
      pt_.tau += alpha * d.dtau;
      pt_.kappa += alpha * d.dkappa;
    }
  }
  return fallback(opts_.max_iterations, "iteration limit");
}

}  // namespace

IpmResult run_interior_point(const StandardForm& sf, const SolverOptions& opts, IpmVariant variant) {
  Engine engine(sf, opts, variant);
  return engine.run();
}

}  // namespace windflow::conic::detail
