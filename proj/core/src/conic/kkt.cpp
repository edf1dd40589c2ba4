#include "kkt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace windflow::conic::detail {

KktSolver::KktSolver(const SpMat& A, const SpMat& G, const ConeOps& cones, double regularization)
    : A_(&A),
      G_(&G),
      At_(A.transpose()),
      Gt_(G.transpose()),
      cones_(&cones),
      delta_(regularization),
      n_(static_cast<int>(A.cols())),
      p_(static_cast<int>(A.rows())),
      m_(static_cast<int>(G.rows())) {
  using Triplet = Eigen::Triplet<double, int>;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros() + G.nonZeros() + n_ + p_ + m_));
  for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, delta_);
  for (int j = 0; j < n_; ++j) {
    for (SpMat::InnerIterator it(A, j); it; ++it) trip.emplace_back(n_ + it.row(), j, it.value());
    for (SpMat::InnerIterator it(G, j); it; ++it) trip.emplace_back(n_ + p_ + it.row(), j, it.value());
  }
  for (int i = 0; i < p_; ++i) trip.emplace_back(n_ + i, n_ + i, -delta_);
  const int zoff = n_ + p_;
  for (int i = 0; i < cones.linear(); ++i) trip.emplace_back(zoff + i, zoff + i, -1.0);
  for (std::size_t k = 0; k < cones.soc_start().size(); ++k) {
    const int st = zoff + cones.soc_start()[k];
    const int sz = cones.soc_size()[k];
    for (int c = 0; c < sz; ++c) {
      for (int r = c; r < sz; ++r) trip.emplace_back(st + r, st + c, r == c ? -1.0 : 0.0);
    }
  }
  const int dim = n_ + p_ + m_;
  K_.resize(dim, dim);
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();

  lp_slots_.reserve(static_cast<std::size_t>(cones.linear()));
  for (int i = 0; i < cones.linear(); ++i) lp_slots_.push_back(&K_.coeffRef(zoff + i, zoff + i));
  soc_slots_.resize(cones.soc_start().size());
  for (std::size_t k = 0; k < cones.soc_start().size(); ++k) {
    const int st = zoff + cones.soc_start()[k];
    const int sz = cones.soc_size()[k];
    for (int c = 0; c < sz; ++c) {
      for (int r = c; r < sz; ++r) soc_slots_[k].push_back(&K_.coeffRef(st + r, st + c));
    }
  }
  std::vector<signed char> signs(static_cast<std::size_t>(dim), -1);
  std::fill(signs.begin(), signs.begin() + n_, 1);
  ldl_.analyze(K_, std::move(signs));
}

bool KktSolver::factor(const NtScaling& w) {
  scaling_ = &w;
  for (int i = 0; i < cones_->linear(); ++i) *lp_slots_[static_cast<std::size_t>(i)] = -w.lp_square(i) - delta_;
  for (std::size_t k = 0; k < soc_slots_.size(); ++k) {
    const Eigen::MatrixXd w2 = w.soc_square(static_cast<int>(k));
    const auto sz = w2.rows();
    std::size_t idx = 0;
    for (Eigen::Index c = 0; c < sz; ++c) {
      for (Eigen::Index r = c; r < sz; ++r) {
        *soc_slots_[k][idx++] = -w2(r, c) - (r == c ? delta_ : 0.0);
      }
    }
  }
  lu_current_ = false;
  ldl_ok_ = ldl_.factor(K_.valuePtr());
  if (ldl_ok_) return true;
  Eigen::VectorXd probe = Eigen::VectorXd::Zero(n_ + p_ + m_);
  return lu_solve(probe);
}

Eigen::VectorXd KktSolver::multiply_exact(const Eigen::VectorXd& u) const {
  const auto ux = u.head(n_);
  const auto uy = u.segment(n_, p_);
  const auto uz = u.tail(m_);
  Eigen::VectorXd out(n_ + p_ + m_);
  out.head(n_) = At_ * uy + Gt_ * uz;
  out.segment(n_, p_) = (*A_) * ux;
  out.tail(m_) = (*G_) * ux - scaling_->apply(scaling_->apply(uz));
  return out;
}

double KktSolver::refine(const Eigen::VectorXd& rhs, Eigen::VectorXd& u,
                         const std::function<void(Eigen::VectorXd&)>& inverse) const {
  const double tol = 1e-14 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
  Eigen::VectorXd res = rhs - multiply_exact(u);
  double err = res.lpNorm<Eigen::Infinity>();
  if (!std::isfinite(err)) return err;
  for (int k = 0; k < 8 && err > tol; ++k) {
    Eigen::VectorXd corr = res;
    inverse(corr);
    Eigen::VectorXd cand = u + corr;
    Eigen::VectorXd cand_res = rhs - multiply_exact(cand);
    const double cand_err = cand_res.lpNorm<Eigen::Infinity>();
    if (!(cand_err < err)) break;
    u = std::move(cand);
    res = std::move(cand_res);
    err = cand_err;
  }
  return err;
}

bool KktSolver::lu_solve(Eigen::VectorXd& u) const {
  if (!lu_current_) {
    lu_current_ = true;
    lu_failed_ = true;
    const SpMat full = K_.selfadjointView<Eigen::Lower>();
    if (!lu_) {
      lu_ = std::make_unique<Eigen::SparseLU<SpMat>>();
      lu_->analyzePattern(full);
    }
    lu_->factorize(full);
    lu_failed_ = lu_->info() != Eigen::Success;
  }
  if (lu_failed_) return false;
  u = lu_->solve(u).eval();
  return u.allFinite();
}

void KktSolver::solve(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, const Eigen::VectorXd& rz,
                      Eigen::VectorXd& x, Eigen::VectorXd& y, Eigen::VectorXd& z) const {
  Eigen::VectorXd rhs(n_ + p_ + m_);
  rhs << rx, ry, rz;
  Eigen::VectorXd u = rhs;
  double err = std::numeric_limits<double>::infinity();
  if (ldl_ok_) {
    ldl_.solve(u);
    err = refine(rhs, u, [this](Eigen::VectorXd& v) { ldl_.solve(v); });
  }
  if (!(err <= 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>()))) {
    Eigen::VectorXd v = rhs;
    if (lu_solve(v)) {
      const double lu_err = refine(rhs, v, [this](Eigen::VectorXd& w) { lu_solve(w); });
      if (lu_err < err || !std::isfinite(err)) u = std::move(v);
    }
  }
  x = u.head(n_);
  y = u.segment(n_, p_);
  z = u.tail(m_);
}

}  // namespace windflow::conic::detail
