#include "cone_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace windflow::conic::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest positive root of a t^2 + 2 b t + c with c > 0, or +inf.
double first_positive_root(double a, double b, double c) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (std::abs(a) <= 1e-15 * scale) {
    return b < 0.0 ? -c / (2.0 * b) : kInf;
  }
  const double disc = b * b - a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -(b + std::copysign(sq, b));
  double best = kInf;
  for (double r : {q / a, q != 0.0 ? c / q : kInf}) {
    if (r > 0.0) best = std::min(best, r);
  }
  return best;
}

}  // namespace

ConeOps::ConeOps(const ConeLayout& layout) : linear_(layout.linear) {
  int offset = layout.linear;
  for (int k : layout.soc) {
    soc_start_.push_back(offset);
    soc_size_.push_back(k);
    offset += k;
  }
  dim_ = offset;
}

Eigen::VectorXd ConeOps::identity() const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim_);
  e.head(linear_).setOnes();
  for (int s : soc_start_) e[s] = 1.0;
  return e;
}

double ConeOps::boundary_distance(const Eigen::VectorXd& v) const {
  double t = -kInf;
  for (int i = 0; i < linear_; ++i) t = std::max(t, -v[i]);
  for (std::size_t k = 0; k < soc_start_.size(); ++k) {
    const auto blk = v.segment(soc_start_[k], soc_size_[k]);
    t = std::max(t, blk.tail(soc_size_[k] - 1).norm() - blk[0]);
  }
  return t;
}

void ConeOps::shift_inside(Eigen::VectorXd& v) const {
  const double t = boundary_distance(v);
  if (t >= -1e-8) v += (1.0 + std::max(t, 0.0)) * identity();
}

double ConeOps::max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const {
  double alpha = kInf;
  for (int i = 0; i < linear_; ++i) {
    if (dx[i] < 0.0) alpha = std::min(alpha, -x[i] / dx[i]);
  }
  for (std::size_t k = 0; k < soc_start_.size(); ++k) {
    const int s = soc_start_[k];
    const int n = soc_size_[k] - 1;
    const double x0 = x[s];
    const double d0 = dx[s];
    const auto x1 = x.segment(s + 1, n);
    const auto d1 = dx.segment(s + 1, n);
    const double a = d0 * d0 - d1.squaredNorm();
    const double b = x0 * d0 - x1.dot(d1);
    const double c = x0 * x0 - x1.squaredNorm();
    if (c <= 0.0) return 0.0;
    alpha = std::min(alpha, first_positive_root(a, b, c));
  }
  return alpha;
}

Eigen::VectorXd ConeOps::product(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(dim_);
  out.head(linear_) = u.head(linear_).cwiseProduct(v.head(linear_));
  for (std::size_t k = 0; k < soc_start_.size(); ++k) {
    const int s = soc_start_[k];
    const int n = soc_size_[k] - 1;
    out[s] = u.segment(s, n + 1).dot(v.segment(s, n + 1));
    out.segment(s + 1, n) = u[s] * v.segment(s + 1, n) + v[s] * u.segment(s + 1, n);
  }
  return out;
}

Eigen::VectorXd ConeOps::divide(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(dim_);
  out.head(linear_) = v.head(linear_).cwiseQuotient(u.head(linear_));
  for (std::size_t k = 0; k < soc_start_.size(); ++k) {
    const int s = soc_start_[k];
    const int n = soc_size_[k] - 1;
    const double u0 = u[s];
    const auto u1 = u.segment(s + 1, n);
    const auto v1 = v.segment(s + 1, n);
    const double x0 = (u0 * v[s] - u1.dot(v1)) / (u0 * u0 - u1.squaredNorm());
    out[s] = x0;
    out.segment(s + 1, n) = (v1 - x0 * u1) / u0;
  }
  return out;
}

NtScaling::NtScaling(const ConeOps& cones) : cones_(&cones) { set_identity(); }

void NtScaling::set_identity() {
  lp_ = Eigen::VectorXd::Ones(cones_->linear());
  const auto nsoc = cones_->soc_start().size();
  eta_.assign(nsoc, 1.0);
  wbar_.resize(nsoc);
  for (std::size_t k = 0; k < nsoc; ++k) {
    wbar_[k] = Eigen::VectorXd::Zero(cones_->soc_size()[k]);
    wbar_[k][0] = 1.0;
  }
}

bool NtScaling::update(const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
  const int l = cones_->linear();
  for (int i = 0; i < l; ++i) {
    if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
    lp_[i] = std::sqrt(s[i] / z[i]);
  }
  for (std::size_t k = 0; k < cones_->soc_start().size(); ++k) {
    const int st = cones_->soc_start()[k];
    const int n = cones_->soc_size()[k];
    const auto sb = s.segment(st, n);
    const auto zb = z.segment(st, n);
    const double s_res = sb[0] * sb[0] - sb.tail(n - 1).squaredNorm();
    const double z_res = zb[0] * zb[0] - zb.tail(n - 1).squaredNorm();
    if (!(sb[0] > 0.0) || !(zb[0] > 0.0) || !(s_res > 0.0) || !(z_res > 0.0)) return false;
    const Eigen::VectorXd sn = sb / std::sqrt(s_res);
    const Eigen::VectorXd zn = zb / std::sqrt(z_res);
    const double gamma = std::sqrt((1.0 + sn.dot(zn)) / 2.0);
    Eigen::VectorXd w(n);
    w[0] = (sn[0] + zn[0]) / (2.0 * gamma);
    w.tail(n - 1) = (sn.tail(n - 1) - zn.tail(n - 1)) / (2.0 * gamma);
    eta_[k] = std::pow(s_res / z_res, 0.25);
    wbar_[k] = std::move(w);
  }
  return true;
}

Eigen::VectorXd NtScaling::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  const int l = cones_->linear();
  out.head(l) = lp_.cwiseProduct(v.head(l));
  for (std::size_t k = 0; k < wbar_.size(); ++k) {
    const int st = cones_->soc_start()[k];
    const int n = cones_->soc_size()[k] - 1;
    const auto& w = wbar_[k];
    const auto w1 = w.tail(n);
    const auto v1 = v.segment(st + 1, n);
    const double dot = w1.dot(v1);
    out[st] = eta_[k] * (w[0] * v[st] + dot);
    out.segment(st + 1, n) = eta_[k] * (v[st] * w1 + v1 + (dot / (1.0 + w[0])) * w1);
  }
  return out;
}

Eigen::VectorXd NtScaling::apply_inverse(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  const int l = cones_->linear();
  out.head(l) = v.head(l).cwiseQuotient(lp_);
  for (std::size_t k = 0; k < wbar_.size(); ++k) {
    const int st = cones_->soc_start()[k];
    const int n = cones_->soc_size()[k] - 1;
    const auto& w = wbar_[k];
    const auto w1 = w.tail(n);
    const auto v1 = v.segment(st + 1, n);
    const double dot = w1.dot(v1);
    out[st] = (w[0] * v[st] - dot) / eta_[k];
    out.segment(st + 1, n) = (-v[st] * w1 + v1 + (dot / (1.0 + w[0])) * w1) / eta_[k];
  }
  return out;
}

Eigen::MatrixXd NtScaling::soc_square(int k) const {
  const auto& w = wbar_[static_cast<std::size_t>(k)];
  const auto n = w.size();
  Eigen::MatrixXd m = 2.0 * w * w.transpose();
  m(0, 0) -= 1.0;
  for (Eigen::Index i = 1; i < n; ++i) m(i, i) += 1.0;
  return eta_[static_cast<std::size_t>(k)] * eta_[static_cast<std::size_t>(k)] * m;
}

}  // namespace windflow::conic::detail
