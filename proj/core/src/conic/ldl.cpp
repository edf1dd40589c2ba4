#include "ldl.hpp"

#include <Eigen/OrderingMethods>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace windflow::conic::detail {
namespace {

constexpr double kPivotEps = 1e-13;
constexpr double kPivotDelta = 2e-7;

}  // namespace

void QuasiDefiniteLdl::analyze(const SpMat& lower, std::vector<signed char> signs) {
  n_ = static_cast<int>(lower.rows());
  if (lower.cols() != n_ || static_cast<int>(signs.size()) != n_ || !lower.isCompressed()) {
    throw std::invalid_argument("ldl: expected a square compressed matrix with one sign per row");
  }

  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
  Eigen::AMDOrdering<int> amd;
  amd(lower.selfadjointView<Eigen::Lower>(), p);
  perm_.assign(p.indices().data(), p.indices().data() + n_);
  iperm_.assign(static_cast<std::size_t>(n_), 0);
  for (int k = 0; k < n_; ++k) iperm_[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])] = k;
  sign_.resize(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) sign_[static_cast<std::size_t>(k)] = signs[static_cast<std::size_t>(perm_[static_cast<std::size_t>(k)])];

  // Upper triangle of P K P' in CSC, remembering where each value came from.
  std::vector<int> count(static_cast<std::size_t>(n_) + 1, 0);
  const int* outer = lower.outerIndexPtr();
  const int* inner = lower.innerIndexPtr();
  for (int c = 0; c < n_; ++c) {
    for (int k = outer[c]; k < outer[c + 1]; ++k) {
      const int a = iperm_[static_cast<std::size_t>(inner[k])];
      const int b = iperm_[static_cast<std::size_t>(c)];
      ++count[static_cast<std::size_t>(std::max(a, b)) + 1];
    }
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  cp_ = count;
  const auto nnz = static_cast<std::size_t>(cp_.back());
  ci_.assign(nnz, 0);
  source_.assign(nnz, 0);
  std::vector<int> next(cp_.begin(), cp_.end() - 1);
  for (int c = 0; c < n_; ++c) {
    for (int k = outer[c]; k < outer[c + 1]; ++k) {
      const int a = iperm_[static_cast<std::size_t>(inner[k])];
      const int b = iperm_[static_cast<std::size_t>(c)];
      const int col = std::max(a, b);
      const int pos = next[static_cast<std::size_t>(col)]++;
      ci_[static_cast<std::size_t>(pos)] = std::min(a, b);
      source_[static_cast<std::size_t>(pos)] = k;
    }
  }
  cx_.assign(nnz, 0.0);

  // Elimination tree and column counts of L.
  etree_.assign(static_cast<std::size_t>(n_), -1);
  lnz_.assign(static_cast<std::size_t>(n_), 0);
  std::vector<int> work(static_cast<std::size_t>(n_), -1);
  for (int j = 0; j < n_; ++j) {
    work[static_cast<std::size_t>(j)] = j;
    for (int k = cp_[static_cast<std::size_t>(j)]; k < cp_[static_cast<std::size_t>(j) + 1]; ++k) {
      int i = ci_[static_cast<std::size_t>(k)];
      while (i != j && work[static_cast<std::size_t>(i)] != j) {
        if (etree_[static_cast<std::size_t>(i)] == -1) etree_[static_cast<std::size_t>(i)] = j;
        ++lnz_[static_cast<std::size_t>(i)];
        work[static_cast<std::size_t>(i)] = j;
        i = etree_[static_cast<std::size_t>(i)];
      }
    }
  }
  lp_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int i = 0; i < n_; ++i) lp_[static_cast<std::size_t>(i) + 1] = lp_[static_cast<std::size_t>(i)] + lnz_[static_cast<std::size_t>(i)];
  li_.assign(static_cast<std::size_t>(lp_.back()), 0);
  lx_.assign(static_cast<std::size_t>(lp_.back()), 0.0);
  d_.assign(static_cast<std::size_t>(n_), 0.0);
  dinv_.assign(static_cast<std::size_t>(n_), 0.0);
  y_idx_.assign(static_cast<std::size_t>(n_), 0);
  elim_buf_.assign(static_cast<std::size_t>(n_), 0);
  next_space_.assign(static_cast<std::size_t>(n_), 0);
  y_mark_.assign(static_cast<std::size_t>(n_), 0);
  y_val_.assign(static_cast<std::size_t>(n_), 0.0);
  work_.assign(static_cast<std::size_t>(n_), 0.0);
}

bool QuasiDefiniteLdl::factor(const double* values) {
  for (std::size_t k = 0; k < cx_.size(); ++k) cx_[k] = values[source_[k]];
  regularized_ = 0;
  for (int i = 0; i < n_; ++i) next_space_[static_cast<std::size_t>(i)] = lp_[static_cast<std::size_t>(i)];

  for (int k = 0; k < n_; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    int nnz_y = 0;
    d_[uk] = 0.0;
    for (int q = cp_[uk]; q < cp_[uk + 1]; ++q) {
      const int b = ci_[static_cast<std::size_t>(q)];
      if (b == k) {
        d_[uk] += cx_[static_cast<std::size_t>(q)];
        continue;
      }
      y_val_[static_cast<std::size_t>(b)] += cx_[static_cast<std::size_t>(q)];
      if (y_mark_[static_cast<std::size_t>(b)] == 0) {
        y_mark_[static_cast<std::size_t>(b)] = 1;
        int ne = 0;
        elim_buf_[static_cast<std::size_t>(ne++)] = b;
        int nxt = etree_[static_cast<std::size_t>(b)];
        while (nxt != -1 && nxt < k) {
          if (y_mark_[static_cast<std::size_t>(nxt)] != 0) break;
          y_mark_[static_cast<std::size_t>(nxt)] = 1;
          elim_buf_[static_cast<std::size_t>(ne++)] = nxt;
          nxt = etree_[static_cast<std::size_t>(nxt)];
        }
        while (ne > 0) y_idx_[static_cast<std::size_t>(nnz_y++)] = elim_buf_[static_cast<std::size_t>(--ne)];
      }
    }
    for (int i = nnz_y - 1; i >= 0; --i) {
      const auto c = static_cast<std::size_t>(y_idx_[static_cast<std::size_t>(i)]);
      const int tmp = next_space_[c];
      const double yc = y_val_[c];
      for (int j = lp_[c]; j < tmp; ++j) {
        y_val_[static_cast<std::size_t>(li_[static_cast<std::size_t>(j)])] -= lx_[static_cast<std::size_t>(j)] * yc;
      }
      li_[static_cast<std::size_t>(tmp)] = k;
      const double l = yc * dinv_[c];
      lx_[static_cast<std::size_t>(tmp)] = l;
      d_[uk] -= yc * l;
      ++next_space_[c];
      y_val_[c] = 0.0;
      y_mark_[c] = 0;
    }
    if (!std::isfinite(d_[uk])) return false;
    if (sign_[uk] * d_[uk] <= kPivotEps) {
      d_[uk] = sign_[uk] * kPivotDelta;
      ++regularized_;
    }
    dinv_[uk] = 1.0 / d_[uk];
  }
  return true;
}

void QuasiDefiniteLdl::solve(Eigen::VectorXd& x) const {
  auto& w = work_;
  for (int k = 0; k < n_; ++k) w[static_cast<std::size_t>(k)] = x[perm_[static_cast<std::size_t>(k)]];
  for (int i = 0; i < n_; ++i) {
    const double wi = w[static_cast<std::size_t>(i)];
    if (wi == 0.0) continue;
    for (int j = lp_[static_cast<std::size_t>(i)]; j < lp_[static_cast<std::size_t>(i) + 1]; ++j) {
      w[static_cast<std::size_t>(li_[static_cast<std::size_t>(j)])] -= lx_[static_cast<std::size_t>(j)] * wi;
    }
  }
  for (int i = 0; i < n_; ++i) w[static_cast<std::size_t>(i)] *= dinv_[static_cast<std::size_t>(i)];
  for (int i = n_ - 1; i >= 0; --i) {
    double acc = w[static_cast<std::size_t>(i)];
    for (int j = lp_[static_cast<std::size_t>(i)]; j < lp_[static_cast<std::size_t>(i) + 1]; ++j) {
      acc -= lx_[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(li_[static_cast<std::size_t>(j)])];
    }
    w[static_cast<std::size_t>(i)] = acc;
  }
  for (int k = 0; k < n_; ++k) x[perm_[static_cast<std::size_t>(k)]] = w[static_cast<std::size_t>(k)];
}

}  // namespace windflow::conic::detail
