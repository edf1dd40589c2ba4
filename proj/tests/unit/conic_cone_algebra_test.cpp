#include <gtest/gtest.h>

#include <cmath>

#include "cone_algebra.hpp"
#include "test_rng.hpp"

using namespace windflow::conic::detail;
using windflow::testing::Rng;

namespace {

ConeLayout layout() {
  ConeLayout l;
  l.linear = 3;
  l.soc = {3, 4, 2};
  return l;
}

Eigen::VectorXd interior_point(const ConeOps& ops, Rng& rng) {
  Eigen::VectorXd v(ops.dimension());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < ops.linear(); ++i) v[i] = rng.uniform(0.1, 3.0);
  for (std::size_t k = 0; k < ops.soc_start().size(); ++k) {
    const int s = ops.soc_start()[k];
    const int n = ops.soc_size()[k];
    v[s] = v.segment(s + 1, n - 1).norm() + rng.uniform(0.05, 2.0);
  }
  return v;
}

}  // namespace

TEST(NtScaling, MapsZAndSToTheSamePoint) {
  Rng rng(1);
  const ConeOps ops(layout());
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = interior_point(ops, rng);
    const auto z = interior_point(ops, rng);
    NtScaling w(ops);
    ASSERT_TRUE(w.update(s, z));
    const Eigen::VectorXd wz = w.apply(z);
    const Eigen::VectorXd wis = w.apply_inverse(s);
    EXPECT_LT((wz - wis).lpNorm<Eigen::Infinity>(), 1e-10);
    const Eigen::VectorXd v = interior_point(ops, rng);
    EXPECT_LT((w.apply_inverse(w.apply(v)) - v).lpNorm<Eigen::Infinity>(), 1e-10);
    // dense W^2 blocks agree with applying W twice
    const Eigen::VectorXd ww = w.apply(w.apply(v));
    for (std::size_t k = 0; k < ops.soc_start().size(); ++k) {
      const int st = ops.soc_start()[k];
      const int n = ops.soc_size()[k];
      const Eigen::VectorXd blk = w.soc_square(static_cast<int>(k)) * v.segment(st, n);
      EXPECT_LT((blk - ww.segment(st, n)).lpNorm<Eigen::Infinity>(), 1e-9);
    }
  }
}

TEST(ConeOps, DivideInvertsProduct) {
  Rng rng(2);
  const ConeOps ops(layout());
  for (int trial = 0; trial < 100; ++trial) {
    const auto u = interior_point(ops, rng);
    const auto x = interior_point(ops, rng);
    const auto v = ops.product(u, x);
    EXPECT_LT((ops.divide(u, v) - x).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(ConeOps, MaxStepLandsOnBoundary) {
  Rng rng(3);
  const ConeOps ops(layout());
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = interior_point(ops, rng);
    Eigen::VectorXd dx(ops.dimension());
    for (Eigen::Index i = 0; i < dx.size(); ++i) dx[i] = rng.uniform(-3.0, 3.0);
    const double a = ops.max_step(x, dx);
    if (!std::isfinite(a)) continue;
    EXPECT_LT(ops.boundary_distance(x + 0.999 * a * dx), 0.0);
    EXPECT_NEAR(ops.boundary_distance(x + a * dx), 0.0, 1e-7 * (1.0 + a));
  }
}
