#pragma once

#include <Eigen/Dense>
#include <vector>

#include "standard_form.hpp"

namespace windflow::conic::detail {

/// Jordan-algebra operations on K = R^l_+ x Q^{n_1} x ... x Q^{n_k}.
class ConeOps {
 public:
  explicit ConeOps(const ConeLayout& layout);

  [[nodiscard]] int linear() const { return linear_; }
  [[nodiscard]] int dimension() const { return dim_; }
  [[nodiscard]] int degree() const { return linear_ + static_cast<int>(soc_start_.size()); }
  [[nodiscard]] const std::vector<int>& soc_start() const { return soc_start_; }
  [[nodiscard]] const std::vector<int>& soc_size() const { return soc_size_; }

  /// Identity element e.
  [[nodiscard]] Eigen::VectorXd identity() const;
  /// Smallest t with v + t e in K (negative when v is interior).
  [[nodiscard]] double boundary_distance(const Eigen::VectorXd& v) const;
  /// Moves v strictly inside K if it is not already.
  void shift_inside(Eigen::VectorXd& v) const;
  /// Largest alpha with x + alpha dx in K; +inf when unbounded.
  [[nodiscard]] double max_step(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const;

  [[nodiscard]] Eigen::VectorXd product(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  /// Solves u o x = v for x.
  [[nodiscard]] Eigen::VectorXd divide(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

 private:
  int linear_ = 0;
  int dim_ = 0;
  std::vector<int> soc_start_;
  std::vector<int> soc_size_;
};

/// Nesterov-Todd scaling W with W z = W^{-1} s = lambda.
class NtScaling {
 public:
  explicit NtScaling(const ConeOps& cones);

  void set_identity();
  /// Returns false when s or z is not strictly inside the cone.
  bool update(const Eigen::VectorXd& s, const Eigen::VectorXd& z);

  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  [[nodiscard]] Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;

  /// Entries of W^2: linear part is diagonal, each SOC block is dense.
  [[nodiscard]] double lp_square(int i) const { return lp_[i] * lp_[i]; }
  [[nodiscard]] Eigen::MatrixXd soc_square(int k) const;

 private:
  const ConeOps* cones_;
  Eigen::VectorXd lp_;
  std::vector<double> eta_;
  std::vector<Eigen::VectorXd> wbar_;
};

}  // namespace windflow::conic::detail
