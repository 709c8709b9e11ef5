// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/diis.hpp"

#include <stdexcept>

namespace duccex {

void Diis::push(Eigen::VectorXd params, Eigen::VectorXd error) {
  if (depth_ == 0) {
    params_.assign(1, std::move(params));
    errors_.assign(1, std::move(error));
    return;
  }
  params_.push_back(std::move(params));
  errors_.push_back(std::move(error));
  while (params_.size() > depth_) {
    params_.pop_front();
    errors_.pop_front();
  }
}

Eigen::VectorXd Diis::extrapolate() const {
  if (params_.empty()) throw std::logic_error("diis: nothing to extrapolate");
  const auto n = static_cast<Eigen::Index>(params_.size());
  if (n == 1) return params_.back();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      b(i, j) = b(j, i) = errors_[static_cast<std::size_t>(i)].dot(
          errors_[static_cast<std::size_t>(j)]);
  // Scale for conditioning; the Lagrange row stays at -1.
  const double scale = b.topLeftCorner(n, n).diagonal().maxCoeff();
  if (scale > 0) b.topLeftCorner(n, n) /= scale;
  b.row(n).head(n).setConstant(-1.0);
  b.col(n).head(n).setConstant(-1.0);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs[n] = -1.0;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd c;
  if (sv[sv.size() - 1] <= 0.0 || sv[0] / sv[sv.size() - 1] > 1e12) {
    svd.setThreshold(1e-12);
    c = svd.solve(rhs);
  } else {
    c = b.partialPivLu().solve(rhs);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(params_.back().size());
  for (Eigen::Index i = 0; i < n; ++i) out += c[i] * params_[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace duccex
