// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <deque>

namespace duccex {

/// Pulay extrapolation over (parameter, error) vector pairs.
class Diis {
 public:
  explicit Diis(std::size_t depth) : depth_(depth) {}

  void push(Eigen::VectorXd params, Eigen::VectorXd error);
  void clear() {
    params_.clear();
    errors_.clear();
  }
  [[nodiscard]] std::size_t size() const noexcept { return params_.size(); }

  /// Extrapolated parameters. Falls back to a pseudo-inverse when the
  /// B-matrix condition number exceeds 1e12.
  [[nodiscard]] Eigen::VectorXd extrapolate() const;

 private:
  std::size_t depth_;
  std::deque<Eigen::VectorXd> params_;
  std::deque<Eigen::VectorXd> errors_;
};

}  // namespace duccex
