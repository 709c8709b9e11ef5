// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>

namespace duccex {

/// Eigenvalues ascending; column k of `vectors` belongs to values[k].
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

class DavidsonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComplexEigenvalueError : public std::runtime_error {
 public:
  ComplexEigenvalueError(const std::string& what, double imag)
      : std::runtime_error(what), imaginary_part(imag) {}
  double imaginary_part;
};

using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct DavidsonOptions {
  double residual_tol = 1e-9;
  std::size_t max_iterations = 1000;
  /// Subspace limit as a multiple of the number of roots.
  std::size_t subspace_factor = 20;
};

/// Lowest n_roots eigenpairs of a dense symmetric matrix (all when 0).
/// Eigenvector signs are fixed: largest-magnitude component positive.
[[nodiscard]] EigenPairs eig_sym(const Eigen::MatrixXd& m, std::size_t n_roots = 0);

/// Thick-restart Davidson with a diagonal preconditioner. `guesses` may be
/// empty, in which case unit vectors on the smallest diagonal entries are used.
[[nodiscard]] EigenPairs eig_sym(const MatVec& matvec,
                                 const Eigen::VectorXd& diagonal,
                                 std::size_t n_roots,
                                 const Eigen::MatrixXd& guesses = {},
                                 const DavidsonOptions& options = {});

/// Lowest n_roots right eigenpairs of a real non-symmetric matrix sorted by
/// real part, each vector with unit norm and fixed sign. Throws
/// ComplexEigenvalueError if any requested root has |Im| > 1e-8.
[[nodiscard]] EigenPairs eig_nonsym(const Eigen::MatrixXd& m,
                                    std::size_t n_roots = 0);

}  // namespace duccex
