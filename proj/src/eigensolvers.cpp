// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/eigensolvers.hpp"

#include "duccex/determinant.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace duccex {

EigenPairs eig_sym(const Eigen::MatrixXd& m, std::size_t n_roots) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_sym: matrix not square");
  const auto n = static_cast<std::size_t>(m.rows());
  if (n_roots == 0 || n_roots > n) n_roots = n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_sym: dense eigensolver failed");
  const auto k = static_cast<Eigen::Index>(n_roots);
  EigenPairs out{es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
  for (Eigen::Index j = 0; j < k; ++j) fix_sign(out.vectors.col(j));
  return out;
}

namespace {

// Orthogonalizes v against the first `cols` columns of basis (two passes).
double orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index cols,
                     Eigen::VectorXd& v) {
  for (int pass = 0; pass < 2; ++pass) {
    if (cols > 0) {
      const Eigen::VectorXd c = basis.leftCols(cols).transpose() * v;
      v.noalias() -= basis.leftCols(cols) * c;
    }
  }
  return v.norm();
}

}  // namespace

EigenPairs eig_sym(const MatVec& matvec, const Eigen::VectorXd& diagonal,
                   std::size_t n_roots, const Eigen::MatrixXd& guesses,
                   const DavidsonOptions& options) {
  const Eigen::Index n = diagonal.size();
  const auto k = static_cast<Eigen::Index>(n_roots);
  if (k == 0 || k > n) throw std::invalid_argument("davidson: bad root count");
  const Eigen::Index max_sub = std::min<Eigen::Index>(
      n, std::max<Eigen::Index>(
             static_cast<Eigen::Index>(options.subspace_factor) * k, 2 * k + 1));

  Eigen::MatrixXd v(n, max_sub);
  Eigen::MatrixXd av(n, max_sub);
  Eigen::Index cols = 0;

  auto push = [&](Eigen::VectorXd x) {
    const double norm_in = x.norm();
    if (norm_in == 0.0) return false;
    const double norm = orthogonalize(v, cols, x);
    if (norm < 1e-10 * norm_in || cols >= max_sub) return false;
    v.col(cols) = x / norm;
    ++cols;
    return true;
  };

  for (Eigen::Index j = 0; j < guesses.cols() && cols < max_sub; ++j)
    push(guesses.col(j));
  if (cols < std::min<Eigen::Index>(2 * k, n)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return diagonal[a] < diagonal[b];
    });
    for (auto idx : order) {
      if (cols >= std::min<Eigen::Index>(2 * k, n)) break;
      push(Eigen::VectorXd::Unit(n, idx));
    }
  }

  Eigen::Index computed = 0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd x, r;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    for (; computed < cols; ++computed) av.col(computed) = matvec(v.col(computed));

    Eigen::MatrixXd g = v.leftCols(cols).transpose() * av.leftCols(cols);
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const Eigen::Index nk = std::min(k, cols);
    theta = es.eigenvalues().head(nk);
    const Eigen::MatrixXd y = es.eigenvectors().leftCols(nk);
    x = v.leftCols(cols) * y;
    r = av.leftCols(cols) * y - x * theta.asDiagonal();

    std::vector<Eigen::Index> open;
    for (Eigen::Index j = 0; j < nk; ++j)
      if (r.col(j).norm() >= options.residual_tol) open.push_back(j);
    if (open.empty() && nk == k) {
      EigenPairs out{theta, x};
      for (Eigen::Index j = 0; j < k; ++j) {
        out.vectors.col(j).normalize();
        fix_sign(out.vectors.col(j));
      }
      return out;
    }

    if (cols + static_cast<Eigen::Index>(open.size()) > max_sub) {
      const Eigen::Index keep = std::min<Eigen::Index>(cols, 2 * k);
      const Eigen::MatrixXd yk = es.eigenvectors().leftCols(keep);
      const Eigen::MatrixXd nv = v.leftCols(cols) * yk;
      const Eigen::MatrixXd nav = av.leftCols(cols) * yk;
      v.leftCols(keep) = nv;
      av.leftCols(keep) = nav;
      cols = computed = keep;
    }

    bool added = false;
    for (auto j : open) {
      Eigen::VectorXd t(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = theta[j] - diagonal[i];
        if (std::abs(d) < 1e-8) d = d < 0 ? -1e-8 : 1e-8;
        t[i] = r(i, j) / d;
      }
      const bool ok = push(t) || push(r.col(j));
      added = added || ok;
    }
    if (!added)
      throw DavidsonError("davidson stagnated with residual " +
                          std::to_string(r.colwise().norm().maxCoeff()));
  }
  throw DavidsonError("davidson did not converge within the iteration limit");
}

EigenPairs eig_nonsym(const Eigen::MatrixXd& m, std::size_t n_roots) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_nonsym: matrix not square");
  const auto n = static_cast<std::size_t>(m.rows());
  if (n_roots == 0 || n_roots > n) n_roots = n;
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, true);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_nonsym: eigensolver failed");
  const Eigen::VectorXcd lambda = es.eigenvalues();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (lambda[a].real() != lambda[b].real()) return lambda[a].real() < lambda[b].real();
    return lambda[a].imag() < lambda[b].imag();
  });
  const Eigen::MatrixXcd vecs = es.eigenvectors();
  EigenPairs out{Eigen::VectorXd(static_cast<Eigen::Index>(n_roots)),
                 Eigen::MatrixXd(m.rows(), static_cast<Eigen::Index>(n_roots))};
  for (std::size_t j = 0; j < n_roots; ++j) {
    const auto idx = order[j];
    if (std::abs(lambda[idx].imag()) > 1e-8)
      throw ComplexEigenvalueError(
          "eigenvalue " + std::to_string(j) + " is complex (imaginary part " +
              std::to_string(lambda[idx].imag()) + ")",
          lambda[idx].imag());
    const auto jj = static_cast<Eigen::Index>(j);
    out.values[jj] = lambda[idx].real();
    Eigen::VectorXd v = vecs.col(idx).real();
    v.normalize();
    fix_sign(v);
    out.vectors.col(jj) = v;
  }
  return out;
}

}  // namespace duccex
