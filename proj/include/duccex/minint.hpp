// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file minint.hpp
 * @brief s-type Gaussian integrals and closed-shell Hartree-Fock.
 *
 * Positions are in bohr. Only s shells are supported; the built-in basis
 * table provides STO-3G and 6-31G for hydrogen.
 */

#pragma once

#include "duccex/hamio.hpp"

#include <Eigen/Dense>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace duccex {

struct Atom {
  int z = 1;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

struct Molecule {
  std::vector<Atom> atoms;
  int charge = 0;

  [[nodiscard]] int n_electrons() const;
  [[nodiscard]] double nuclear_repulsion() const;
  /// Throws std::invalid_argument on non-finite positions or negative
  /// electron count.
  void validate() const;
};

/// Contracted s function sum_k c_k exp(-a_k |r - center|^2). Coefficients
/// include primitive normalization and the overall contraction norm.
struct BasisShell {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  std::vector<double> exponents;
  std::vector<double> coefficients;

  /// Builds a normalized shell from textbook contraction coefficients
  /// (which multiply normalized primitives).
  static BasisShell normalized(const Eigen::Vector3d& center,
                               std::vector<double> exponents,
                               const std::vector<double>& contraction);
};

/// element Z -> list of (exponents, contraction coefficients).
using ElementBasis = std::map<int, std::vector<std::pair<std::vector<double>, std::vector<double>>>>;
using BasisLibrary = std::map<std::string, ElementBasis>;

/// Parses the plain-text basis table:
///   basis <name>
///   <symbol> s <n_primitives>
///   <exponent> <coefficient>     (n_primitives lines)
/// Lines starting with '#' are comments. Names are case-insensitive.
[[nodiscard]] BasisLibrary parse_basis_table(const std::string& text);
[[nodiscard]] const BasisLibrary& builtin_basis_library();
[[nodiscard]] std::vector<BasisShell> build_basis(const Molecule& mol,
                                                  const std::string& name,
                                                  const BasisLibrary& library =
                                                      builtin_basis_library());

struct AoIntegrals {
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd kinetic;
  Eigen::MatrixXd nuclear;
  EriTensor eri;
  double e_nuc = 0.0;
};

/// Boys function F0(x) = 1/2 sqrt(pi/x) erf(sqrt(x)), F0(0) = 1.
[[nodiscard]] double boys_f0(double x);

[[nodiscard]] AoIntegrals integrals_s(const Molecule& mol,
                                      const std::vector<BasisShell>& shells);

struct ScfOptions {
  int max_iter = 200;
  double conv_tol = 1e-10;
  int diis_depth = 8;
  /// After convergence, follow negative directions of the real RHF orbital
  /// Hessian and reconverge.
  bool stability_check = true;
};

struct ScfResult {
  Eigen::MatrixXd coefficients;  ///< AO -> MO, columns ordered by energy
  Eigen::VectorXd orbital_energies;
  Eigen::MatrixXd density;  ///< closed-shell AO density 2 C_occ C_occ^T
  double energy = 0.0;
  double error = 0.0;  ///< max |FDS - SDF|
  bool converged = false;
  int iterations = 0;
  int n_elec = 0;
};

class ScfConvergenceError : public std::runtime_error {
 public:
  ScfConvergenceError(const std::string& what, ScfResult last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  ScfResult last_iterate;
};

[[nodiscard]] ScfResult rhf(const Molecule& mol, const AoIntegrals& ao,
                            const ScfOptions& options = {});
[[nodiscard]] ScfResult rhf(const Molecule& mol,
                            const std::vector<BasisShell>& shells,
                            const ScfOptions& options = {});

/// MO-basis integrals for the coefficient matrix `c`.
[[nodiscard]] SpatialIntegrals mo_transform(const Eigen::MatrixXd& c,
                                            const AoIntegrals& ao, int n_elec);

}  // namespace duccex
