// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ccsd.hpp
 * @brief Spin-orbital CCSD via exact full-sector residuals.
 *
 * Excitation operators follow the operators.hpp convention:
 * singles E = a+_a a_i, doubles E = a+_a a+_b a_j a_i with i < j, a < b.
 * Residuals are r_mu = <Phi| E_mu^dagger e^{-T} H e^{T} |Phi>.
 */

#pragma once

#include "duccex/determinant.hpp"
#include "duccex/hamio.hpp"
#include "duccex/operators.hpp"

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

namespace duccex {

struct Excitation {
  std::uint8_t rank = 0;  ///< 1 or 2
  std::array<std::uint8_t, 2> occ{};
  std::array<std::uint8_t, 2> vir{};
  Determinant det;  ///< E|ref> = phase * |det>
  int phase = 1;

  [[nodiscard]] OperatorTerm term(double amplitude) const;
};

/// Singles and doubles of the aufbau reference of a sector, in a fixed
/// order: singles by (i, a), then doubles by (i, j, a, b), all ascending.
struct ExcitationManifold {
  Sector sector;
  Determinant reference;
  std::vector<std::size_t> occupied;
  std::vector<std::size_t> virtuals;
  std::vector<Excitation> excitations;
  std::size_t n_singles = 0;
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index;

  [[nodiscard]] std::size_t size() const noexcept { return excitations.size(); }
  [[nodiscard]] std::size_t n_doubles() const noexcept { return size() - n_singles; }

  /// Sum_mu amps[mu] E_mu.
  [[nodiscard]] ExcitationOperator to_operator(const Eigen::VectorXd& amps) const;
  [[nodiscard]] ExcitationOperator singles_operator(const Eigen::VectorXd& amps) const;
  [[nodiscard]] ExcitationOperator doubles_operator(const Eigen::VectorXd& amps) const;
  /// <Phi|E_mu^dagger|w> for every mu.
  [[nodiscard]] Eigen::VectorXd project(const WavefunctionVector& w) const;
  /// Position of an excitation given its determinant, if present.
  [[nodiscard]] std::optional<std::size_t> find(const Determinant& d) const;
};

[[nodiscard]] std::shared_ptr<const ExcitationManifold> build_manifold(
    const Sector& sector);

struct CcsdOptions {
  double conv_tol = 1e-9;
  int max_iter = 200;
  int diis_depth = 8;
  double level_shift = 0.0;
};

struct CcsdIteration {
  int iteration = 0;
  double max_residual = 0.0;
  double e_corr = 0.0;
};

struct ClusterAmplitudes {
  std::shared_ptr<const ExcitationManifold> manifold;
  SpacePtr full_space;
  Eigen::VectorXd t;  ///< one amplitude per manifold excitation
  double e_ref = 0.0;
  double e_corr = 0.0;
  double e_total = 0.0;
  double max_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Entry k is evaluated at the amplitudes entering iteration k (entry 0
  /// is the t = 0 start).
  std::vector<CcsdIteration> log;

  [[nodiscard]] ExcitationOperator t_operator() const { return manifold->to_operator(t); }
  [[nodiscard]] ExcitationOperator t1_operator() const {
    return manifold->singles_operator(t);
  }
  [[nodiscard]] ExcitationOperator t2_operator() const {
    return manifold->doubles_operator(t);
  }
  /// t1[i][a] with spin-orbital indices (0 if spin-forbidden).
  [[nodiscard]] double t1(std::size_t i, std::size_t a) const;
  /// Antisymmetric t2[ij][ab] expanded from the canonical storage.
  [[nodiscard]] double t2(std::size_t i, std::size_t j, std::size_t a,
                          std::size_t b) const;
};

class CcsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// w = e^{-T} H e^{T} |Phi> over the full sector.
[[nodiscard]] WavefunctionVector similarity_transformed_reference(
    const SpinOrbitalHamiltonian& ham, const ExcitationOperator& t,
    const SpacePtr& full_space);

/// Residuals and correlation energy at amplitudes `t`.
struct CcsdResidual {
  Eigen::VectorXd r;
  double e_corr = 0.0;
};
[[nodiscard]] CcsdResidual ccsd_residual(const SpinOrbitalHamiltonian& ham,
                                         const ExcitationManifold& manifold,
                                         const SpacePtr& full_space,
                                         const Eigen::VectorXd& t, double e_ref);

[[nodiscard]] ClusterAmplitudes solve_ccsd(const SpinOrbitalHamiltonian& ham,
                                           const Sector& sector,
                                           const CcsdOptions& options = {});

}  // namespace duccex
