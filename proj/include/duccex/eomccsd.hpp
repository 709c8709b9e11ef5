// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file eomccsd.hpp
 * @brief EOMCCSD in the {Phi} + singles + doubles space.
 *
 * Hbar is represented in the basis {|Phi>, E_mu|Phi>}; row/column 0 is the
 * reference and row/column 1 + mu belongs to manifold excitation mu. The
 * right eigenvectors are therefore the operator amplitudes (r0, r_mu) of
 * R = r0 + sum_mu r_mu E_mu directly.
 */

#pragma once

#include "duccex/ccsd.hpp"
#include "duccex/determinant.hpp"
#include "duccex/hamio.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace duccex {

struct HbarMatrix {
  std::shared_ptr<const ExcitationManifold> manifold;
  Eigen::MatrixXd matrix;
  double e_ccsd = 0.0;
};

/// Full sectors up to this size build Hbar from dense full-sector matrices;
/// larger ones apply e^{-T} H e^{T} column by column.
inline constexpr std::size_t kDenseHbarLimit = 6000;
/// Largest {Phi}+S+D dimension accepted for the dense Hbar.
inline constexpr std::size_t kHbarGuard = 50000;

[[nodiscard]] HbarMatrix build_hbar(const ClusterAmplitudes& amplitudes,
                                    const SpinOrbitalHamiltonian& ham);

struct DeterminantWeight {
  Determinant det;
  std::string label;
  /// Coefficient along the labelled operator string applied to the reference.
  double coefficient = 0.0;
};

struct EomState {
  std::size_t root = 0;
  double energy = 0.0;
  double omega = 0.0;
  double r0 = 0.0;
  Eigen::VectorXd r;  ///< amplitudes over the manifold
  double n_k_a = 0.0;
  double spin_square = 0.0;
  bool triplet_like = false;
  std::vector<DeterminantWeight> signature;

  [[nodiscard]] ExcitationOperator r_operator(const ExcitationManifold& m) const {
    return m.to_operator(r);
  }
};

struct EomOptions {
  std::size_t n_roots = 0;  ///< 0 means every root
  double spin_threshold = 0.1;
  std::size_t signature_size = 5;
};

/// Right eigenpairs of Hbar sorted by energy. Each eigenvector has unit norm
/// over {Phi}+S+D with its largest component positive. Every state is
/// annotated with N_K(A), <S^2> and its dominant determinants.
[[nodiscard]] std::vector<EomState> solve_eomccsd(const HbarMatrix& hbar,
                                                  const ClusterAmplitudes& amplitudes,
                                                  const EomOptions& options = {});

struct EomAVector {
  WavefunctionVector psi;  ///< (P+Q1+Q2)(R0+R1+R2) e^{T}|Phi>, unnormalized
  double n = 0.0;          ///< 1 / |psi|
};

/// Builds EOMCCSD(A) vectors for many roots of one CCSD solution.
class EomAProjector {
 public:
  explicit EomAProjector(const ClusterAmplitudes& amplitudes);
  [[nodiscard]] EomAVector operator()(double r0, const Eigen::VectorXd& r) const;

 private:
  const ClusterAmplitudes* amplitudes_;
  SpacePtr sd_space_;
  WavefunctionVector et_phi_;
  Eigen::VectorXd et_phi_sd_;
  Eigen::MatrixXd columns_;  ///< E_mu e^{T}|Phi> projected, when small enough
};

[[nodiscard]] EomAVector eomccsd_a_vector(double r0, const Eigen::VectorXd& r,
                                          const ClusterAmplitudes& amplitudes);
[[nodiscard]] inline EomAVector eomccsd_a_vector(const EomState& state,
                                                 const ClusterAmplitudes& amplitudes) {
  return eomccsd_a_vector(state.r0, state.r, amplitudes);
}

/// Largest-|c| determinants of a vector, labelled relative to `reference`.
[[nodiscard]] std::vector<DeterminantWeight> dominant_determinants(
    const WavefunctionVector& v, const Determinant& reference, std::size_t count);

/// Label of the dominant determinant of a weight list ("" when empty).
[[nodiscard]] std::string format_signature(const std::vector<DeterminantWeight>& w);

}  // namespace duccex
