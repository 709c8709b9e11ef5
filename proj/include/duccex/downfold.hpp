// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file downfold.hpp
 * @brief State-specific external generators and single-commutator
 *        effective Hamiltonians over a CAS.
 */

#pragma once

#include "duccex/ccsd.hpp"
#include "duccex/eigensolvers.hpp"
#include "duccex/eomccsd.hpp"
#include "duccex/hamio.hpp"

#include <optional>
#include <string>

namespace duccex {

struct SigmaExt {
  ExcitationOperator s1;
  ExcitationOperator s2;
  std::size_t state = 0;
  double n_k_a = 1.0;

  /// S - S^dagger with S = s1 + s2.
  [[nodiscard]] ExcitationOperator sigma() const { return (s1 + s2).anti_hermitian(); }
  [[nodiscard]] bool empty() const noexcept { return s1.empty() && s2.empty(); }
};

/// External singles N (r0 t1 + r1) and doubles read from
/// N (r0 (T2 + T1^2/2) + R1 T1 + R2)|Phi>; tuples with every index active
/// are dropped.
[[nodiscard]] SigmaExt extract_sigma_ext(double r0, const Eigen::VectorXd& r,
                                         double n_k_a,
                                         const ClusterAmplitudes& amplitudes,
                                         const ActiveSpace& active);
[[nodiscard]] inline SigmaExt extract_sigma_ext(const EomState& state,
                                                const ClusterAmplitudes& amplitudes,
                                                const ActiveSpace& active) {
  auto s = extract_sigma_ext(state.r0, state.r, state.n_k_a, amplitudes, active);
  s.state = state.root;
  return s;
}

struct EffectiveHamiltonian {
  SpacePtr space;
  Eigen::MatrixXd matrix;
  ActiveSpace active;
  int commutator_order = 0;
  long state = -1;  ///< source EOM root, -1 for the bare Hamiltonian
  double e_ccsd = 0.0;
  double e_state = 0.0;
  double asymmetry = 0.0;  ///< max |M - M^T| before symmetrization
};

/// Pre-symmetrization asymmetry above this raises std::runtime_error.
inline constexpr double kAsymmetryLimit = 1e-8;

/// P_CAS [H + H sigma - sigma H] P_CAS, symmetrized. A null or empty sigma
/// gives the bare CAS block with commutator order 0.
[[nodiscard]] EffectiveHamiltonian build_effective(const SpinOrbitalHamiltonian& ham,
                                                   const SigmaExt* sigma,
                                                   const ActiveSpace& active,
                                                   const Sector& sector);

/// Same, for an arbitrary anti-Hermitian generator.
[[nodiscard]] EffectiveHamiltonian build_effective(const SpinOrbitalHamiltonian& ham,
                                                   const ExcitationOperator& sigma,
                                                   const ActiveSpace& active,
                                                   const Sector& sector);

struct EffectiveSpectrum {
  EigenPairs pairs;
  std::vector<std::vector<DeterminantWeight>> signatures;
};

[[nodiscard]] EffectiveSpectrum diagonalize_effective(const EffectiveHamiltonian& eff,
                                                      std::size_t n_roots = 0,
                                                      std::size_t signature_size = 5);

/// Plain-text format:
///   duccex-effective-hamiltonian 1
///   n_so / n_elec / ms2 / active / state / commutator_order / e_ccsd /
///   e_state / asymmetry / dimension   (one "key value..." line each)
///   determinants
///   <occupation bit string> <label>   (dimension lines, canonical order)
///   matrix
///   <row>                             (dimension lines, %.17g values)
void export_effective(const EffectiveHamiltonian& eff, const std::string& path);
[[nodiscard]] std::string format_effective(const EffectiveHamiltonian& eff);
[[nodiscard]] EffectiveHamiltonian import_effective(const std::string& path);
[[nodiscard]] EffectiveHamiltonian parse_effective(const std::string& text);

}  // namespace duccex
