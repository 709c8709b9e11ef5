// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "duccex/determinant.hpp"
#include "duccex/eigensolvers.hpp"
#include "duccex/hamio.hpp"

namespace duccex {

struct SpectrumResult {
  SpacePtr space;
  Eigen::VectorXd energies;
  /// Column k is the eigenvector of energies[k] over `space`.
  Eigen::MatrixXd vectors;

  [[nodiscard]] WavefunctionVector state(std::size_t k) const {
    return {space, vectors.col(static_cast<Eigen::Index>(k))};
  }
};

/// Spaces up to this size are diagonalized densely; larger ones use Davidson.
inline constexpr std::size_t kDenseSpectrumLimit = 4000;

/// Lowest n_roots eigenpairs of H over the full sector.
[[nodiscard]] SpectrumResult fci_solve(const SpinOrbitalHamiltonian& ham,
                                       const Sector& sector, std::size_t n_roots);

/// Lowest n_roots eigenpairs of the bare Hamiltonian projected onto the CAS.
[[nodiscard]] SpectrumResult bare_cas_spectrum(const SpinOrbitalHamiltonian& ham,
                                               const ActiveSpace& active,
                                               const Sector& sector,
                                               std::size_t n_roots);

/// Spectrum of H restricted to an arbitrary space.
[[nodiscard]] SpectrumResult solve_in_space(const SpinOrbitalHamiltonian& ham,
                                            const SpacePtr& space,
                                            std::size_t n_roots);

}  // namespace duccex
