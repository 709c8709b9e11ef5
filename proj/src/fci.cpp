// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/fci.hpp"

#include "duccex/operators.hpp"

namespace duccex {

SpectrumResult solve_in_space(const SpinOrbitalHamiltonian& ham,
                              const SpacePtr& space, std::size_t n_roots) {
  if (space->empty()) throw std::invalid_argument("empty determinant space");
  n_roots = std::min(n_roots, space->size());
  if (space->size() <= kDenseSpectrumLimit) {
    auto pairs = eig_sym(hamiltonian_matrix(ham, space), n_roots);
    return {space, std::move(pairs.values), std::move(pairs.vectors)};
  }
  Eigen::VectorXd diag(static_cast<Eigen::Index>(space->size()));
  for (std::size_t i = 0; i < space->size(); ++i)
    diag[static_cast<Eigen::Index>(i)] =
        hamiltonian_element(ham, (*space)[i], (*space)[i]);
  auto matvec = [&](const Eigen::VectorXd& x) {
    return apply_hamiltonian(ham, WavefunctionVector(space, x), space).coeffs;
  };
  auto pairs = eig_sym(matvec, diag, n_roots);
  return {space, std::move(pairs.values), std::move(pairs.vectors)};
}

SpectrumResult fci_solve(const SpinOrbitalHamiltonian& ham, const Sector& sector,
                         std::size_t n_roots) {
  if (sector.n_so != ham.n_so())
    throw std::invalid_argument("sector does not match the Hamiltonian");
  return solve_in_space(ham, enumerate_full(sector), n_roots);
}

SpectrumResult bare_cas_spectrum(const SpinOrbitalHamiltonian& ham,
                                 const ActiveSpace& active, const Sector& sector,
                                 std::size_t n_roots) {
  active.validate(ham.n_orb());
  return solve_in_space(ham, enumerate_cas(sector, active), n_roots);
}

}  // namespace duccex
