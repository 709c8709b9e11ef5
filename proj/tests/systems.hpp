// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Small molecular systems shared by the tests.

#pragma once

#include "duccex/hamio.hpp"
#include "duccex/minint.hpp"

#include <string>

namespace systems {

inline duccex::Molecule h2(double r) {
  duccex::Molecule m;
  m.atoms = {{1, {0, 0, 0}}, {1, {0, 0, r}}};
  return m;
}

// Equally spaced linear chain of four hydrogens.
inline duccex::Molecule h4_linear(double spacing = 2.0) {
  duccex::Molecule m;
  for (int k = 0; k < 4; ++k) m.atoms.push_back({1, {0, 0, k * spacing}});
  return m;
}

inline duccex::SpatialIntegrals mo_integrals(const duccex::Molecule& mol, const std::string& basis) {
  const auto ao = duccex::integrals_s(mol, duccex::build_basis(mol, basis));
  const auto scf = duccex::rhf(mol, ao);
  return duccex::mo_transform(scf.coefficients, ao, scf.n_elec);
}

}  // namespace systems
