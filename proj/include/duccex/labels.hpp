// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Text labels for determinants relative to a reference.
//
//   label := 'ref' | pair (',' pair)*
//   pair  := occ spin '->' virt spin      e.g. "1a->3a"
//
// Orbitals are 1-based spatial indices, spin is 'a' or 'b'. A label with
// pairs (i1->a1, ..., in->an) denotes E_1 E_2 ... E_n |ref> where
// E_k = a+_{ak} a_{ik}, so a label can carry a fermionic phase relative to
// the bitmask determinant it produces.

#pragma once

#include "duccex/determinant.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace duccex {

class LabelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (occupied spin orbital, virtual spin orbital) pairs.
using ExcitationPairs = std::vector<std::pair<std::size_t, std::size_t>>;

[[nodiscard]] ExcitationPairs parse_label(std::string_view text);

/// Applies the excitation string to `reference`. Throws LabelError when an
/// annihilated orbital is empty or a created orbital is already occupied.
[[nodiscard]] std::pair<int, Determinant> resolve_label(
    const ExcitationPairs& pairs, const Determinant& reference);

/// Canonical label of `det` and the phase with det = phase * E...|ref>.
/// Holes and particles are paired per spin in ascending order; pairs are
/// listed by ascending hole spin orbital.
[[nodiscard]] std::pair<int, std::string> label_of(const Determinant& det,
                                                   const Determinant& reference);

/// Spin-orbital text such as "3b".
[[nodiscard]] std::string spin_orbital_name(std::size_t s);

}  // namespace duccex
