// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file operators.hpp
 * @brief Fermionic operator application on determinant spaces.
 *
 * A term  t * a+_{c0} a+_{c1} ... a+_{c(k-1)} a_{n(k-1)} ... a_{n1} a_{n0}
 * acts right-to-left: a_{n0} first, a+_{c0} last. For a double excitation
 * with creation (a, b) and annihilation (i, j) this is t * a+_a a+_b a_j a_i.
 * The adjoint swaps the two index lists and keeps the amplitude.
 */

#pragma once

#include "duccex/determinant.hpp"
#include "duccex/hamio.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace duccex {

inline constexpr std::size_t kMaxTermRank = 4;

struct OperatorTerm {
  double amplitude = 0.0;
  std::uint8_t rank = 0;
  std::array<std::uint8_t, kMaxTermRank> create{};
  std::array<std::uint8_t, kMaxTermRank> annihilate{};

  static OperatorTerm excitation(double amplitude,
                                 std::initializer_list<std::size_t> create,
                                 std::initializer_list<std::size_t> annihilate);

  [[nodiscard]] OperatorTerm adjoint() const noexcept {
    OperatorTerm out = *this;
    std::swap(out.create, out.annihilate);
    return out;
  }

  /// Applies the bare operator string (amplitude ignored) to `d`. Returns the
  /// phase (+1/-1) and resulting determinant, or nullopt if annihilated.
  [[nodiscard]] std::optional<std::pair<int, Determinant>> act(
      Determinant d) const noexcept;
};

class ExcitationOperator {
 public:
  ExcitationOperator() = default;

  void add(const OperatorTerm& term);
  void add(double amplitude, std::initializer_list<std::size_t> create,
           std::initializer_list<std::size_t> annihilate) {
    add(OperatorTerm::excitation(amplitude, create, annihilate));
  }

  [[nodiscard]] const std::vector<OperatorTerm>& terms() const noexcept {
    return terms_;
  }
  [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

  [[nodiscard]] ExcitationOperator adjoint() const;
  /// A - A^dagger.
  [[nodiscard]] ExcitationOperator anti_hermitian() const;
  [[nodiscard]] ExcitationOperator scaled(double factor) const;
  /// Concatenation of the two term lists.
  [[nodiscard]] ExcitationOperator operator+(const ExcitationOperator& o) const;

  /// Every term annihilates only occupied and creates only unoccupied
  /// orbitals of `reference`, so the operator is nilpotent on the sector.
  [[nodiscard]] bool is_pure_excitation(const Determinant& reference) const;

 private:
  std::vector<OperatorTerm> terms_;
};

/// Linear map between wavefunction vectors.
using VectorMap = std::function<WavefunctionVector(const WavefunctionVector&)>;

/// Exact H|x> (including e_core) projected onto `out_space`.
/// Throws std::invalid_argument on sector mismatch.
[[nodiscard]] WavefunctionVector apply_hamiltonian(
    const SpinOrbitalHamiltonian& ham, const WavefunctionVector& x,
    const SpacePtr& out_space);

/// A|x> (or A^dagger|x>) projected onto `out_space`.
[[nodiscard]] WavefunctionVector apply_excitation(
    const ExcitationOperator& op, const WavefunctionVector& x,
    const SpacePtr& out_space, bool adjoint = false);

class SeriesNotConverged : public std::runtime_error {
 public:
  SeriesNotConverged(const std::string& what, double last_norm)
      : std::runtime_error(what), last_term_norm(last_norm) {}
  double last_term_norm;
};

/// sum_k (sign * A)^k / k! |x>, evaluated in x's space. Terminates exactly for
/// nilpotent operators; otherwise stops when the new term's norm falls below
/// 1e-14 * |result| (at most 40 terms).
[[nodiscard]] WavefunctionVector exp_apply(const ExcitationOperator& op,
                                           const WavefunctionVector& x,
                                           int sign);

inline constexpr std::size_t kDefaultDenseGuard = 20000;

/// Column j = op(e_j). Throws std::length_error above `guard`.
[[nodiscard]] Eigen::MatrixXd dense_matrix(const VectorMap& op,
                                           const SpacePtr& space,
                                           std::size_t guard = kDefaultDenseGuard);

/// Dense Hamiltonian over `space` via Slater-Condon rules.
[[nodiscard]] Eigen::MatrixXd hamiltonian_matrix(
    const SpinOrbitalHamiltonian& ham, const SpacePtr& space,
    std::size_t guard = kDefaultDenseGuard);

/// Single matrix element <bra|H|ket> via Slater-Condon rules.
[[nodiscard]] double hamiltonian_element(const SpinOrbitalHamiltonian& ham,
                                         const Determinant& bra,
                                         const Determinant& ket);

/// <x|S^2|x> / <x|x> for a vector in a fixed-Sz sector.
[[nodiscard]] double spin_square(const WavefunctionVector& x);

}  // namespace duccex
