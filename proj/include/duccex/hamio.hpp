// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file hamio.hpp
 * @brief Molecular integrals, FCIDUMP I/O, spin-orbital Hamiltonians and
 *        active-space bookkeeping.
 *
 * Conventions used throughout the library:
 *  - spatial orbitals are 0-based in memory, 1-based on disk;
 *  - spin orbitals are interleaved: s = 2p is p-alpha, s = 2p + 1 is p-beta;
 *  - two-electron integrals are stored in chemists' notation (pq|rs);
 *  - all energies are in Hartree.
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace duccex {

/// Error raised for malformed FCIDUMP input.
class FcidumpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense n^4 two-electron integral tensor in chemists' notation.
class EriTensor {
 public:
  EriTensor() = default;
  explicit EriTensor(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}

  [[nodiscard]] std::size_t n() const noexcept { return n_; }

  [[nodiscard]] double operator()(std::size_t p, std::size_t q, std::size_t r,
                                  std::size_t s) const noexcept {
    return data_[((p * n_ + q) * n_ + r) * n_ + s];
  }
  double& operator()(std::size_t p, std::size_t q, std::size_t r,
                     std::size_t s) noexcept {
    return data_[((p * n_ + q) * n_ + r) * n_ + s];
  }

  /// Writes `value` into all eight permutational images of (pq|rs).
  void set_symmetric(std::size_t p, std::size_t q, std::size_t r, std::size_t s,
                     double value) noexcept;

  [[nodiscard]] std::span<const double> raw() const noexcept { return data_; }
  [[nodiscard]] std::span<double> raw() noexcept { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Spatial-orbital one- and two-electron integrals plus the scalar core
/// energy. This is the bare molecular Hamiltonian.
struct SpatialIntegrals {
  std::size_t n_orb = 0;
  int n_elec = 0;
  int ms2 = 0;
  double e_core = 0.0;
  Eigen::MatrixXd h;
  EriTensor eri;
  // Parsed from the FCIDUMP header and carried through, never interpreted.
  std::vector<int> orbsym;
  int isym = 1;

  static SpatialIntegrals zeros(std::size_t n_orb, int n_elec, int ms2);

  /// Throws std::invalid_argument if any invariant (symmetry, finiteness,
  /// shape) is violated.
  void validate() const;
};

/// Lines starting with '#' before the header terminator are comments.
[[nodiscard]] SpatialIntegrals parse_fcidump(std::string_view text);
[[nodiscard]] SpatialIntegrals read_fcidump(const std::string& path);
[[nodiscard]] std::string emit_fcidump(const SpatialIntegrals& ints);
void write_fcidump(const SpatialIntegrals& ints, const std::string& path);

/// Second-quantized Hamiltonian over 2 * n_orb spin orbitals.
///
/// Matrix elements are evaluated on demand from the shared spatial
/// integrals, so copies are cheap and the n_so^4 antisymmetrized tensor is
/// never materialized.
class SpinOrbitalHamiltonian {
 public:
  SpinOrbitalHamiltonian() = default;
  explicit SpinOrbitalHamiltonian(SpatialIntegrals ints);

  [[nodiscard]] std::size_t n_so() const noexcept { return 2 * ints_->n_orb; }
  [[nodiscard]] std::size_t n_orb() const noexcept { return ints_->n_orb; }
  [[nodiscard]] double e_core() const noexcept { return ints_->e_core; }
  [[nodiscard]] const SpatialIntegrals& spatial() const noexcept {
    return *ints_;
  }

  [[nodiscard]] double h(std::size_t p, std::size_t q) const noexcept {
    return ((p ^ q) & 1U) ? 0.0 : ints_->h(p >> 1, q >> 1);
  }

  /// <pq|rs> in physicists' notation.
  [[nodiscard]] double v(std::size_t p, std::size_t q, std::size_t r,
                         std::size_t s) const noexcept {
    if (((p ^ r) & 1U) || ((q ^ s) & 1U)) return 0.0;
    return ints_->eri(p >> 1, r >> 1, q >> 1, s >> 1);
  }

  /// <pq||rs> = <pq|rs> - <pq|sr>.
  [[nodiscard]] double v_as(std::size_t p, std::size_t q, std::size_t r,
                            std::size_t s) const noexcept {
    return v(p, q, r, s) - v(p, q, s, r);
  }

  /// Dense one-electron matrix over spin orbitals.
  [[nodiscard]] Eigen::MatrixXd h_matrix() const;

  /// Diagonal of the spin-orbital Fock operator built from the `occupied`
  /// spin orbitals: f_pp = h_pp + sum_i <pi||pi>.
  [[nodiscard]] std::vector<double> fock_diagonal(
      std::span<const std::size_t> occupied) const;

 private:
  std::shared_ptr<const SpatialIntegrals> ints_;
};

[[nodiscard]] SpinOrbitalHamiltonian to_spin_orbital(SpatialIntegrals ints);

/// Restricted closed/open-shell determinant energy computed directly from the
/// spatial integrals: doubly occupied orbitals are the first min(na, nb),
/// singly occupied alpha ones follow.
[[nodiscard]] double aufbau_energy(const SpatialIntegrals& ints);

/// Ordered set of active spatial orbitals.
class ActiveSpace {
 public:
  ActiveSpace() = default;
  explicit ActiveSpace(std::vector<std::size_t> active_spatial)
      : active_(std::move(active_spatial)) {}

  static ActiveSpace all(std::size_t n_orb);
  static ActiveSpace first(std::size_t n_active);

  [[nodiscard]] const std::vector<std::size_t>& spatial() const noexcept {
    return active_;
  }
  [[nodiscard]] std::size_t size() const noexcept { return active_.size(); }

  /// Throws std::out_of_range / std::invalid_argument for duplicate or
  /// out-of-range indices.
  void validate(std::size_t n_orb) const;

  /// Per-spin-orbital flags; spin orbitals 2p, 2p+1 are active iff p is.
  [[nodiscard]] std::vector<bool> classify(std::size_t n_orb) const;

 private:
  std::vector<std::size_t> active_;
};

[[nodiscard]] std::vector<bool> classify_active(const ActiveSpace& active,
                                                std::size_t n_orb);

/// True iff at least one spin-orbital index is inactive.
[[nodiscard]] bool is_external(std::span<const std::size_t> spin_indices,
                               const std::vector<bool>& active_flags);

}  // namespace duccex
