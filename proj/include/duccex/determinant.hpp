// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file determinant.hpp
 * @brief Slater determinants, determinant spaces and wavefunction vectors.
 *
 * A determinant is an occupation bitmask over at most 128 spin orbitals.
 * Creation operators fill in ascending spin-orbital order, so
 * |D> = a+_{s1} a+_{s2} ... |0> with s1 < s2 < ...; the fermionic phase of
 * a_p or a+_p acting on |D> is (-1)^(number of occupied s < p).
 */

#pragma once

#include "duccex/hamio.hpp"

#include <Eigen/Dense>

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace duccex {

inline constexpr std::size_t kMaxSpinOrbitals = 128;

struct Determinant {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  [[nodiscard]] constexpr bool test(std::size_t s) const noexcept {
    return s < 64 ? ((lo >> s) & 1U) : ((hi >> (s - 64)) & 1U);
  }
  constexpr void set(std::size_t s) noexcept {
    if (s < 64)
      lo |= (std::uint64_t{1} << s);
    else
      hi |= (std::uint64_t{1} << (s - 64));
  }
  constexpr void reset(std::size_t s) noexcept {
    if (s < 64)
      lo &= ~(std::uint64_t{1} << s);
    else
      hi &= ~(std::uint64_t{1} << (s - 64));
  }
  [[nodiscard]] constexpr int count() const noexcept {
    return std::popcount(lo) + std::popcount(hi);
  }
  /// Number of occupied spin orbitals with index strictly below s.
  [[nodiscard]] constexpr int count_below(std::size_t s) const noexcept {
    if (s < 64) return std::popcount(lo & ((std::uint64_t{1} << s) - 1));
    if (s == 128) return count();
    return std::popcount(lo) +
           std::popcount(hi & ((std::uint64_t{1} << (s - 64)) - 1));
  }
  [[nodiscard]] constexpr Determinant operator^(Determinant o) const noexcept {
    return {lo ^ o.lo, hi ^ o.hi};
  }
  [[nodiscard]] constexpr Determinant operator&(Determinant o) const noexcept {
    return {lo & o.lo, hi & o.hi};
  }
  [[nodiscard]] constexpr Determinant operator|(Determinant o) const noexcept {
    return {lo | o.lo, hi | o.hi};
  }
  [[nodiscard]] constexpr bool any() const noexcept { return lo || hi; }

  /// Integer order of the 128-bit mask.
  constexpr auto operator<=>(const Determinant& o) const noexcept {
    if (auto c = hi <=> o.hi; c != 0) return c;
    return lo <=> o.lo;
  }
  constexpr bool operator==(const Determinant&) const noexcept = default;

  /// Occupied spin orbitals, ascending.
  [[nodiscard]] std::vector<std::size_t> occupied() const;
  /// Bit string, lowest spin orbital first.
  [[nodiscard]] std::string to_string(std::size_t n_so) const;

  /// 2 * Sz.
  [[nodiscard]] int ms2() const noexcept;
};

struct DeterminantHash {
  std::size_t operator()(const Determinant& d) const noexcept {
    std::uint64_t x = d.lo * 0x9E3779B97F4A7C15ULL ^ (d.hi + 0x632BE59BD9B4E019ULL);
    x ^= x >> 31;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 29;
    return static_cast<std::size_t>(x);
  }
};

/// Particle-number / Sz sector over a spin-orbital set.
struct Sector {
  std::size_t n_so = 0;
  int n_elec = 0;
  int ms2 = 0;

  [[nodiscard]] int n_alpha() const noexcept { return (n_elec + ms2) / 2; }
  [[nodiscard]] int n_beta() const noexcept { return (n_elec - ms2) / 2; }
  /// Whether at least one determinant exists in the sector.
  [[nodiscard]] bool achievable() const noexcept;
  /// Aufbau reference: alpha and beta electrons in the lowest spatial
  /// orbitals. Only meaningful for achievable sectors.
  [[nodiscard]] Determinant reference() const;

  bool operator==(const Sector&) const = default;
};

[[nodiscard]] Sector sector_of(const SpatialIntegrals& ints);

enum class Restriction { Full, Cas, SinglesDoubles };

/// Ordered determinant list (ascending bitmask) with a hash index.
class DeterminantSpace {
 public:
  DeterminantSpace() = default;
  DeterminantSpace(Sector sector, std::vector<Determinant> dets,
                   Restriction restriction, Determinant reference,
                   std::optional<ActiveSpace> active = std::nullopt);

  [[nodiscard]] const Sector& sector() const noexcept { return sector_; }
  [[nodiscard]] std::size_t size() const noexcept { return dets_.size(); }
  [[nodiscard]] bool empty() const noexcept { return dets_.empty(); }
  [[nodiscard]] const Determinant& operator[](std::size_t i) const {
    return dets_[i];
  }
  [[nodiscard]] const std::vector<Determinant>& determinants() const noexcept {
    return dets_;
  }
  [[nodiscard]] std::optional<std::size_t> find(const Determinant& d) const;
  [[nodiscard]] bool contains(const Determinant& d) const {
    return index_.count(d) != 0;
  }
  [[nodiscard]] Restriction restriction() const noexcept {
    return restriction_;
  }
  [[nodiscard]] const Determinant& reference() const noexcept {
    return reference_;
  }
  [[nodiscard]] const std::optional<ActiveSpace>& active() const noexcept {
    return active_;
  }

 private:
  Sector sector_;
  std::vector<Determinant> dets_;
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index_;
  Restriction restriction_ = Restriction::Full;
  Determinant reference_;
  std::optional<ActiveSpace> active_;
};

using SpacePtr = std::shared_ptr<const DeterminantSpace>;

[[nodiscard]] SpacePtr enumerate_full(const Sector& sector);
/// Determinants that agree with the aufbau reference on every inactive spin
/// orbital. Throws if the reference cannot be represented (an occupied
/// orbital is missing from the active list while the active space cannot
/// host the electrons consistently).
[[nodiscard]] SpacePtr enumerate_cas(const Sector& sector,
                                     const ActiveSpace& active);
/// Reference plus all Sz-conserving single and double excitations.
[[nodiscard]] SpacePtr enumerate_sd(const Sector& sector);

/// Real coefficient vector aligned with a determinant space.
struct WavefunctionVector {
  SpacePtr space;
  Eigen::VectorXd coeffs;

  WavefunctionVector() = default;
  explicit WavefunctionVector(SpacePtr s)
      : space(std::move(s)),
        coeffs(Eigen::VectorXd::Zero(
            static_cast<Eigen::Index>(space ? space->size() : 0))) {}
  WavefunctionVector(SpacePtr s, Eigen::VectorXd c)
      : space(std::move(s)), coeffs(std::move(c)) {}

  static WavefunctionVector basis(SpacePtr s, const Determinant& d);

  [[nodiscard]] double at(const Determinant& d) const;
  [[nodiscard]] double norm() const { return coeffs.norm(); }
};

/// Copies `v` onto `target` (coefficients of determinants missing from the
/// target are dropped).
[[nodiscard]] WavefunctionVector project(const WavefunctionVector& v,
                                         const SpacePtr& target);

/// Largest-magnitude component made positive; ties (within 1e-10 relative)
/// resolved in favour of the lowest index.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace duccex
