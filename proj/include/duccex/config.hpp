// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Flat "key = value" run configuration.
 *
 * One assignment per line, '#' starts a comment, keys are dotted
 * ("ccsd.conv_tol"), lists are comma separated. Unknown keys are rejected;
 * an empty value keeps the default.
 * See README.md for the full key table.
 */

#pragma once

#include "duccex/ccsd.hpp"
#include "duccex/minint.hpp"
#include "duccex/qpesim.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace duccex {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] std::map<std::string, std::string> parse_key_values(const std::string& text);

struct RunConfig {
  // Input: exactly one of fcidump or geometry.
  std::string fcidump;
  std::string geometry;  ///< "H x y z; H x y z"
  std::string basis = "sto-3g";
  std::string units = "bohr";
  int charge = 0;

  std::vector<std::size_t> active;  ///< 0-based spatial orbitals
  bool active_all = false;

  std::optional<std::size_t> target_root;
  std::string target_signature;
  int commutator = 1;

  ScfOptions scf;
  CcsdOptions ccsd;
  std::size_t fci_roots = 10;
  std::size_t eom_roots = 20;

  std::string trial = "ref";
  QpeConfig qpe;

  std::string out_dir = "duccex_out";
  std::size_t threads = 0;

  /// Parses text; relative fcidump paths resolve against `base_dir`.
  static RunConfig from_text(const std::string& text, const std::string& base_dir = ".");
  static RunConfig from_file(const std::string& path);

  /// Checks everything that does not need the orbital count.
  void validate() const;
  /// Checks the active list against n_orb.
  void validate_active(std::size_t n_orb) const;
  [[nodiscard]] ActiveSpace active_space(std::size_t n_orb) const;

  /// Every resolved setting as "key = value" lines in a fixed order.
  [[nodiscard]] std::string echo() const;
};

/// "H 0 0 0; H 0 0 1.4" in the given units ("bohr" or "angstrom").
[[nodiscard]] Molecule parse_geometry(const std::string& text, const std::string& units,
                                      int charge);

}  // namespace duccex
