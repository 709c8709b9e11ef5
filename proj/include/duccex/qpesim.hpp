// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file qpesim.hpp
 * @brief Matrix-level statistical simulation of quantum phase estimation.
 *
 * Trial grammar:
 *   expression := term (('+' | '-') term)*
 *   term       := [coeff '*'] 'ref' | [coeff '*'] label
 * where label follows labels.hpp, e.g. "0.7071*1a->3a + 0.7071*1b->3b".
 */

#pragma once

#include "duccex/determinant.hpp"
#include "duccex/downfold.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace duccex {

struct TrialTerm {
  double coefficient = 1.0;
  std::string label;
};

struct TrialState {
  std::vector<TrialTerm> terms;
  WavefunctionVector vector;  ///< normalized, over the target space
};

/// Throws LabelError for malformed text or determinants outside `space`,
/// std::invalid_argument for a zero vector.
[[nodiscard]] TrialState parse_trial(std::string_view text, const SpacePtr& space);

enum class QpeMode { Ideal, Register };

struct QpeConfig {
  std::size_t n_shots = 10000;
  QpeMode mode = QpeMode::Ideal;
  int register_bits = 12;
  std::uint64_t seed = 1;
  /// When false, `time` and `shift` are used as given.
  bool auto_time = true;
  double time = 0.0;
  double shift = 0.0;
  double cluster_tol = 1e-6;
  double bin_width = 1e-3;

  void validate() const;
};

struct QpeCluster {
  double energy = 0.0;  ///< lowest exact eigenvalue of the merged group
  std::size_t first_root = 0;
  std::size_t last_root = 0;  ///< inclusive
  double probability = 0.0;   ///< sum of exact p_i over the group
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation, 0 for fewer than 2 shots
  std::string signature;  ///< dominant determinants of the first root
};

struct QpeReport {
  QpeConfig config;
  double time = 0.0;
  double shift = 0.0;
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXd probabilities;
  std::vector<double> shots;
  std::vector<std::size_t> shot_cluster;
  std::vector<QpeCluster> clusters;
  std::vector<double> bin_edges;  ///< size = bin_counts.size() + 1
  std::vector<std::size_t> bin_counts;
};

/// Samples the spectrum of `matrix` (symmetric, over `space`) from `trial`.
[[nodiscard]] QpeReport run_qpe(const Eigen::MatrixXd& matrix, const SpacePtr& space,
                                const TrialState& trial, const QpeConfig& config);
[[nodiscard]] inline QpeReport run_qpe(const EffectiveHamiltonian& eff,
                                       const TrialState& trial, const QpeConfig& config) {
  return run_qpe(eff.matrix, eff.space, trial, config);
}

/// Probability of register outcome k for phase phi with m bits.
[[nodiscard]] double fejer_probability(double phi, std::uint64_t k, int m);

/// Per-shot uniform deviate in [0, 1); stream `stream` of shot `shot`.
[[nodiscard]] double shot_uniform(std::uint64_t seed, std::uint64_t shot,
                                  std::uint64_t stream);

struct QpeTableRow {
  double energy = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
  std::string signature;
};

/// Clusters with at least max(5, 0.5% of shots) counts, ascending energy.
/// `labels`, when non-empty, replaces the per-cluster signatures.
[[nodiscard]] std::vector<QpeTableRow> report_table(const QpeReport& report,
                                                    const std::vector<std::string>& labels = {});

[[nodiscard]] std::string table_csv(const std::vector<QpeTableRow>& rows);
[[nodiscard]] std::string histogram_csv(const QpeReport& report);
[[nodiscard]] std::string probabilities_csv(const QpeReport& report);

}  // namespace duccex
