// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pipeline.hpp
 * @brief Stage-wise orchestration. Every stage reads its prerequisites from
 *        the output directory and writes its own artifacts there, so the
 *        full pipeline is exactly the stages run in order.
 *
 * Artifacts:
 *   scf       integrals.fcidump, scf.txt
 *   fci       fci_roots.csv
 *   ccsd      ccsd_amplitudes.txt, ccsd_log.csv
 *   eomccsd   eom_states.csv, eom_vectors.txt
 *   downfold  effective_hamiltonian.txt, effective_spectrum.csv,
 *             bare_spectrum.csv, downfold_summary.txt
 *   qpe       qpe_table.csv, qpe_histogram.csv, qpe_probabilities.csv
 *   pipeline  manifest.txt
 */

#pragma once

#include "duccex/ccsd.hpp"
#include "duccex/config.hpp"
#include "duccex/eomccsd.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace duccex {

inline const std::vector<std::string> kStages = {"scf",     "fci",      "ccsd",
                                                 "eomccsd", "downfold", "qpe"};

class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error("stage '" + stage + "': " + what), stage_name(stage) {}
  std::string stage_name;
};

struct StageResult {
  std::string name;
  double seconds = 0.0;
  /// Ordered key/value scalars reported in the manifest.
  std::vector<std::pair<std::string, std::string>> scalars;
  std::vector<std::string> files;
};

/// Runs one stage. Throws StageError (wrapping the cause) on failure,
/// including missing prerequisite artifacts.
StageResult run_stage(const std::string& stage, const RunConfig& config);

struct RunManifest {
  std::vector<StageResult> stages;
  std::string text;
};

/// Validates the configuration, runs every stage and writes manifest.txt.
RunManifest run_pipeline(const RunConfig& config);

/// Checks configuration and active list before any computation.
void preflight(const RunConfig& config);

// Artifact I/O shared by stages and tests.
void save_amplitudes(const ClusterAmplitudes& amps, const std::string& path);
[[nodiscard]] ClusterAmplitudes load_amplitudes(const Sector& sector, const std::string& path);
void save_eom_vectors(const std::vector<EomState>& states, const std::string& path);
[[nodiscard]] std::vector<EomState> load_eom_vectors(const std::string& path);

/// Index of the EOM root selected by config (target.root or
/// target.signature). Signature selection skips root 0 and triplet-like
/// roots and picks the largest |weight| on the signature determinant.
[[nodiscard]] std::size_t select_target(const RunConfig& config,
                                        const std::vector<EomState>& states,
                                        const ClusterAmplitudes& amps);

}  // namespace duccex
