// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/eomccsd.hpp"

#include "duccex/eigensolvers.hpp"
#include "duccex/labels.hpp"
#include "duccex/operators.hpp"
#include "duccex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace duccex {

namespace {

// e^{sign * A} for a nilpotent matrix.
Eigen::MatrixXd nilpotent_exp(const Eigen::MatrixXd& a, double sign, int max_power) {
  const auto n = a.rows();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= max_power; ++k) {
    term = (sign / k) * (a * term);
    if (term.cwiseAbs().maxCoeff() == 0.0) break;
    result += term;
  }
  return result;
}

}  // namespace

HbarMatrix build_hbar(const ClusterAmplitudes& amplitudes,
                      const SpinOrbitalHamiltonian& ham) {
  const auto& m = *amplitudes.manifold;
  const auto& full = amplitudes.full_space;
  const std::size_t dim = m.size() + 1;
  if (dim > kHbarGuard)
    throw std::length_error("Hbar dimension " + std::to_string(dim) +
                            " exceeds the dense guard");
  std::vector<Eigen::Index> idx(dim);
  std::vector<double> phase(dim, 1.0);
  idx[0] = static_cast<Eigen::Index>(*full->find(m.reference));
  for (std::size_t k = 0; k < m.size(); ++k) {
    idx[k + 1] = static_cast<Eigen::Index>(*full->find(m.excitations[k].det));
    phase[k + 1] = m.excitations[k].phase;
  }

  HbarMatrix out;
  out.manifold = amplitudes.manifold;
  out.e_ccsd = amplitudes.e_total;
  out.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const auto t_op = amplitudes.t_operator();

  if (full->size() <= kDenseHbarLimit) {
    const Eigen::MatrixXd h = hamiltonian_matrix(ham, full);
    const Eigen::MatrixXd t = dense_matrix(
        [&](const WavefunctionVector& x) { return apply_excitation(t_op, x, full); }, full);
    const int max_power = full->sector().n_elec + 1;
    const Eigen::MatrixXd hbar =
        nilpotent_exp(t, -1.0, max_power) * h * nilpotent_exp(t, 1.0, max_power);
    for (std::size_t b = 0; b < dim; ++b)
      for (std::size_t a = 0; a < dim; ++a)
        out.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            phase[a] * phase[b] * hbar(idx[a], idx[b]);
    return out;
  }

  parallel_for(
      dim,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t b = begin; b < end; ++b) {
          WavefunctionVector v(full);
          v.coeffs[idx[b]] = phase[b];
          const auto w =
              exp_apply(t_op, apply_hamiltonian(ham, exp_apply(t_op, v, +1), full), -1);
          for (std::size_t a = 0; a < dim; ++a)
            out.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                phase[a] * w.coeffs[idx[a]];
        }
      },
      4);
  return out;
}

EomAProjector::EomAProjector(const ClusterAmplitudes& amplitudes)
    : amplitudes_(&amplitudes), sd_space_(enumerate_sd(amplitudes.manifold->sector)) {
  const auto& m = *amplitudes.manifold;
  const auto& full = amplitudes.full_space;
  const auto phi = WavefunctionVector::basis(full, m.reference);
  et_phi_ = exp_apply(amplitudes.t_operator(), phi, +1);
  et_phi_sd_ = project(et_phi_, sd_space_).coeffs;
  if (sd_space_->size() <= kDenseHbarLimit) {
    columns_.resize(static_cast<Eigen::Index>(sd_space_->size()),
                    static_cast<Eigen::Index>(m.size()));
    parallel_for(m.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        ExcitationOperator e;
        e.add(m.excitations[k].term(1.0));
        columns_.col(static_cast<Eigen::Index>(k)) =
            apply_excitation(e, et_phi_, sd_space_).coeffs;
      }
    });
  }
}

EomAVector EomAProjector::operator()(double r0, const Eigen::VectorXd& r) const {
  EomAVector out;
  if (columns_.size() > 0) {
    out.psi = WavefunctionVector(sd_space_, columns_ * r + r0 * et_phi_sd_);
  } else {
    const auto& full = amplitudes_->full_space;
    WavefunctionVector x =
        apply_excitation(amplitudes_->manifold->to_operator(r), et_phi_, full);
    x.coeffs += r0 * et_phi_.coeffs;
    out.psi = project(x, sd_space_);
  }
  const double norm = out.psi.norm();
  if (norm < 1e-12) throw std::runtime_error("EOMCCSD(A) vector has zero norm");
  out.n = 1.0 / norm;
  return out;
}

EomAVector eomccsd_a_vector(double r0, const Eigen::VectorXd& r,
                            const ClusterAmplitudes& amplitudes) {
  return EomAProjector(amplitudes)(r0, r);
}

std::vector<DeterminantWeight> dominant_determinants(const WavefunctionVector& v,
                                                     const Determinant& reference,
                                                     std::size_t count) {
  std::vector<std::size_t> order(v.space->size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(v.coeffs[static_cast<Eigen::Index>(a)]) >
           std::abs(v.coeffs[static_cast<Eigen::Index>(b)]);
  });
  std::vector<DeterminantWeight> out;
  for (std::size_t k = 0; k < std::min(count, order.size()); ++k) {
    const auto& d = (*v.space)[order[k]];
    const double c = v.coeffs[static_cast<Eigen::Index>(order[k])];
    if (c == 0.0) break;
    auto [phase, label] = label_of(d, reference);
    out.push_back({d, label, c * phase});
  }
  return out;
}

std::string format_signature(const std::vector<DeterminantWeight>& w) {
  return w.empty() ? std::string{} : w.front().label;
}

std::vector<EomState> solve_eomccsd(const HbarMatrix& hbar,
                                    const ClusterAmplitudes& amplitudes,
                                    const EomOptions& options) {
  const auto pairs = eig_nonsym(hbar.matrix, options.n_roots);
  const auto& m = *hbar.manifold;
  const EomAProjector projector(amplitudes);
  std::vector<EomState> states;
  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    EomState s;
    s.root = static_cast<std::size_t>(k);
    s.energy = pairs.values[k];
    s.omega = s.energy - hbar.e_ccsd;
    s.r0 = pairs.vectors(0, k);
    s.r = pairs.vectors.col(k).tail(static_cast<Eigen::Index>(m.size()));
    const auto a = projector(s.r0, s.r);
    s.n_k_a = a.n;
    s.spin_square = spin_square(a.psi);
    s.triplet_like = std::abs(s.spin_square) > options.spin_threshold;
    WavefunctionVector normalized = a.psi;
    normalized.coeffs *= a.n;
    s.signature = dominant_determinants(normalized, m.reference, options.signature_size);
    states.push_back(std::move(s));
  }
  return states;
}

}  // namespace duccex
