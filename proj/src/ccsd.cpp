// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/ccsd.hpp"

#include "duccex/diis.hpp"

#include <cmath>

namespace duccex {

OperatorTerm Excitation::term(double amplitude) const {
  if (rank == 1) return OperatorTerm::excitation(amplitude, {vir[0]}, {occ[0]});
  return OperatorTerm::excitation(amplitude, {vir[0], vir[1]}, {occ[0], occ[1]});
}

ExcitationOperator ExcitationManifold::to_operator(const Eigen::VectorXd& amps) const {
  ExcitationOperator op;
  for (std::size_t k = 0; k < size(); ++k) {
    const double a = amps[static_cast<Eigen::Index>(k)];
    if (a != 0.0) op.add(excitations[k].term(a));
  }
  return op;
}

ExcitationOperator ExcitationManifold::singles_operator(const Eigen::VectorXd& amps) const {
  ExcitationOperator op;
  for (std::size_t k = 0; k < n_singles; ++k) {
    const double a = amps[static_cast<Eigen::Index>(k)];
    if (a != 0.0) op.add(excitations[k].term(a));
  }
  return op;
}

ExcitationOperator ExcitationManifold::doubles_operator(const Eigen::VectorXd& amps) const {
  ExcitationOperator op;
  for (std::size_t k = n_singles; k < size(); ++k) {
    const double a = amps[static_cast<Eigen::Index>(k)];
    if (a != 0.0) op.add(excitations[k].term(a));
  }
  return op;
}

Eigen::VectorXd ExcitationManifold::project(const WavefunctionVector& w) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k)
    out[static_cast<Eigen::Index>(k)] = excitations[k].phase * w.at(excitations[k].det);
  return out;
}

std::optional<std::size_t> ExcitationManifold::find(const Determinant& d) const {
  auto it = index.find(d);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const ExcitationManifold> build_manifold(const Sector& sector) {
  if (!sector.achievable()) throw std::invalid_argument("impossible sector");
  auto m = std::make_shared<ExcitationManifold>();
  m->sector = sector;
  m->reference = sector.reference();
  for (std::size_t s = 0; s < sector.n_so; ++s)
    (m->reference.test(s) ? m->occupied : m->virtuals).push_back(s);
  auto add = [&](Excitation e) {
    auto r = e.term(1.0).act(m->reference);
    e.det = r->second;
    e.phase = r->first;
    m->index.emplace(e.det, m->excitations.size());
    m->excitations.push_back(e);
  };
  for (auto i : m->occupied)
    for (auto a : m->virtuals) {
      if ((i ^ a) & 1U) continue;
      Excitation e;
      e.rank = 1;
      e.occ = {static_cast<std::uint8_t>(i), 0};
      e.vir = {static_cast<std::uint8_t>(a), 0};
      add(e);
    }
  m->n_singles = m->excitations.size();
  const auto& occ = m->occupied;
  const auto& vir = m->virtuals;
  for (std::size_t x = 0; x < occ.size(); ++x)
    for (std::size_t y = x + 1; y < occ.size(); ++y)
      for (std::size_t u = 0; u < vir.size(); ++u)
        for (std::size_t w = u + 1; w < vir.size(); ++w) {
          if ((occ[x] & 1U) + (occ[y] & 1U) != (vir[u] & 1U) + (vir[w] & 1U)) continue;
          Excitation e;
          e.rank = 2;
          e.occ = {static_cast<std::uint8_t>(occ[x]), static_cast<std::uint8_t>(occ[y])};
          e.vir = {static_cast<std::uint8_t>(vir[u]), static_cast<std::uint8_t>(vir[w])};
          add(e);
        }
  return m;
}

double ClusterAmplitudes::t1(std::size_t i, std::size_t a) const {
  Determinant d = manifold->reference;
  if (!d.test(i) || d.test(a)) return 0.0;
  d.reset(i);
  d.set(a);
  auto k = manifold->find(d);
  return k ? t[static_cast<Eigen::Index>(*k)] : 0.0;
}

double ClusterAmplitudes::t2(std::size_t i, std::size_t j, std::size_t a,
                             std::size_t b) const {
  if (i == j || a == b) return 0.0;
  const auto& ref = manifold->reference;
  if (!ref.test(i) || !ref.test(j) || ref.test(a) || ref.test(b)) return 0.0;
  double sign = 1.0;
  if (i > j) {
    std::swap(i, j);
    sign = -sign;
  }
  if (a > b) {
    std::swap(a, b);
    sign = -sign;
  }
  Determinant d = ref;
  d.reset(i);
  d.reset(j);
  d.set(a);
  d.set(b);
  auto k = manifold->find(d);
  return k ? sign * t[static_cast<Eigen::Index>(*k)] : 0.0;
}

WavefunctionVector similarity_transformed_reference(const SpinOrbitalHamiltonian& ham,
                                                    const ExcitationOperator& t,
                                                    const SpacePtr& full_space) {
  const auto phi = WavefunctionVector::basis(full_space, full_space->reference());
  const auto psi = exp_apply(t, phi, +1);
  const auto hpsi = apply_hamiltonian(ham, psi, full_space);
  return exp_apply(t, hpsi, -1);
}

CcsdResidual ccsd_residual(const SpinOrbitalHamiltonian& ham,
                           const ExcitationManifold& manifold,
                           const SpacePtr& full_space, const Eigen::VectorXd& t,
                           double e_ref) {
  const auto w = similarity_transformed_reference(ham, manifold.to_operator(t), full_space);
  return {manifold.project(w), w.at(manifold.reference) - e_ref};
}

ClusterAmplitudes solve_ccsd(const SpinOrbitalHamiltonian& ham, const Sector& sector,
                             const CcsdOptions& options) {
  if (sector.n_so != ham.n_so())
    throw std::invalid_argument("sector does not match the Hamiltonian");
  ClusterAmplitudes out;
  out.manifold = build_manifold(sector);
  out.full_space = enumerate_full(sector);
  const auto& m = *out.manifold;
  out.e_ref = hamiltonian_element(ham, m.reference, m.reference);

  const auto fock = ham.fock_diagonal(m.occupied);
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::VectorXd denom(n);
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& e = m.excitations[k];
    double d = 0.0;
    for (std::size_t x = 0; x < e.rank; ++x) d += fock[e.vir[x]] - fock[e.occ[x]];
    d += options.level_shift;
    if (std::abs(d) < 1e-8)
      throw CcsdError("near-zero orbital-energy denominator; set a positive level_shift");
    denom[static_cast<Eigen::Index>(k)] = d;
  }

  out.t = Eigen::VectorXd::Zero(n);
  Diis diis(static_cast<std::size_t>(std::max(0, options.diis_depth)));
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const auto res = ccsd_residual(ham, m, out.full_space, out.t, out.e_ref);
    out.max_residual = n > 0 ? res.r.cwiseAbs().maxCoeff() : 0.0;
    out.e_corr = res.e_corr;
    out.iterations = iter;
    out.log.push_back({iter, out.max_residual, res.e_corr});
    if (out.max_residual < options.conv_tol) {
      out.converged = true;
      out.e_total = out.e_ref + out.e_corr;
      return out;
    }
    if (iter == options.max_iter) break;
    Eigen::VectorXd t_next = out.t - res.r.cwiseQuotient(denom);
    if (options.diis_depth > 0) {
      diis.push(t_next, res.r);
      t_next = diis.extrapolate();
    }
    if (!t_next.allFinite()) throw CcsdError("CCSD amplitudes diverged");
    out.t = std::move(t_next);
  }
  throw CcsdError("CCSD did not converge in " + std::to_string(options.max_iter) +
                  " iterations (max residual " + std::to_string(out.max_residual) + ")");
}

}  // namespace duccex
