// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/downfold.hpp"

#include "duccex/labels.hpp"
#include "duccex/operators.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace duccex {

SigmaExt extract_sigma_ext(double r0, const Eigen::VectorXd& r, double n_k_a,
                           const ClusterAmplitudes& amplitudes,
                           const ActiveSpace& active) {
  const auto& m = *amplitudes.manifold;
  const auto& full = amplitudes.full_space;
  const std::size_t n_orb = m.sector.n_so / 2;
  active.validate(n_orb);
  const auto flags = classify_active(active, n_orb);

  const auto phi = WavefunctionVector::basis(full, m.reference);
  const auto t1_phi = apply_excitation(amplitudes.t1_operator(), phi, full);
  const auto t2_phi = apply_excitation(amplitudes.t2_operator(), phi, full);
  const auto t1t1_phi = apply_excitation(amplitudes.t1_operator(), t1_phi, full);
  const auto r1_t1_phi = apply_excitation(m.singles_operator(r), t1_phi, full);
  const auto r2_phi = apply_excitation(m.doubles_operator(r), phi, full);
  Eigen::VectorXd x =
      r0 * (t2_phi.coeffs + 0.5 * t1t1_phi.coeffs) + r1_t1_phi.coeffs + r2_phi.coeffs;
  const WavefunctionVector composite(full, std::move(x));

  SigmaExt out;
  out.n_k_a = n_k_a;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& e = m.excitations[k];
    std::array<std::size_t, 4> idx{e.occ[0], e.vir[0], e.occ[1], e.vir[1]};
    if (!is_external(std::span<const std::size_t>(idx.data(), 2 * e.rank), flags))
      continue;
    const auto kk = static_cast<Eigen::Index>(k);
    if (e.rank == 1) {
      const double amp = n_k_a * (r0 * amplitudes.t[kk] + r[kk]);
      if (amp != 0.0) out.s1.add(e.term(amp));
    } else {
      const double amp = n_k_a * e.phase * composite.at(e.det);
      if (amp != 0.0) out.s2.add(e.term(amp));
    }
  }
  return out;
}

EffectiveHamiltonian build_effective(const SpinOrbitalHamiltonian& ham,
                                     const ExcitationOperator& sigma,
                                     const ActiveSpace& active, const Sector& sector) {
  active.validate(ham.n_orb());
  if (sector.n_so != ham.n_so())
    throw std::invalid_argument("sector does not match the Hamiltonian");
  EffectiveHamiltonian eff;
  eff.active = active;
  eff.space = enumerate_cas(sector, active);
  const auto& cas = eff.space;
  const auto n = static_cast<Eigen::Index>(cas->size());
  if (sigma.empty()) {
    eff.matrix = hamiltonian_matrix(ham, cas);
    eff.commutator_order = 0;
    return eff;
  }
  eff.commutator_order = 1;
  const auto full = enumerate_full(sector);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto e_j = WavefunctionVector::basis(full, (*cas)[static_cast<std::size_t>(j)]);
    const auto h_j = apply_hamiltonian(ham, e_j, full);
    const auto s_j = apply_excitation(sigma, e_j, full);
    const auto hs_j = apply_hamiltonian(ham, s_j, cas);
    const auto sh_j = apply_excitation(sigma, h_j, cas);
    m.col(j) = project(h_j, cas).coeffs + hs_j.coeffs - sh_j.coeffs;
  }
  eff.asymmetry = n > 0 ? (m - m.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (eff.asymmetry > kAsymmetryLimit)
    throw std::runtime_error("effective Hamiltonian asymmetry " +
                             std::to_string(eff.asymmetry) +
                             " exceeds tolerance; generator is not anti-Hermitian");
  eff.matrix = 0.5 * (m + m.transpose());
  return eff;
}

EffectiveHamiltonian build_effective(const SpinOrbitalHamiltonian& ham,
                                     const SigmaExt* sigma, const ActiveSpace& active,
                                     const Sector& sector) {
  if (!sigma || sigma->empty())
    return build_effective(ham, ExcitationOperator{}, active, sector);
  auto eff = build_effective(ham, sigma->sigma(), active, sector);
  eff.state = static_cast<long>(sigma->state);
  return eff;
}

EffectiveSpectrum diagonalize_effective(const EffectiveHamiltonian& eff,
                                        std::size_t n_roots, std::size_t signature_size) {
  EffectiveSpectrum out;
  out.pairs = eig_sym(eff.matrix, n_roots);
  for (Eigen::Index k = 0; k < out.pairs.values.size(); ++k)
    out.signatures.push_back(dominant_determinants(
        WavefunctionVector(eff.space, out.pairs.vectors.col(k)), eff.space->reference(),
        signature_size));
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_effective(const EffectiveHamiltonian& eff) {
  const auto& sector = eff.space->sector();
  std::ostringstream os;
  os << "duccex-effective-hamiltonian 1\n";
  os << "n_so " << sector.n_so << "\n";
  os << "n_elec " << sector.n_elec << "\n";
  os << "ms2 " << sector.ms2 << "\n";
  os << "active";
  for (auto p : eff.active.spatial()) os << ' ' << p;
  os << "\n";
  os << "state " << eff.state << "\n";
  os << "commutator_order " << eff.commutator_order << "\n";
  os << "e_ccsd " << fmt(eff.e_ccsd) << "\n";
  os << "e_state " << fmt(eff.e_state) << "\n";
  os << "asymmetry " << fmt(eff.asymmetry) << "\n";
  os << "dimension " << eff.space->size() << "\n";
  os << "determinants\n";
  for (const auto& d : eff.space->determinants())
    os << d.to_string(sector.n_so) << ' ' << label_of(d, eff.space->reference()).second
       << "\n";
  os << "matrix\n";
  for (Eigen::Index i = 0; i < eff.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < eff.matrix.cols(); ++j)
      os << (j ? " " : "") << fmt(eff.matrix(i, j));
    os << "\n";
  }
  return os.str();
}

void export_effective(const EffectiveHamiltonian& eff, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << format_effective(eff);
  if (!f) throw std::runtime_error("write failed for " + path);
}

EffectiveHamiltonian parse_effective(const std::string& text) {
  std::istringstream in(text);
  std::string line, key;
  auto fail = [](const std::string& msg) {
    throw std::runtime_error("effective Hamiltonian file: " + msg);
  };
  if (!std::getline(in, line) || line.rfind("duccex-effective-hamiltonian", 0) != 0)
    fail("missing magic line");
  EffectiveHamiltonian eff;
  Sector sector;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    if (!(ls >> key)) continue;
    if (key == "determinants") break;
    if (key == "n_so") ls >> sector.n_so;
    else if (key == "n_elec") ls >> sector.n_elec;
    else if (key == "ms2") ls >> sector.ms2;
    else if (key == "active") {
      std::vector<std::size_t> a;
      for (std::size_t p; ls >> p;) a.push_back(p);
      eff.active = ActiveSpace(std::move(a));
    } else if (key == "state") ls >> eff.state;
    else if (key == "commutator_order") ls >> eff.commutator_order;
    else if (key == "e_ccsd") eff.e_ccsd = std::stod(line.substr(line.find(' ') + 1));
    else if (key == "e_state") eff.e_state = std::stod(line.substr(line.find(' ') + 1));
    else if (key == "asymmetry") eff.asymmetry = std::stod(line.substr(line.find(' ') + 1));
    else if (key == "dimension") ls >> dim;
    else fail("unknown key '" + key + "'");
  }
  std::vector<Determinant> dets;
  for (std::size_t k = 0; k < dim; ++k) {
    if (!std::getline(in, line)) fail("truncated determinant list");
    std::istringstream ls(line);
    std::string bits;
    ls >> bits;
    if (bits.size() != sector.n_so) fail("bad occupation string");
    Determinant d;
    for (std::size_t s = 0; s < bits.size(); ++s)
      if (bits[s] == '1') d.set(s);
    dets.push_back(d);
  }
  if (!std::getline(in, line) || line != "matrix") fail("missing matrix section");
  eff.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    if (!std::getline(in, line)) fail("truncated matrix");
    std::istringstream ls(line);
    for (std::size_t j = 0; j < dim; ++j) {
      std::string tok;
      if (!(ls >> tok)) fail("short matrix row");
      eff.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::stod(tok);
    }
  }
  const std::size_t n_dets = dets.size();
  eff.space = std::make_shared<DeterminantSpace>(sector, std::move(dets), Restriction::Cas,
                                                 sector.reference(), eff.active);
  if (eff.space->size() != n_dets) fail("duplicate determinants");
  return eff;
}

EffectiveHamiltonian import_effective(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_effective(ss.str());
}

}  // namespace duccex
