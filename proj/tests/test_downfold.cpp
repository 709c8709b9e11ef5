// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/downfold.hpp"
#include "duccex/fci.hpp"
#include "oracles.hpp"
#include "systems.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace duccex;

namespace {

struct Solved {
  SpatialIntegrals ints;
  SpinOrbitalHamiltonian ham;
  ClusterAmplitudes cc;
  std::vector<EomState> states;
};

Solved solve(const Molecule& mol, const char* basis) {
  auto ints = systems::mo_integrals(mol, basis);
  auto ham = to_spin_orbital(ints);
  auto cc = solve_ccsd(ham, sector_of(ints), {1e-10});
  auto states = solve_eomccsd(build_hbar(cc, ham), cc);
  return {std::move(ints), std::move(ham), std::move(cc), std::move(states)};
}

std::vector<std::uint64_t> masks_of(const DeterminantSpace& s) {
  std::vector<std::uint64_t> out;
  for (const auto& d : s.determinants()) out.push_back(d.lo);
  return out;
}

}  // namespace

TEST_CASE("every orbital active leaves no external generator") {
  const auto sys = solve(systems::h2(1.4008), "6-31g");
  for (const auto& s : sys.states) {
    const auto sigma = extract_sigma_ext(s, sys.cc, ActiveSpace::all(4));
    CHECK(sigma.empty());
    CHECK(sigma.state == s.root);
  }
}

TEST_CASE("T = 0 with a pure single R") {
  auto sys = solve(systems::h4_linear(), "sto-3g");
  sys.cc.t.setZero();
  const auto& m = *sys.cc.manifold;
  const ActiveSpace active({0, 1, 2});
  const auto flags = classify_active(active, 4);
  for (std::size_t k = 0; k < m.n_singles; ++k) {
    const auto& e = m.excitations[k];
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.size()));
    r[static_cast<Eigen::Index>(k)] = 1.0;
    const auto sigma = extract_sigma_ext(0.0, r, 0.7, sys.cc, active);
    CHECK(sigma.s2.empty());
    const bool external = !flags[e.occ[0]] || !flags[e.vir[0]];
    if (!external) {
      CHECK(sigma.s1.empty());
      continue;
    }
    REQUIRE(sigma.s1.size() == 1);
    const auto& t = sigma.s1.terms()[0];
    CHECK(t.amplitude == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(t.create[0] == e.vir[0]);
    CHECK(t.annihilate[0] == e.occ[0]);
  }
}

TEST_CASE("one active orbital: S|Phi> equals the FCI vector outside the reference") {
  // For two electrons N*Psi(A) is the exact eigenvector and every single and
  // double is external, so S|Phi> must rebuild its non-reference part.
  for (const char* basis : {"sto-3g", "6-31g"}) {
    CAPTURE(basis);
    const auto sys = solve(systems::h2(1.4008), basis);
    const auto sector = sector_of(sys.ints);
    const auto fci = fci_solve(sys.ham, sector, 0);
    const auto phi = WavefunctionVector::basis(fci.space, sector.reference());
    for (const auto& s : sys.states) {
      CAPTURE(s.root);
      const auto sigma = extract_sigma_ext(s, sys.cc, ActiveSpace({0}));
      const auto s_phi = apply_excitation(sigma.s1 + sigma.s2, phi, fci.space);
      std::optional<Eigen::Index> match;
      for (Eigen::Index j = 0; j < fci.energies.size(); ++j)
        if (std::abs(fci.energies[j] - s.energy) < 1e-8) match = j;
      REQUIRE(match);
      // Skip degenerate triplet components, whose vectors are not unique.
      if (s.triplet_like) continue;
      Eigen::VectorXd v = fci.vectors.col(*match);
      const auto ref_idx = static_cast<Eigen::Index>(*fci.space->find(sector.reference()));
      const double n_r0 = s.n_k_a * s.r0;
      if (std::abs(v[ref_idx]) > 1e-6) {
        if ((v[ref_idx] > 0) != (n_r0 > 0)) v = -v;
      } else if (v.dot(s_phi.coeffs) < 0) {
        v = -v;
      }
      v[ref_idx] = 0.0;
      CHECK((s_phi.coeffs - v).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("zero generator gives the bare CAS block") {
  const auto ints = systems::mo_integrals(systems::h4_linear(), "6-31g");
  const auto ham = to_spin_orbital(ints);
  const auto sector = sector_of(ints);
  const ActiveSpace active({0, 1, 2, 3});
  const auto bare = build_effective(ham, nullptr, active, sector);
  const auto cas = enumerate_cas(sector, active);
  CHECK(bare.commutator_order == 0);
  CHECK(bare.state == -1);
  CHECK(bare.matrix.rows() == static_cast<Eigen::Index>(cas->size()));
  CHECK(bare.matrix == hamiltonian_matrix(ham, cas));
  SigmaExt empty;
  CHECK(build_effective(ham, &empty, active, sector).matrix == bare.matrix);
  const auto spec = bare_cas_spectrum(ham, active, sector, 0);
  const auto mine = diagonalize_effective(bare);
  CHECK((spec.energies - mine.pairs.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single commutator against dense matrices") {
  const auto ints = oracle::random_integrals(4, 4, 0, 17);
  const auto ham = to_spin_orbital(ints);
  const auto sector = sector_of(ints);
  const ActiveSpace active({1, 2});
  const auto flags = classify_active(active, 4);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  ExcitationOperator s;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t a = 4; a < 8; ++a)
      if (i % 2 == a % 2 && (!flags[i] || !flags[a])) s.add(u(rng), {a}, {i});
  s.add(u(rng), {4, 7}, {0, 3});
  s.add(u(rng), {6, 7}, {0, 1});
  const auto sigma = s.anti_hermitian();
  const auto eff = build_effective(ham, sigma, active, sector);
  CHECK(eff.commutator_order == 1);
  CHECK(eff.asymmetry < 1e-10);
  CHECK(eff.matrix == eff.matrix.transpose());

  const auto full = enumerate_full(sector);
  const auto masks = masks_of(*full);
  const Eigen::MatrixXd h = oracle::hamiltonian(oracle::spin_tensors(ints), masks);
  const Eigen::MatrixXd sg = oracle::operator_matrix(sigma, masks);
  const Eigen::MatrixXd m = h + h * sg - sg * h;
  const auto& cas = *eff.space;
  double worst = 0.0;
  for (std::size_t x = 0; x < cas.size(); ++x)
    for (std::size_t y = 0; y < cas.size(); ++y) {
      const auto fx = static_cast<Eigen::Index>(*full->find(cas[x]));
      const auto fy = static_cast<Eigen::Index>(*full->find(cas[y]));
      worst = std::max(worst, std::abs(eff.matrix(static_cast<Eigen::Index>(x),
                                                  static_cast<Eigen::Index>(y)) - m(fx, fy)));
    }
  CHECK(worst < 1e-12);
  // A generator that is not anti-Hermitian breaks the symmetry.
  CHECK_THROWS_AS((void)build_effective(ham, s, active, sector), std::runtime_error);
}

TEST_CASE("every orbital active reproduces FCI") {
  const auto sys = solve(systems::h2(10.0), "6-31g");
  const auto sector = sector_of(sys.ints);
  const auto fci = fci_solve(sys.ham, sector, 0);
  for (std::size_t k : {1u, 3u}) {
    const auto sigma = extract_sigma_ext(sys.states[k], sys.cc, ActiveSpace::all(4));
    const auto eff = build_effective(sys.ham, &sigma, ActiveSpace::all(4), sector);
    const auto spec = diagonalize_effective(eff);
    CHECK((spec.pairs.values - fci.energies).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("export and import") {
  const auto ints = read_fcidump(std::string(DUCCEX_DATA_DIR) + "/fixtures/h2_ccpvtz_r1.4008.fcidump");
  const auto ham = to_spin_orbital(ints);
  const auto sector = sector_of(ints);
  const auto cc = solve_ccsd(ham, sector);
  const ActiveSpace active = ActiveSpace::first(4);
  // Ground-state generator: R = 1.
  const auto sigma = extract_sigma_ext(1.0, Eigen::VectorXd::Zero(cc.t.size()), 1.0, cc, active);
  REQUIRE(!sigma.empty());
  auto eff = build_effective(ham, &sigma, active, sector);
  eff.e_ccsd = cc.e_total;
  eff.e_state = cc.e_total;
  const auto text = format_effective(eff);

  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  CHECK(lines[0] == "duccex-effective-hamiltonian 1");
  const auto det_at = std::find(lines.begin(), lines.end(), "determinants");
  const auto mat_at = std::find(lines.begin(), lines.end(), "matrix");
  REQUIRE(det_at != lines.end());
  REQUIRE(mat_at != lines.end());
  CHECK(mat_at - det_at - 1 == 16);
  CHECK(lines.end() - mat_at - 1 == 16);

  const auto path = (std::filesystem::temp_directory_path() / "duccex_eff_test.txt").string();
  export_effective(eff, path);
  const auto back = import_effective(path);
  std::filesystem::remove(path);
  CHECK(back.matrix == eff.matrix);
  CHECK(back.space->determinants() == eff.space->determinants());
  CHECK(back.state == eff.state);
  CHECK(back.commutator_order == 1);
  CHECK(back.e_ccsd == eff.e_ccsd);
  CHECK(back.e_state == eff.e_state);
  CHECK(back.asymmetry == eff.asymmetry);
  CHECK(back.active.spatial() == active.spatial());
  CHECK(format_effective(back) == text);
  CHECK_THROWS((void)parse_effective("not a hamiltonian\n"));
}
