// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/eomccsd.hpp"
#include "duccex/fci.hpp"
#include "systems.hpp"

#include <doctest.h>

using namespace duccex;

namespace {

struct Solved {
  SpatialIntegrals ints;
  SpinOrbitalHamiltonian ham;
  ClusterAmplitudes cc;
};

Solved solve(const Molecule& mol, const char* basis) {
  auto ints = systems::mo_integrals(mol, basis);
  auto ham = to_spin_orbital(ints);
  auto cc = solve_ccsd(ham, sector_of(ints), {1e-10});
  return {std::move(ints), std::move(ham), std::move(cc)};
}

Eigen::VectorXd full_vector(const EomState& s) {
  Eigen::VectorXd v(s.r.size() + 1);
  v << s.r0, s.r;
  return v;
}

}  // namespace

TEST_CASE("Hbar at T = 0 is the Hamiltonian in the operator basis") {
  auto sys = solve(systems::h4_linear(), "sto-3g");
  sys.cc.t.setZero();
  const auto hbar = build_hbar(sys.cc, sys.ham);
  const auto& m = *hbar.manifold;
  std::vector<Determinant> dets = {m.reference};
  std::vector<int> phases = {1};
  for (const auto& e : m.excitations) {
    dets.push_back(e.det);
    phases.push_back(e.phase);
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < dets.size(); ++x)
    for (std::size_t y = 0; y < dets.size(); ++y) {
      const double h = phases[x] * phases[y] * hamiltonian_element(sys.ham, dets[x], dets[y]);
      worst = std::max(worst, std::abs(hbar.matrix(static_cast<Eigen::Index>(x),
                                                   static_cast<Eigen::Index>(y)) - h));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("Hbar stationarity and reference element") {
  const auto sys = solve(systems::h4_linear(), "sto-3g");
  const auto hbar = build_hbar(sys.cc, sys.ham);
  CHECK(hbar.matrix(0, 0) == doctest::Approx(sys.cc.e_total).epsilon(1e-12));
  CHECK(hbar.e_ccsd == sys.cc.e_total);
  const double col = hbar.matrix.col(0).tail(hbar.matrix.rows() - 1).cwiseAbs().maxCoeff();
  CHECK(col == doctest::Approx(sys.cc.max_residual).epsilon(1e-6));
  CHECK(col < 1e-10);
}

TEST_CASE("two-electron EOMCCSD reproduces the FCI spectrum") {
  for (double r : {1.4008, 10.0}) {
    CAPTURE(r);
    const auto sys = solve(systems::h2(r), "6-31g");
    const auto hbar = build_hbar(sys.cc, sys.ham);
    const auto states = solve_eomccsd(hbar, sys.cc);
    const auto fci = fci_solve(sys.ham, sector_of(sys.ints), 0);
    REQUIRE(states.size() == static_cast<std::size_t>(fci.energies.size()));
    for (std::size_t k = 0; k < states.size(); ++k) {
      CHECK(states[k].energy == doctest::Approx(fci.energies[static_cast<Eigen::Index>(k)]).epsilon(1e-8));
      const auto a = eomccsd_a_vector(states[k], sys.cc);
      const auto psi = a.n * a.psi.coeffs;
      CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
      // Degenerate triplet components can mix; compare against the eigenspace.
      Eigen::VectorXd proj = Eigen::VectorXd::Zero(psi.size());
      for (Eigen::Index j = 0; j < fci.energies.size(); ++j)
        if (std::abs(fci.energies[j] - states[k].energy) < 1e-7) {
          const Eigen::VectorXd v = fci.vectors.col(j);
          proj += v * v.dot(psi);
        }
      CHECK(proj.norm() > 1.0 - 1e-9);
    }
  }
}

TEST_CASE("ground root and eigenvector conventions") {
  const auto sys = solve(systems::h4_linear(), "sto-3g");
  const auto hbar = build_hbar(sys.cc, sys.ham);
  const auto states = solve_eomccsd(hbar, sys.cc);
  REQUIRE(!states.empty());
  CHECK(states[0].energy == doctest::Approx(sys.cc.e_total).epsilon(1e-10));
  CHECK(states[0].r0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(states[0].r.cwiseAbs().maxCoeff() < 1e-8);
  CHECK(states[0].omega == doctest::Approx(0.0).epsilon(1e-10));
  for (const auto& s : states) {
    const Eigen::VectorXd v = full_vector(s);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // Largest component positive; ties go to the lowest index.
    const double big = v.cwiseAbs().maxCoeff();
    Eigen::Index idx = 0;
    while (std::abs(v[idx]) < big * (1.0 - 1e-10)) ++idx;
    CHECK(v[idx] > 0.0);
    CHECK((hbar.matrix * v - s.energy * v).norm() < 1e-8);
    CHECK(s.omega == doctest::Approx(s.energy - sys.cc.e_total).epsilon(1e-12));
    CHECK(s.triplet_like == (std::abs(s.spin_square) > 0.1));
  }
  for (std::size_t k = 1; k < states.size(); ++k) CHECK(states[k].energy >= states[k - 1].energy);
}

TEST_CASE("linear H4/STO-3G: EOMCCSD truncation error against FCI") {
  // Regression values; each FCI partner is taken from the oracle.
  const auto sys = solve(systems::h4_linear(), "sto-3g");
  const auto states = solve_eomccsd(build_hbar(sys.cc, sys.ham), sys.cc, {8});
  const auto fci = fci_solve(sys.ham, sector_of(sys.ints), 8);
  const double eom[] = {-2.151003651728, -1.950709479264, -1.748616857320, -1.682882618351,
                        -1.629919962508};
  const double s2[] = {0.0, 2.0, 2.0, 0.0, 0.0};
  for (std::size_t k = 0; k < 5; ++k) {
    CAPTURE(k);
    CHECK(states[k].energy == doctest::Approx(eom[k]).epsilon(1e-8));
    CHECK(states[k].spin_square == doctest::Approx(s2[k]).epsilon(1e-6));
    const double err = states[k].energy - fci.energies[static_cast<Eigen::Index>(k)];
    CHECK(std::abs(err) < 7e-3);
  }
  // The ground-state error is the CCSD error.
  CHECK(states[0].energy - fci.energies[0] == doctest::Approx(3.488734e-6).epsilon(1e-5));
}

TEST_CASE("EOMCCSD(A) vector") {
  auto sys = solve(systems::h4_linear(), "sto-3g");
  SUBCASE("T = 0 and R = 1 give the reference") {
    auto cc = sys.cc;
    cc.t.setZero();
    const auto a = eomccsd_a_vector(1.0, Eigen::VectorXd::Zero(cc.t.size()), cc);
    CHECK(a.n == 1.0);
    CHECK(a.psi.at(sector_of(sys.ints).reference()) == 1.0);
    CHECK(a.psi.coeffs.cwiseAbs().sum() == 1.0);
  }
  SUBCASE("normalized vector is invariant under scaling of R") {
    const auto states = solve_eomccsd(build_hbar(sys.cc, sys.ham), sys.cc, {6});
    for (const auto& s : states) {
      const auto a = eomccsd_a_vector(s, sys.cc);
      const auto b = eomccsd_a_vector(-2.5 * s.r0, -2.5 * s.r, sys.cc);
      const Eigen::VectorXd x = a.n * a.psi.coeffs, y = b.n * b.psi.coeffs;
      CHECK(std::min((x - y).norm(), (x + y).norm()) < 1e-12);
      CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-10));
      // Projector and direct builder agree.
      const EomAProjector proj(sys.cc);
      const auto c = proj(s.r0, s.r);
      CHECK((c.psi.coeffs - a.psi.coeffs).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
  SUBCASE("zero vector is an error") {
    CHECK_THROWS((void)eomccsd_a_vector(0.0, Eigen::VectorXd::Zero(sys.cc.t.size()), sys.cc));
  }
}

TEST_CASE("state signatures") {
  const auto sys = solve(systems::h2(1.4008), "6-31g");
  const auto states = solve_eomccsd(build_hbar(sys.cc, sys.ham), sys.cc);
  CHECK(format_signature(states[0].signature) == "ref");
  for (const auto& s : states) {
    CHECK(s.signature.size() <= 5);
    for (std::size_t k = 1; k < s.signature.size(); ++k)
      CHECK(std::abs(s.signature[k - 1].coefficient) >= std::abs(s.signature[k].coefficient));
  }
}
