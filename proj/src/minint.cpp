// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/minint.hpp"

#include "duccex/determinant.hpp"
#include "duccex/diis.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace duccex {

namespace {

constexpr const char* kBuiltinBasis = R"(# Hydrogen s-type basis sets (EMSL / Basis Set Exchange values).
basis sto-3g
H s 3
3.42525091 0.15432897
0.62391373 0.53532814
0.16885540 0.44463454

basis 6-31g
H s 3
18.7311370 0.03349460
2.8253937 0.23472695
0.6401217 0.81375733
H s 1
0.1612778 1.0
)";

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

int element_z(const std::string& symbol) {
  static const char* kSymbols[] = {"h", "he", "li", "be", "b", "c", "n", "o", "f", "ne"};
  const auto s = lower(symbol);
  for (int z = 1; z <= 10; ++z)
    if (s == kSymbols[z - 1]) return z;
  throw std::invalid_argument("unknown element symbol '" + symbol + "'");
}

}  // namespace

int Molecule::n_electrons() const {
  int n = -charge;
  for (const auto& a : atoms) n += a.z;
  return n;
}

double Molecule::nuclear_repulsion() const {
  double e = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      e += atoms[i].z * atoms[j].z / (atoms[i].position - atoms[j].position).norm();
  return e;
}

void Molecule::validate() const {
  if (atoms.empty()) throw std::invalid_argument("molecule has no atoms");
  for (const auto& a : atoms) {
    if (!a.position.allFinite()) throw std::invalid_argument("non-finite atom position");
    if (a.z <= 0) throw std::invalid_argument("nuclear charge must be positive");
  }
  if (n_electrons() < 0) throw std::invalid_argument("negative electron count");
  for (std::size_t i = 0; i < atoms.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if ((atoms[i].position - atoms[j].position).norm() < 1e-8)
        throw std::invalid_argument("coincident nuclei");
}

BasisShell BasisShell::normalized(const Eigen::Vector3d& center,
                                  std::vector<double> exponents,
                                  const std::vector<double>& contraction) {
  if (exponents.empty() || exponents.size() != contraction.size())
    throw std::invalid_argument("shell needs matching exponents and coefficients");
  BasisShell s;
  s.center = center;
  for (double a : exponents) {
    if (!(a > 0.0)) throw std::invalid_argument("shell exponents must be positive");
  }
  s.coefficients.resize(exponents.size());
  for (std::size_t k = 0; k < exponents.size(); ++k)
    s.coefficients[k] =
        contraction[k] * std::pow(2.0 * exponents[k] / std::numbers::pi, 0.75);
  double norm = 0.0;
  for (std::size_t i = 0; i < exponents.size(); ++i)
    for (std::size_t j = 0; j < exponents.size(); ++j)
      norm += s.coefficients[i] * s.coefficients[j] *
              std::pow(std::numbers::pi / (exponents[i] + exponents[j]), 1.5);
  for (auto& c : s.coefficients) c /= std::sqrt(norm);
  s.exponents = std::move(exponents);
  return s;
}

BasisLibrary parse_basis_table(const std::string& text) {
  BasisLibrary lib;
  std::istringstream in(text);
  std::string line;
  ElementBasis* current = nullptr;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("basis table line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first[0] == '#') continue;
    if (lower(first) == "basis") {
      std::string name;
      if (!(ls >> name)) fail("missing basis name");
      current = &lib[lower(name)];
      continue;
    }
    if (!current) fail("shell before any 'basis' line");
    std::string kind;
    int n_prim = 0;
    if (!(ls >> kind >> n_prim) || lower(kind) != "s" || n_prim <= 0)
      fail("expected '<symbol> s <n_primitives>'");
    std::vector<double> exps, coefs;
    for (int k = 0; k < n_prim; ++k) {
      if (!std::getline(in, line)) fail("truncated shell");
      ++line_no;
      std::istringstream ps(line);
      double a = 0, c = 0;
      if (!(ps >> a >> c)) fail("expected '<exponent> <coefficient>'");
      exps.push_back(a);
      coefs.push_back(c);
    }
    (*current)[element_z(first)].emplace_back(std::move(exps), std::move(coefs));
  }
  return lib;
}

const BasisLibrary& builtin_basis_library() {
  static const BasisLibrary lib = parse_basis_table(kBuiltinBasis);
  return lib;
}

std::vector<BasisShell> build_basis(const Molecule& mol, const std::string& name,
                                    const BasisLibrary& library) {
  auto it = library.find(lower(name));
  if (it == library.end()) throw std::invalid_argument("unknown basis '" + name + "'");
  std::vector<BasisShell> shells;
  for (const auto& atom : mol.atoms) {
    auto el = it->second.find(atom.z);
    if (el == it->second.end())
      throw std::invalid_argument("basis '" + name + "' has no entry for Z=" +
                                  std::to_string(atom.z));
    for (const auto& [exps, coefs] : el->second)
      shells.push_back(BasisShell::normalized(atom.position, exps, coefs));
  }
  return shells;
}

double boys_f0(double x) {
  if (x < 1e-8) return 1.0 - x / 3.0 + x * x / 10.0;
  const double r = std::sqrt(x);
  return 0.5 * std::sqrt(std::numbers::pi / x) * std::erf(r);
}

AoIntegrals integrals_s(const Molecule& mol, const std::vector<BasisShell>& shells) {
  const std::size_t n = shells.size();
  const auto ni = static_cast<Eigen::Index>(n);
  AoIntegrals ao;
  ao.overlap = Eigen::MatrixXd::Zero(ni, ni);
  ao.kinetic = Eigen::MatrixXd::Zero(ni, ni);
  ao.nuclear = Eigen::MatrixXd::Zero(ni, ni);
  ao.eri = EriTensor(n);
  ao.e_nuc = mol.nuclear_repulsion();
  const double pi = std::numbers::pi;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const auto& A = shells[i];
      const auto& B = shells[j];
      const double ab2 = (A.center - B.center).squaredNorm();
      double s = 0, t = 0, v = 0;
      for (std::size_t x = 0; x < A.exponents.size(); ++x) {
        for (std::size_t y = 0; y < B.exponents.size(); ++y) {
          const double a = A.exponents[x], b = B.exponents[y];
          const double p = a + b, mu = a * b / p;
          const double cc = A.coefficients[x] * B.coefficients[y];
          const double sab = std::pow(pi / p, 1.5) * std::exp(-mu * ab2);
          s += cc * sab;
          t += cc * mu * (3.0 - 2.0 * mu * ab2) * sab;
          const Eigen::Vector3d P = (a * A.center + b * B.center) / p;
          for (const auto& atom : mol.atoms)
            v -= cc * atom.z * 2.0 * pi / p * std::exp(-mu * ab2) *
                 boys_f0(p * (P - atom.position).squaredNorm());
        }
      }
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      ao.overlap(ii, jj) = ao.overlap(jj, ii) = s;
      ao.kinetic(ii, jj) = ao.kinetic(jj, ii) = t;
      ao.nuclear(ii, jj) = ao.nuclear(jj, ii) = v;
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k <= i; ++k)
        for (std::size_t l = 0; l <= (k == i ? j : k); ++l) {
          const auto &A = shells[i], &B = shells[j], &C = shells[k], &D = shells[l];
          const double ab2 = (A.center - B.center).squaredNorm();
          const double cd2 = (C.center - D.center).squaredNorm();
          double val = 0.0;
          for (std::size_t x = 0; x < A.exponents.size(); ++x)
            for (std::size_t y = 0; y < B.exponents.size(); ++y) {
              const double a = A.exponents[x], b = B.exponents[y];
              const double p = a + b;
              const double kab = std::exp(-a * b / p * ab2);
              const Eigen::Vector3d P = (a * A.center + b * B.center) / p;
              const double cab = A.coefficients[x] * B.coefficients[y];
              for (std::size_t z = 0; z < C.exponents.size(); ++z)
                for (std::size_t w = 0; w < D.exponents.size(); ++w) {
                  const double c = C.exponents[z], d = D.exponents[w];
                  const double q = c + d;
                  const double kcd = std::exp(-c * d / q * cd2);
                  const Eigen::Vector3d Q = (c * C.center + d * D.center) / q;
                  const double rho = p * q / (p + q);
                  val += cab * C.coefficients[z] * D.coefficients[w] * 2.0 *
                         std::pow(pi, 2.5) / (p * q * std::sqrt(p + q)) * kab * kcd *
                         boys_f0(rho * (P - Q).squaredNorm());
                }
            }
          ao.eri.set_symmetric(i, j, k, l, val);
        }
  return ao;
}

namespace {

constexpr double kStabilityThreshold = 1e-6;
constexpr int kMaxStabilityRestarts = 4;

Eigen::MatrixXd fock_matrix(const AoIntegrals& ao, const Eigen::MatrixXd& density) {
  const auto n = static_cast<std::size_t>(density.rows());
  Eigen::MatrixXd f = ao.kinetic + ao.nuclear;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t v = 0; v < n; ++v) {
      double g = 0.0;
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t s = 0; s < n; ++s)
          g += density(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(s)) *
               (ao.eri(m, v, l, s) - 0.5 * ao.eri(m, l, v, s));
      f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(v)) += g;
    }
  return f;
}

}  // namespace

ScfResult rhf(const Molecule& mol, const AoIntegrals& ao, const ScfOptions& options) {
  mol.validate();
  const int n_elec = mol.n_electrons();
  if (n_elec % 2 != 0)
    throw std::invalid_argument("RHF requires an even electron count (got " +
                                std::to_string(n_elec) + ")");
  const Eigen::Index n = ao.overlap.rows();
  const Eigen::Index n_occ = n_elec / 2;
  if (n_occ > n) throw std::invalid_argument("more electron pairs than basis functions");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s_eig(ao.overlap);
  if (s_eig.eigenvalues().minCoeff() < 1e-10)
    throw std::runtime_error("AO overlap matrix is numerically singular");
  const Eigen::MatrixXd x = s_eig.eigenvectors() *
                            s_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            s_eig.eigenvectors().transpose();
  const Eigen::MatrixXd hcore = ao.kinetic + ao.nuclear;

  ScfResult res;
  res.n_elec = n_elec;
  auto diagonalize = [&](const Eigen::MatrixXd& f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * f * x);
    res.orbital_energies = es.eigenvalues();
    res.coefficients = x * es.eigenvectors();
    for (Eigen::Index j = 0; j < n; ++j) fix_sign(res.coefficients.col(j));
    const Eigen::MatrixXd c_occ = res.coefficients.leftCols(n_occ);
    res.density = 2.0 * c_occ * c_occ.transpose();
  };

  // Diagonalizes F separately in the occupied and virtual spaces of the
  // current density, so an aufbau-violating stationary point stays put.
  auto canonicalize = [&](const Eigen::MatrixXd& f) {
    Eigen::MatrixXd c = res.coefficients;
    Eigen::VectorXd e(n);
    for (auto [first, count] : {std::pair{Eigen::Index{0}, n_occ}, std::pair{n_occ, n - n_occ}}) {
      if (count == 0) continue;
      const Eigen::MatrixXd block = c.middleCols(first, count);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.transpose() * f * block);
      c.middleCols(first, count) = block * es.eigenvectors();
      e.segment(first, count) = es.eigenvalues();
    }
    for (Eigen::Index j = 0; j < n; ++j) fix_sign(c.col(j));
    res.coefficients = c;
    res.orbital_energies = e;
  };

  // Real RHF -> RHF orbital Hessian in the MO basis at a converged point.
  auto lowest_hessian_mode = [&](Eigen::VectorXd& mode) {
    const Eigen::Index nv = n - n_occ;
    if (nv == 0) return 0.0;
    const auto mo = mo_transform(res.coefficients, ao, n_elec);
    const auto& e = res.orbital_energies;
    Eigen::MatrixXd hess(n_occ * nv, n_occ * nv);
    auto g = [&](Eigen::Index p, Eigen::Index q, Eigen::Index r, Eigen::Index s) {
      return mo.eri(static_cast<std::size_t>(p), static_cast<std::size_t>(q),
                    static_cast<std::size_t>(r), static_cast<std::size_t>(s));
    };
    for (Eigen::Index i = 0; i < n_occ; ++i)
      for (Eigen::Index a = 0; a < nv; ++a)
        for (Eigen::Index j = 0; j < n_occ; ++j)
          for (Eigen::Index b = 0; b < nv; ++b) {
            const Eigen::Index av = n_occ + a, bv = n_occ + b;
            double v = 4.0 * g(i, av, j, bv) - g(i, bv, j, av) - g(i, j, av, bv);
            if (i == j && a == b) v += e[av] - e[i];
            hess(i * nv + a, j * nv + b) = v;
          }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (hess + hess.transpose()));
    mode = es.eigenvectors().col(0);
    return es.eigenvalues()[0];
  };
  auto rotated_orbitals = [&](const Eigen::VectorXd& mode, double angle) {
    const Eigen::Index nv = n - n_occ;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n_occ; ++i)
      for (Eigen::Index a = 0; a < nv; ++a) {
        k(n_occ + a, i) = angle * mode[i * nv + a];
        k(i, n_occ + a) = -angle * mode[i * nv + a];
      }
    return Eigen::MatrixXd(res.coefficients * k.exp());
  };
  auto density_of = [&](const Eigen::MatrixXd& c) {
    const Eigen::MatrixXd c_occ = c.leftCols(n_occ);
    return Eigen::MatrixXd(2.0 * c_occ * c_occ.transpose());
  };
  auto energy_of = [&](const Eigen::MatrixXd& d) {
    return 0.5 * d.cwiseProduct(hcore + fock_matrix(ao, d)).sum() + ao.e_nuc;
  };

  diagonalize(hcore);
  int total = 0;
  for (int restart = 0;; ++restart) {
    Diis diis(static_cast<std::size_t>(std::max(0, options.diis_depth)));
    bool done = false;
    while (total < options.max_iter) {
      const int iter = ++total;
      const Eigen::MatrixXd f = fock_matrix(ao, res.density);
      res.energy = 0.5 * res.density.cwiseProduct(hcore + f).sum() + ao.e_nuc;
      const Eigen::MatrixXd commutator =
          f * res.density * ao.overlap - ao.overlap * res.density * f;
      res.error = commutator.cwiseAbs().maxCoeff();
      res.iterations = iter;
      if (res.error < options.conv_tol) {
        canonicalize(f);
        done = true;
        break;
      }
      Eigen::MatrixXd f_next = f;
      if (options.diis_depth > 0) {
        const Eigen::MatrixXd err = x.transpose() * commutator * x;
        diis.push(f.reshaped(), err.reshaped());
        f_next = diis.extrapolate().reshaped(n, n);
      }
      diagonalize(f_next);
    }
    if (!done) break;
    Eigen::VectorXd mode;
    if (!options.stability_check || restart >= kMaxStabilityRestarts ||
        lowest_hessian_mode(mode) > -kStabilityThreshold) {
      res.converged = true;
      return res;
    }
    // Follow the unstable mode to the lowest energy on a coarse angle scan.
    double best_e = res.energy, best_angle = 0.0;
    for (int k = 1; k <= 32; ++k) {
      const double angle = k * std::numbers::pi / 64.0;
      const double e = energy_of(density_of(rotated_orbitals(mode, angle)));
      if (e < best_e) {
        best_e = e;
        best_angle = angle;
      }
    }
    if (best_angle == 0.0) {
      res.converged = true;
      return res;
    }
    res.coefficients = rotated_orbitals(mode, best_angle);
    res.density = density_of(res.coefficients);
  }
  throw ScfConvergenceError("RHF did not converge in " + std::to_string(options.max_iter) +
                                " iterations (error " + std::to_string(res.error) + ")",
                            res);
}

ScfResult rhf(const Molecule& mol, const std::vector<BasisShell>& shells,
              const ScfOptions& options) {
  return rhf(mol, integrals_s(mol, shells), options);
}

SpatialIntegrals mo_transform(const Eigen::MatrixXd& c, const AoIntegrals& ao,
                              int n_elec) {
  const auto n_ao = static_cast<std::size_t>(c.rows());
  const auto n = static_cast<std::size_t>(c.cols());
  SpatialIntegrals out = SpatialIntegrals::zeros(n, n_elec, 0);
  out.e_core = ao.e_nuc;
  out.h = c.transpose() * (ao.kinetic + ao.nuclear) * c;
  out.h = 0.5 * (out.h + out.h.transpose()).eval();

  auto at = [](const Eigen::MatrixXd& m, std::size_t i, std::size_t j) {
    return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  // One index at a time: (mu nu|la si) -> (p nu|la si) -> ... -> (pq|rs).
  std::vector<double> a(n * n_ao * n_ao * n_ao, 0.0), b(n * n * n_ao * n_ao, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t mu = 0; mu < n_ao; ++mu) {
      const double cp = at(c, mu, p);
      if (cp == 0.0) continue;
      for (std::size_t nu = 0; nu < n_ao; ++nu)
        for (std::size_t la = 0; la < n_ao; ++la)
          for (std::size_t si = 0; si < n_ao; ++si)
            a[((p * n_ao + nu) * n_ao + la) * n_ao + si] += cp * ao.eri(mu, nu, la, si);
    }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t nu = 0; nu < n_ao; ++nu) {
        const double cq = at(c, nu, q);
        if (cq == 0.0) continue;
        for (std::size_t la = 0; la < n_ao; ++la)
          for (std::size_t si = 0; si < n_ao; ++si)
            b[((p * n + q) * n_ao + la) * n_ao + si] +=
                cq * a[((p * n_ao + nu) * n_ao + la) * n_ao + si];
      }
  a.assign(n * n * n * n_ao, 0.0);
  for (std::size_t pq = 0; pq < n * n; ++pq)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t la = 0; la < n_ao; ++la) {
        const double cr = at(c, la, r);
        if (cr == 0.0) continue;
        for (std::size_t si = 0; si < n_ao; ++si)
          a[(pq * n + r) * n_ao + si] += cr * b[(pq * n_ao + la) * n_ao + si];
      }
  for (std::size_t pqr = 0; pqr < n * n * n; ++pqr)
    for (std::size_t s = 0; s < n; ++s) {
      double v = 0.0;
      for (std::size_t si = 0; si < n_ao; ++si) v += at(c, si, s) * a[pqr * n_ao + si];
      out.eri.raw()[pqr * n + s] = v;
    }
  // Restore exact 8-fold symmetry lost to rounding.
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s <= r; ++s) {
          if (p * n + q < r * n + s) continue;
          const double v = (out.eri(p, q, r, s) + out.eri(q, p, r, s) +
                            out.eri(p, q, s, r) + out.eri(q, p, s, r) +
                            out.eri(r, s, p, q) + out.eri(s, r, p, q) +
                            out.eri(r, s, q, p) + out.eri(s, r, q, p)) / 8.0;
          out.eri.set_symmetric(p, q, r, s, v);
        }
  return out;
}

}  // namespace duccex
