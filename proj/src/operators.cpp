// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/operators.hpp"

#include "duccex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace duccex {

// ---------------------------------------------------------------------------
// Operator terms
// ---------------------------------------------------------------------------

OperatorTerm OperatorTerm::excitation(
    double amplitude, std::initializer_list<std::size_t> create,
    std::initializer_list<std::size_t> annihilate) {
  if (create.size() != annihilate.size() || create.size() > kMaxTermRank)
    throw std::invalid_argument(
        "operator term needs equal creation/annihilation counts <= 4");
  OperatorTerm t;
  t.amplitude = amplitude;
  t.rank = static_cast<std::uint8_t>(create.size());
  std::size_t k = 0;
  for (auto c : create) t.create[k++] = static_cast<std::uint8_t>(c);
  k = 0;
  for (auto a : annihilate) t.annihilate[k++] = static_cast<std::uint8_t>(a);
  return t;
}

std::optional<std::pair<int, Determinant>> OperatorTerm::act(
    Determinant d) const noexcept {
  int parity = 0;
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t p = annihilate[k];
    if (!d.test(p)) return std::nullopt;
    parity += d.count_below(p);
    d.reset(p);
  }
  for (std::size_t k = rank; k-- > 0;) {
    const std::size_t p = create[k];
    if (d.test(p)) return std::nullopt;
    parity += d.count_below(p);
    d.set(p);
  }
  return std::make_pair((parity & 1) ? -1 : 1, d);
}

void ExcitationOperator::add(const OperatorTerm& term) {
  if (!std::isfinite(term.amplitude))
    throw std::invalid_argument("operator amplitude must be finite");
  if (term.rank > kMaxTermRank)
    throw std::invalid_argument("operator rank exceeds 4");
  for (std::size_t x = 0; x < term.rank; ++x) {
    if (term.create[x] >= kMaxSpinOrbitals || term.annihilate[x] >= kMaxSpinOrbitals)
      throw std::invalid_argument("operator index out of range");
    for (std::size_t y = x + 1; y < term.rank; ++y)
      if (term.create[x] == term.create[y] ||
          term.annihilate[x] == term.annihilate[y])
        throw std::invalid_argument("repeated index within an operator term");
    for (std::size_t y = 0; y < term.rank; ++y)
      if (term.create[x] == term.annihilate[y])
        throw std::invalid_argument("repeated index within an operator term");
  }
  terms_.push_back(term);
}

ExcitationOperator ExcitationOperator::adjoint() const {
  ExcitationOperator out;
  out.terms_.reserve(terms_.size());
  for (const auto& t : terms_) out.terms_.push_back(t.adjoint());
  return out;
}

ExcitationOperator ExcitationOperator::anti_hermitian() const {
  ExcitationOperator out = *this;
  out.terms_.reserve(2 * terms_.size());
  for (const auto& t : terms_) {
    auto a = t.adjoint();
    a.amplitude = -a.amplitude;
    out.terms_.push_back(a);
  }
  return out;
}

ExcitationOperator ExcitationOperator::scaled(double factor) const {
  ExcitationOperator out = *this;
  for (auto& t : out.terms_) t.amplitude *= factor;
  return out;
}

ExcitationOperator ExcitationOperator::operator+(
    const ExcitationOperator& o) const {
  ExcitationOperator out = *this;
  out.terms_.insert(out.terms_.end(), o.terms_.begin(), o.terms_.end());
  return out;
}

bool ExcitationOperator::is_pure_excitation(const Determinant& reference) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const OperatorTerm& t) {
    for (std::size_t k = 0; k < t.rank; ++k)
      if (!reference.test(t.annihilate[k]) || reference.test(t.create[k]))
        return false;
    return true;
  });
}

// ---------------------------------------------------------------------------
// Application kernels
// ---------------------------------------------------------------------------

namespace {

void require_same_sector(const WavefunctionVector& x, const SpacePtr& out) {
  if (!x.space || !out) throw std::invalid_argument("vector without a space");
  if (!(x.space->sector() == out->sector()))
    throw std::invalid_argument("sector mismatch between input and output");
}

std::size_t count_nonzero(const Eigen::VectorXd& v) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) n += (v[i] != 0.0);
  return n;
}

// Sparse inputs are scattered sequentially; dense inputs are gathered in
// parallel. For excitation operators both orders accumulate the
// contributions to each output in term order, so the results are identical.
bool prefer_scatter(std::size_t nnz, std::size_t out_size) {
  return 4 * nnz < out_size;
}

struct OrbitalLists {
  std::array<std::uint8_t, kMaxSpinOrbitals> occ{};
  std::array<std::uint8_t, kMaxSpinOrbitals> vir{};
  int n_occ = 0;
  int n_vir = 0;
};

void split_orbitals(const Determinant& d, std::size_t n_so, OrbitalLists& out) {
  out.n_occ = out.n_vir = 0;
  for (std::size_t s = 0; s < n_so; ++s) {
    if (d.test(s))
      out.occ[static_cast<std::size_t>(out.n_occ++)] = static_cast<std::uint8_t>(s);
    else
      out.vir[static_cast<std::size_t>(out.n_vir++)] = static_cast<std::uint8_t>(s);
  }
}

double diagonal_element(const SpinOrbitalHamiltonian& ham, const OrbitalLists& o) {
  double e = ham.e_core();
  for (int x = 0; x < o.n_occ; ++x) {
    const std::size_t i = o.occ[static_cast<std::size_t>(x)];
    e += ham.h(i, i);
    for (int y = 0; y < x; ++y)
      e += ham.v_as(i, o.occ[static_cast<std::size_t>(y)], i,
                    o.occ[static_cast<std::size_t>(y)]);
  }
  return e;
}

// Enumerates every determinant connected to `d` by a single or double
// excitation together with <d'|H|d>, and the diagonal element.
template <typename Visit>
void for_each_connection(const SpinOrbitalHamiltonian& ham, const Determinant& d,
                         OrbitalLists& o, Visit&& visit) {
  const std::size_t n_so = ham.n_so();
  split_orbitals(d, n_so, o);
  visit(d, diagonal_element(ham, o));

  for (int x = 0; x < o.n_occ; ++x) {
    const std::size_t i = o.occ[static_cast<std::size_t>(x)];
    Determinant di = d;
    di.reset(i);
    const int pi = d.count_below(i);
    for (int u = 0; u < o.n_vir; ++u) {
      const std::size_t a = o.vir[static_cast<std::size_t>(u)];
      if ((i ^ a) & 1U) continue;
      double elem = ham.h(a, i);
      for (int y = 0; y < o.n_occ; ++y) {
        const std::size_t k = o.occ[static_cast<std::size_t>(y)];
        if (k != i) elem += ham.v_as(a, k, i, k);
      }
      Determinant da = di;
      da.set(a);
      const int parity = pi + di.count_below(a);
      visit(da, (parity & 1) ? -elem : elem);
    }
  }

  for (int x = 0; x < o.n_occ; ++x) {
    const std::size_t i = o.occ[static_cast<std::size_t>(x)];
    for (int y = x + 1; y < o.n_occ; ++y) {
      const std::size_t j = o.occ[static_cast<std::size_t>(y)];
      Determinant dij = d;
      dij.reset(i);
      const int p1 = d.count_below(i);
      const int p2 = dij.count_below(j);
      dij.reset(j);
      const unsigned spin_occ = (i & 1U) + (j & 1U);
      for (int u = 0; u < o.n_vir; ++u) {
        const std::size_t a = o.vir[static_cast<std::size_t>(u)];
        for (int w = u + 1; w < o.n_vir; ++w) {
          const std::size_t b = o.vir[static_cast<std::size_t>(w)];
          if ((a & 1U) + (b & 1U) != spin_occ) continue;
          const double g = ham.v_as(a, b, i, j);
          if (g == 0.0) continue;
          Determinant db = dij;
          const int p3 = db.count_below(b);
          db.set(b);
          const int p4 = db.count_below(a);
          db.set(a);
          const int parity = p1 + p2 + p3 + p4;
          visit(db, (parity & 1) ? -g : g);
        }
      }
    }
  }
}

}  // namespace

WavefunctionVector apply_hamiltonian(const SpinOrbitalHamiltonian& ham,
                                     const WavefunctionVector& x,
                                     const SpacePtr& out_space) {
  require_same_sector(x, out_space);
  if (x.space->sector().n_so != ham.n_so())
    throw std::invalid_argument("Hamiltonian and space differ in spin orbitals");
  WavefunctionVector y(out_space);
  const auto& in = *x.space;
  const auto& out = *out_space;
  const std::size_t nnz = count_nonzero(x.coeffs);
  if (prefer_scatter(nnz, out.size())) {
    OrbitalLists o;
    for (std::size_t s = 0; s < in.size(); ++s) {
      const double c = x.coeffs[static_cast<Eigen::Index>(s)];
      if (c == 0.0) continue;
      for_each_connection(ham, in[s], o, [&](const Determinant& t, double elem) {
        if (auto idx = out.find(t))
          y.coeffs[static_cast<Eigen::Index>(*idx)] += elem * c;
      });
    }
    return y;
  }
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    OrbitalLists o;
    for (std::size_t t = begin; t < end; ++t) {
      double acc = 0.0;
      for_each_connection(ham, out[t], o, [&](const Determinant& s, double elem) {
        if (auto idx = in.find(s))
          acc += elem * x.coeffs[static_cast<Eigen::Index>(*idx)];
      });
      y.coeffs[static_cast<Eigen::Index>(t)] = acc;
    }
  });
  return y;
}

WavefunctionVector apply_excitation(const ExcitationOperator& op,
                                    const WavefunctionVector& x,
                                    const SpacePtr& out_space, bool adjoint) {
  require_same_sector(x, out_space);
  WavefunctionVector y(out_space);
  const auto& in = *x.space;
  const auto& out = *out_space;
  std::vector<OperatorTerm> terms = op.terms();
  if (adjoint)
    for (auto& t : terms) t = t.adjoint();

  const std::size_t nnz = count_nonzero(x.coeffs);
  if (prefer_scatter(nnz, out.size())) {
    std::vector<std::size_t> support;
    support.reserve(nnz);
    for (std::size_t s = 0; s < in.size(); ++s)
      if (x.coeffs[static_cast<Eigen::Index>(s)] != 0.0) support.push_back(s);
    for (const auto& term : terms) {
      for (auto s : support) {
        auto r = term.act(in[s]);
        if (!r) continue;
        auto idx = out.find(r->second);
        if (!idx) continue;
        y.coeffs[static_cast<Eigen::Index>(*idx)] +=
            term.amplitude * r->first * x.coeffs[static_cast<Eigen::Index>(s)];
      }
    }
    return y;
  }
  std::vector<OperatorTerm> inverse(terms.size());
  for (std::size_t k = 0; k < terms.size(); ++k) inverse[k] = terms[k].adjoint();
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        auto r = inverse[k].act(out[t]);
        if (!r) continue;
        auto idx = in.find(r->second);
        if (!idx) continue;
        acc += terms[k].amplitude * r->first *
               x.coeffs[static_cast<Eigen::Index>(*idx)];
      }
      y.coeffs[static_cast<Eigen::Index>(t)] = acc;
    }
  });
  return y;
}

WavefunctionVector exp_apply(const ExcitationOperator& op,
                             const WavefunctionVector& x, int sign) {
  constexpr int kMaxTerms = 40;
  constexpr double kRelTol = 1e-14;
  WavefunctionVector result = x;
  WavefunctionVector term = x;
  if (op.empty()) return result;
  const double s = sign >= 0 ? 1.0 : -1.0;
  double last = x.norm();
  for (int k = 1; k <= kMaxTerms; ++k) {
    term = apply_excitation(op, term, x.space);
    term.coeffs *= s / static_cast<double>(k);
    last = term.norm();
    if (last == 0.0) return result;
    result.coeffs += term.coeffs;
    if (last < kRelTol * result.norm()) return result;
  }
  throw SeriesNotConverged(
      "exponential series did not converge within 40 terms (last term norm " +
          std::to_string(last) + ")",
      last);
}

Eigen::MatrixXd dense_matrix(const VectorMap& op, const SpacePtr& space,
                             std::size_t guard) {
  const std::size_t n = space->size();
  if (n > guard)
    throw std::length_error("dense matrix of dimension " + std::to_string(n) +
                            " exceeds the guard " + std::to_string(guard));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
          auto col = op(WavefunctionVector::basis(space, (*space)[j]));
          if (col.space != space) col = project(col, space);
          m.col(static_cast<Eigen::Index>(j)) = col.coeffs;
        }
      },
      8);
  return m;
}

Eigen::MatrixXd hamiltonian_matrix(const SpinOrbitalHamiltonian& ham,
                                   const SpacePtr& space, std::size_t guard) {
  const std::size_t n = space->size();
  if (n > guard)
    throw std::length_error("dense Hamiltonian of dimension " +
                            std::to_string(n) + " exceeds the guard " +
                            std::to_string(guard));
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        OrbitalLists o;
        for (std::size_t j = begin; j < end; ++j)
          for_each_connection(ham, (*space)[j], o,
                              [&](const Determinant& t, double elem) {
                                if (auto idx = space->find(t))
                                  m(static_cast<Eigen::Index>(*idx),
                                    static_cast<Eigen::Index>(j)) += elem;
                              });
      },
      8);
  return m;
}

double hamiltonian_element(const SpinOrbitalHamiltonian& ham,
                           const Determinant& bra, const Determinant& ket) {
  const Determinant diff = bra ^ ket;
  if (diff.count() > 4 || bra.count() != ket.count()) return 0.0;
  OrbitalLists o;
  double result = 0.0;
  for_each_connection(ham, ket, o, [&](const Determinant& t, double elem) {
    if (t == bra) result += elem;
  });
  return result;
}

double spin_square(const WavefunctionVector& x) {
  const auto& space = *x.space;
  const double sz = 0.5 * space.sector().ms2;
  const double norm2 = x.coeffs.squaredNorm();
  if (norm2 == 0.0) throw std::invalid_argument("spin_square of a zero vector");
  std::unordered_map<Determinant, double, DeterminantHash> raised;
  const std::size_t n_orb = space.sector().n_so / 2;
  for (std::size_t k = 0; k < space.size(); ++k) {
    const double c = x.coeffs[static_cast<Eigen::Index>(k)];
    if (c == 0.0) continue;
    for (std::size_t p = 0; p < n_orb; ++p) {
      // S+ contribution a+_{p alpha} a_{p beta}.
      const auto term = OperatorTerm::excitation(1.0, {2 * p}, {2 * p + 1});
      if (auto r = term.act(space[k])) raised[r->second] += r->first * c;
    }
  }
  std::vector<std::pair<Determinant, double>> sorted(raised.begin(), raised.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double s_minus_s_plus = 0.0;
  for (const auto& [d, c] : sorted) s_minus_s_plus += c * c;
  return s_minus_s_plus / norm2 + sz * sz + sz;
}

}  // namespace duccex
