// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace duccex {

std::vector<std::size_t> Determinant::occupied() const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(count()));
  for (std::uint64_t w = lo; w; w &= w - 1)
    out.push_back(static_cast<std::size_t>(std::countr_zero(w)));
  for (std::uint64_t w = hi; w; w &= w - 1)
    out.push_back(64 + static_cast<std::size_t>(std::countr_zero(w)));
  return out;
}

std::string Determinant::to_string(std::size_t n_so) const {
  std::string s(n_so, '0');
  for (std::size_t i = 0; i < n_so; ++i)
    if (test(i)) s[i] = '1';
  return s;
}

int Determinant::ms2() const noexcept {
  constexpr std::uint64_t kEven = 0x5555555555555555ULL;
  const int na = std::popcount(lo & kEven) + std::popcount(hi & kEven);
  return na - (count() - na);
}

bool Sector::achievable() const noexcept {
  if (n_so % 2 != 0 || n_so > kMaxSpinOrbitals) return false;
  if (n_elec < 0 || (n_elec + ms2) % 2 != 0) return false;
  const int n_orb = static_cast<int>(n_so / 2);
  return n_alpha() >= 0 && n_beta() >= 0 && n_alpha() <= n_orb &&
         n_beta() <= n_orb;
}

Determinant Sector::reference() const {
  Determinant d;
  for (int p = 0; p < n_alpha(); ++p) d.set(2 * static_cast<std::size_t>(p));
  for (int p = 0; p < n_beta(); ++p) d.set(2 * static_cast<std::size_t>(p) + 1);
  return d;
}

Sector sector_of(const SpatialIntegrals& ints) {
  return Sector{2 * ints.n_orb, ints.n_elec, ints.ms2};
}

DeterminantSpace::DeterminantSpace(Sector sector, std::vector<Determinant> dets,
                                   Restriction restriction,
                                   Determinant reference,
                                   std::optional<ActiveSpace> active)
    : sector_(sector),
      dets_(std::move(dets)),
      restriction_(restriction),
      reference_(reference),
      active_(std::move(active)) {
  std::sort(dets_.begin(), dets_.end());
  dets_.erase(std::unique(dets_.begin(), dets_.end()), dets_.end());
  index_.reserve(dets_.size());
  for (std::size_t i = 0; i < dets_.size(); ++i) index_.emplace(dets_[i], i);
}

std::optional<std::size_t> DeterminantSpace::find(const Determinant& d) const {
  auto it = index_.find(d);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// All k-subsets of `orbitals`, as lists of chosen orbitals.
void combinations(const std::vector<std::size_t>& orbitals, int k,
                  const std::function<void(const std::vector<std::size_t>&)>& emit) {
  const int n = static_cast<int>(orbitals.size());
  if (k < 0 || k > n) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<std::size_t> chosen(static_cast<std::size_t>(k));
  while (true) {
    for (int i = 0; i < k; ++i)
      chosen[static_cast<std::size_t>(i)] =
          orbitals[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    emit(chosen);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::vector<Determinant> product_space(const std::vector<std::size_t>& orbitals,
                                       int n_alpha, int n_beta,
                                       Determinant frozen) {
  std::vector<Determinant> alpha, beta;
  combinations(orbitals, n_alpha, [&](const std::vector<std::size_t>& c) {
    Determinant d;
    for (auto p : c) d.set(2 * p);
    alpha.push_back(d);
  });
  combinations(orbitals, n_beta, [&](const std::vector<std::size_t>& c) {
    Determinant d;
    for (auto p : c) d.set(2 * p + 1);
    beta.push_back(d);
  });
  std::vector<Determinant> out;
  out.reserve(alpha.size() * beta.size());
  for (const auto& a : alpha)
    for (const auto& b : beta) out.push_back(a | b | frozen);
  return out;
}

}  // namespace

SpacePtr enumerate_full(const Sector& sector) {
  if (sector.n_so > kMaxSpinOrbitals)
    throw std::invalid_argument("sector exceeds 128 spin orbitals");
  if (!sector.achievable())
    return std::make_shared<DeterminantSpace>(sector, std::vector<Determinant>{},
                                              Restriction::Full, Determinant{});
  std::vector<std::size_t> orbitals(sector.n_so / 2);
  for (std::size_t p = 0; p < orbitals.size(); ++p) orbitals[p] = p;
  return std::make_shared<DeterminantSpace>(
      sector, product_space(orbitals, sector.n_alpha(), sector.n_beta(), {}),
      Restriction::Full, sector.reference());
}

SpacePtr enumerate_cas(const Sector& sector, const ActiveSpace& active) {
  if (!sector.achievable())
    throw std::invalid_argument("CAS requested for an impossible sector");
  const std::size_t n_orb = sector.n_so / 2;
  const auto flags = active.classify(n_orb);
  const Determinant ref = sector.reference();
  Determinant frozen;
  int frozen_alpha = 0, frozen_beta = 0;
  for (std::size_t s = 0; s < sector.n_so; ++s) {
    if (!flags[s] && ref.test(s)) {
      frozen.set(s);
      (s % 2 == 0 ? frozen_alpha : frozen_beta)++;
    }
  }
  std::vector<std::size_t> orbitals = active.spatial();
  std::sort(orbitals.begin(), orbitals.end());
  const int na = sector.n_alpha() - frozen_alpha;
  const int nb = sector.n_beta() - frozen_beta;
  if (na > static_cast<int>(orbitals.size()) ||
      nb > static_cast<int>(orbitals.size()))
    throw std::invalid_argument("reference is not representable in the CAS");
  return std::make_shared<DeterminantSpace>(
      sector, product_space(orbitals, na, nb, frozen), Restriction::Cas, ref,
      active);
}

SpacePtr enumerate_sd(const Sector& sector) {
  if (!sector.achievable())
    throw std::invalid_argument("SD space requested for an impossible sector");
  const Determinant ref = sector.reference();
  std::vector<std::size_t> occ, vir;
  for (std::size_t s = 0; s < sector.n_so; ++s)
    (ref.test(s) ? occ : vir).push_back(s);
  std::vector<Determinant> dets{ref};
  for (auto i : occ)
    for (auto a : vir) {
      if ((i ^ a) & 1U) continue;
      Determinant d = ref;
      d.reset(i);
      d.set(a);
      dets.push_back(d);
    }
  for (std::size_t x = 0; x < occ.size(); ++x)
    for (std::size_t y = x + 1; y < occ.size(); ++y)
      for (std::size_t u = 0; u < vir.size(); ++u)
        for (std::size_t w = u + 1; w < vir.size(); ++w) {
          const auto i = occ[x], j = occ[y], a = vir[u], b = vir[w];
          if ((i & 1U) + (j & 1U) != (a & 1U) + (b & 1U)) continue;
          Determinant d = ref;
          d.reset(i);
          d.reset(j);
          d.set(a);
          d.set(b);
          dets.push_back(d);
        }
  return std::make_shared<DeterminantSpace>(sector, std::move(dets),
                                            Restriction::SinglesDoubles, ref);
}

WavefunctionVector WavefunctionVector::basis(SpacePtr s, const Determinant& d) {
  WavefunctionVector v(std::move(s));
  auto idx = v.space->find(d);
  if (!idx) throw std::invalid_argument("determinant not in space");
  v.coeffs[static_cast<Eigen::Index>(*idx)] = 1.0;
  return v;
}

double WavefunctionVector::at(const Determinant& d) const {
  auto idx = space->find(d);
  return idx ? coeffs[static_cast<Eigen::Index>(*idx)] : 0.0;
}

WavefunctionVector project(const WavefunctionVector& v, const SpacePtr& target) {
  WavefunctionVector out(target);
  if (v.space == target) {
    out.coeffs = v.coeffs;
    return out;
  }
  for (std::size_t i = 0; i < target->size(); ++i)
    out.coeffs[static_cast<Eigen::Index>(i)] = v.at((*target)[i]);
  return out;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  const double big = v.cwiseAbs().maxCoeff();
  if (big == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= big * (1.0 - 1e-10)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

}  // namespace duccex
