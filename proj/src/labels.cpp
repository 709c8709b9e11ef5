// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/labels.hpp"

#include "duccex/operators.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace duccex {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::size_t parse_spin_orbital(std::string_view s, std::string_view whole) {
  s = trim(s);
  if (s.size() < 2) throw LabelError("bad orbital in label '" + std::string(whole) + "'");
  const char spin = s.back();
  if (spin != 'a' && spin != 'b')
    throw LabelError("spin must be 'a' or 'b' in '" + std::string(whole) + "'");
  std::size_t orb = 0;
  const auto digits = s.substr(0, s.size() - 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), orb);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || orb == 0)
    throw LabelError("bad orbital index in '" + std::string(whole) + "'");
  const std::size_t s_index = 2 * (orb - 1) + (spin == 'b' ? 1 : 0);
  if (s_index >= kMaxSpinOrbitals)
    throw LabelError("orbital index too large in '" + std::string(whole) + "'");
  return s_index;
}

}  // namespace

std::string spin_orbital_name(std::size_t s) {
  return std::to_string(s / 2 + 1) + ((s & 1U) ? "b" : "a");
}

ExcitationPairs parse_label(std::string_view text) {
  const auto body = trim(text);
  if (body == "ref") return {};
  if (body.empty()) throw LabelError("empty determinant label");
  ExcitationPairs pairs;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto comma = body.find(',', start);
    const auto piece = body.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start);
    const auto arrow = piece.find("->");
    if (arrow == std::string_view::npos)
      throw LabelError("missing '->' in label '" + std::string(body) + "'");
    const auto occ = parse_spin_orbital(piece.substr(0, arrow), body);
    const auto vir = parse_spin_orbital(piece.substr(arrow + 2), body);
    if ((occ ^ vir) & 1U)
      throw LabelError("spin flip in label '" + std::string(body) + "'");
    pairs.emplace_back(occ, vir);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return pairs;
}

std::pair<int, Determinant> resolve_label(const ExcitationPairs& pairs,
                                          const Determinant& reference) {
  int phase = 1;
  Determinant d = reference;
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
    const auto term = OperatorTerm::excitation(1.0, {it->second}, {it->first});
    auto r = term.act(d);
    if (!r)
      throw LabelError("excitation " + spin_orbital_name(it->first) + "->" +
                       spin_orbital_name(it->second) + " is not allowed here");
    phase *= r->first;
    d = r->second;
  }
  return {phase, d};
}

std::pair<int, std::string> label_of(const Determinant& det,
                                     const Determinant& reference) {
  if (det == reference) return {1, "ref"};
  const Determinant holes = reference & (det ^ reference);
  const Determinant parts = det & (det ^ reference);
  ExcitationPairs pairs;
  for (unsigned spin = 0; spin < 2; ++spin) {
    std::vector<std::size_t> h, p;
    for (auto s : holes.occupied())
      if ((s & 1U) == spin) h.push_back(s);
    for (auto s : parts.occupied())
      if ((s & 1U) == spin) p.push_back(s);
    if (h.size() != p.size())
      throw LabelError("determinant changes Sz relative to the reference");
    for (std::size_t k = 0; k < h.size(); ++k) pairs.emplace_back(h[k], p[k]);
  }
  std::sort(pairs.begin(), pairs.end());
  std::string text;
  for (const auto& [i, a] : pairs) {
    if (!text.empty()) text += ',';
    text += spin_orbital_name(i) + "->" + spin_orbital_name(a);
  }
  const auto [phase, d] = resolve_label(pairs, reference);
  (void)d;
  return {phase, text};
}

}  // namespace duccex
