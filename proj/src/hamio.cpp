// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/hamio.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace duccex {

void EriTensor::set_symmetric(std::size_t p, std::size_t q, std::size_t r,
                              std::size_t s, double value) noexcept {
  (*this)(p, q, r, s) = value;
  (*this)(q, p, r, s) = value;
  (*this)(p, q, s, r) = value;
  (*this)(q, p, s, r) = value;
  (*this)(r, s, p, q) = value;
  (*this)(s, r, p, q) = value;
  (*this)(r, s, q, p) = value;
  (*this)(s, r, q, p) = value;
}

SpatialIntegrals SpatialIntegrals::zeros(std::size_t n_orb, int n_elec,
                                         int ms2) {
  SpatialIntegrals out;
  out.n_orb = n_orb;
  out.n_elec = n_elec;
  out.ms2 = ms2;
  out.h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_orb),
                                static_cast<Eigen::Index>(n_orb));
  out.eri = EriTensor(n_orb);
  out.orbsym.assign(n_orb, 1);
  return out;
}

void SpatialIntegrals::validate() const {
  const auto n = static_cast<Eigen::Index>(n_orb);
  if (h.rows() != n || h.cols() != n || eri.n() != n_orb)
    throw std::invalid_argument("SpatialIntegrals: inconsistent dimensions");
  if (n_elec < 0 || n_elec > static_cast<int>(2 * n_orb))
    throw std::invalid_argument("SpatialIntegrals: invalid electron count");
  if (std::abs(ms2) > n_elec || (n_elec + ms2) % 2 != 0)
    throw std::invalid_argument("SpatialIntegrals: invalid MS2");
  if (!std::isfinite(e_core) || !h.allFinite())
    throw std::invalid_argument("SpatialIntegrals: non-finite entries");
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < p; ++q)
      if (h(p, q) != h(q, p))
        throw std::invalid_argument("SpatialIntegrals: h is not symmetric");
  for (std::size_t p = 0; p < n_orb; ++p)
    for (std::size_t q = 0; q < n_orb; ++q)
      for (std::size_t r = 0; r < n_orb; ++r)
        for (std::size_t s = 0; s < n_orb; ++s) {
          const double v = eri(p, q, r, s);
          if (!std::isfinite(v))
            throw std::invalid_argument("SpatialIntegrals: non-finite ERI");
          if (v != eri(q, p, r, s) || v != eri(p, q, s, r) ||
              v != eri(r, s, p, q))
            throw std::invalid_argument(
                "SpatialIntegrals: ERI lacks 8-fold symmetry");
        }
}

// ---------------------------------------------------------------------------
// FCIDUMP
// ---------------------------------------------------------------------------

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(c));
  return out;
}

double parse_double(std::string tok) {
  for (auto& c : tok)
    if (c == 'D' || c == 'd') c = 'E';
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw FcidumpError("FCIDUMP: cannot parse number '" + tok + "'");
  return value;
}

long parse_long(const std::string& tok) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw FcidumpError("FCIDUMP: cannot parse integer '" + tok + "'");
  return value;
}

struct Header {
  long norb = -1;
  long nelec = -1;
  long ms2 = 0;
  bool have_ms2 = false;
  std::vector<int> orbsym;
  int isym = 1;
};

Header parse_header(std::string_view text) {
  std::string cleaned;
  {
    std::istringstream lines{std::string(text)};
    for (std::string line; std::getline(lines, line);) {
      const auto b = line.find_first_not_of(" \t");
      if (b != std::string::npos && line[b] == '#') continue;
      cleaned += line + '\n';
    }
  }
  for (auto& c : cleaned)
    if (c == ',' || c == '=') c = ' ';
  std::istringstream in(cleaned);
  std::string tok;
  std::string key;
  Header hdr;
  bool saw_fci = false;
  while (in >> tok) {
    const std::string u = upper(tok);
    if (u == "&FCI" || u == "$FCI") {
      saw_fci = true;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(u[0])) || u[0] == '&') {
      key = u;
      continue;
    }
    if (key.empty()) throw FcidumpError("FCIDUMP: value before any header key");
    const long v = parse_long(tok);
    if (key == "NORB") {
      hdr.norb = v;
    } else if (key == "NELEC") {
      hdr.nelec = v;
    } else if (key == "MS2") {
      hdr.ms2 = v;
      hdr.have_ms2 = true;
    } else if (key == "ORBSYM") {
      hdr.orbsym.push_back(static_cast<int>(v));
    } else if (key == "ISYM") {
      hdr.isym = static_cast<int>(v);
    }
    // Unknown keys (UHF, IUHF, ...) are tolerated and skipped.
  }
  if (!saw_fci) throw FcidumpError("FCIDUMP: missing &FCI header");
  if (hdr.norb <= 0) throw FcidumpError("FCIDUMP: missing or invalid NORB");
  if (hdr.nelec < 0) throw FcidumpError("FCIDUMP: missing or invalid NELEC");
  if (!hdr.orbsym.empty() &&
      hdr.orbsym.size() != static_cast<std::size_t>(hdr.norb))
    throw FcidumpError("FCIDUMP: ORBSYM length differs from NORB");
  return hdr;
}

constexpr double kDuplicateTolerance = 1e-12;

}  // namespace

SpatialIntegrals parse_fcidump(std::string_view text) {
  // Locate the end of the namelist header: "&END" or a lone "/".
  std::size_t body_start = std::string_view::npos;
  std::size_t header_end = std::string_view::npos;
  {
    const std::string u = upper(text);
    const auto amp_end = u.find("&END");
    std::size_t slash = std::string_view::npos;
    std::size_t pos = 0;
    while (pos < u.size()) {
      auto eol = u.find('\n', pos);
      if (eol == std::string::npos) eol = u.size();
      std::string_view line(u.data() + pos, eol - pos);
      auto b = line.find_first_not_of(" \t\r");
      auto e = line.find_last_not_of(" \t\r");
      if (b != std::string_view::npos && line.substr(b, e - b + 1) == "/") {
        slash = pos + b;
        break;
      }
      pos = eol + 1;
    }
    if (amp_end != std::string::npos && (slash == std::string_view::npos ||
                                         amp_end < slash)) {
      header_end = amp_end;
      body_start = amp_end + 4;
    } else if (slash != std::string_view::npos) {
      header_end = slash;
      body_start = slash + 1;
    } else {
      throw FcidumpError("FCIDUMP: header is not terminated by &END or /");
    }
  }
  const Header hdr = parse_header(text.substr(0, header_end));
  const auto n = static_cast<std::size_t>(hdr.norb);
  if (hdr.nelec > static_cast<long>(2 * n))
    throw FcidumpError("FCIDUMP: NELEC exceeds 2*NORB");
  if (hdr.have_ms2 && (std::abs(hdr.ms2) > hdr.nelec ||
                       (hdr.nelec + hdr.ms2) % 2 != 0))
    throw FcidumpError("FCIDUMP: MS2 inconsistent with NELEC");

  SpatialIntegrals out = SpatialIntegrals::zeros(
      n, static_cast<int>(hdr.nelec), static_cast<int>(hdr.ms2));
  if (!hdr.orbsym.empty()) out.orbsym = hdr.orbsym;
  out.isym = hdr.isym;

  std::vector<char> h_set(n * n, 0);
  std::vector<char> eri_set(n * n * n * n, 0);
  bool core_set = false;

  auto check_dup = [](char& flag, double old_value, double value,
                      const char* what) {
    if (flag && std::abs(old_value - value) > kDuplicateTolerance)
      throw FcidumpError(std::string("FCIDUMP: conflicting duplicate ") + what +
                         " entry");
    flag = 1;
  };

  std::istringstream body{std::string(text.substr(body_start))};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(body, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::array<std::string, 5> tok;
    std::size_t count = 0;
    while (count < 5 && ls >> tok[count]) ++count;
    if (count == 0) continue;
    std::string extra;
    if (count != 5 || (ls >> extra))
      throw FcidumpError("FCIDUMP: malformed integral line " +
                         std::to_string(line_no));
    const double value = parse_double(tok[0]);
    if (!std::isfinite(value))
      throw FcidumpError("FCIDUMP: non-finite value on line " +
                         std::to_string(line_no));
    std::array<long, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      idx[k] = parse_long(tok[k + 1]);
      if (idx[k] < 0 || idx[k] > hdr.norb)
        throw FcidumpError("FCIDUMP: index out of range on line " +
                           std::to_string(line_no));
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      char flag = core_set ? 1 : 0;
      check_dup(flag, out.e_core, value, "core-energy");
      core_set = true;
      out.e_core = value;
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      const auto p = static_cast<std::size_t>(i - 1);
      const auto q = static_cast<std::size_t>(j - 1);
      const auto r = static_cast<std::size_t>(k - 1);
      const auto s = static_cast<std::size_t>(l - 1);
      std::size_t a = std::max(p, q), b = std::min(p, q);
      std::size_t c = std::max(r, s), d = std::min(r, s);
      if (a * n + b < c * n + d) {
        std::swap(a, c);
        std::swap(b, d);
      }
      auto& flag = eri_set[((a * n + b) * n + c) * n + d];
      check_dup(flag, out.eri(a, b, c, d), value, "two-electron");
      out.eri.set_symmetric(p, q, r, s, value);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      const auto p = static_cast<std::size_t>(i - 1);
      const auto q = static_cast<std::size_t>(j - 1);
      auto& flag = h_set[std::max(p, q) * n + std::min(p, q)];
      check_dup(flag, out.h(static_cast<Eigen::Index>(p),
                            static_cast<Eigen::Index>(q)),
                value, "one-electron");
      out.h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = value;
      out.h(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p)) = value;
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      // Orbital-energy lines written by some emitters; not part of H.
    } else {
      throw FcidumpError("FCIDUMP: unrecognised index pattern on line " +
                         std::to_string(line_no));
    }
  }
  return out;
}

SpatialIntegrals read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FcidumpError("FCIDUMP: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_fcidump(buf.str());
}

namespace {

constexpr double kEmitThreshold = 1e-14;

void emit_line(std::string& out, double value, std::size_t i, std::size_t j,
               std::size_t k, std::size_t l) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%24.16e %3zu %3zu %3zu %3zu\n", value, i, j,
                k, l);
  out += buf;
}

}  // namespace

std::string emit_fcidump(const SpatialIntegrals& ints) {
  const std::size_t n = ints.n_orb;
  std::string out;
  out += " &FCI NORB=" + std::to_string(n) +
         ",NELEC=" + std::to_string(ints.n_elec) +
         ",MS2=" + std::to_string(ints.ms2) + ",\n  ORBSYM=";
  for (std::size_t p = 0; p < n; ++p) {
    out += std::to_string(p < ints.orbsym.size() ? ints.orbsym[p] : 1);
    out += ',';
  }
  out += "\n  ISYM=" + std::to_string(ints.isym) + ",\n &END\n";

  // Canonical representatives p>=q, r>=s, (pq)>=(rs), descending
  // lexicographic order of (p, q, r, s).
  for (std::size_t p = n; p-- > 0;)
    for (std::size_t q = p + 1; q-- > 0;)
      for (std::size_t r = p + 1; r-- > 0;)
        for (std::size_t s = r + 1; s-- > 0;) {
          if (r == p && s > q) continue;
          const double v = ints.eri(p, q, r, s);
          if (std::abs(v) < kEmitThreshold) continue;
          emit_line(out, v, p + 1, q + 1, r + 1, s + 1);
        }
  for (std::size_t p = n; p-- > 0;)
    for (std::size_t q = p + 1; q-- > 0;) {
      const double v =
          ints.h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
      if (std::abs(v) < kEmitThreshold) continue;
      emit_line(out, v, p + 1, q + 1, 0, 0);
    }
  if (std::abs(ints.e_core) >= kEmitThreshold) emit_line(out, ints.e_core, 0, 0, 0, 0);
  return out;
}

void write_fcidump(const SpatialIntegrals& ints, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write FCIDUMP '" + path + "'");
  out << emit_fcidump(ints);
  if (!out) throw std::runtime_error("error writing FCIDUMP '" + path + "'");
}

// ---------------------------------------------------------------------------
// Spin-orbital Hamiltonian
// ---------------------------------------------------------------------------

SpinOrbitalHamiltonian::SpinOrbitalHamiltonian(SpatialIntegrals ints)
    : ints_(std::make_shared<const SpatialIntegrals>(std::move(ints))) {}

SpinOrbitalHamiltonian to_spin_orbital(SpatialIntegrals ints) {
  return SpinOrbitalHamiltonian(std::move(ints));
}

Eigen::MatrixXd SpinOrbitalHamiltonian::h_matrix() const {
  const auto m = static_cast<Eigen::Index>(n_so());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q)
      out(p, q) = h(static_cast<std::size_t>(p), static_cast<std::size_t>(q));
  return out;
}

std::vector<double> SpinOrbitalHamiltonian::fock_diagonal(
    std::span<const std::size_t> occupied) const {
  std::vector<double> f(n_so());
  for (std::size_t p = 0; p < n_so(); ++p) {
    double acc = h(p, p);
    for (auto i : occupied) acc += v_as(p, i, p, i);
    f[p] = acc;
  }
  return f;
}

double aufbau_energy(const SpatialIntegrals& ints) {
  const int na = (ints.n_elec + ints.ms2) / 2;
  const int nb = (ints.n_elec - ints.ms2) / 2;
  auto H = [&](int p) {
    return ints.h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  };
  auto J = [&](int p, int q) {
    return ints.eri(static_cast<std::size_t>(p), static_cast<std::size_t>(p),
                    static_cast<std::size_t>(q), static_cast<std::size_t>(q));
  };
  auto K = [&](int p, int q) {
    return ints.eri(static_cast<std::size_t>(p), static_cast<std::size_t>(q),
                    static_cast<std::size_t>(q), static_cast<std::size_t>(p));
  };
  double e = ints.e_core;
  for (int i = 0; i < na; ++i) e += H(i);
  for (int i = 0; i < nb; ++i) e += H(i);
  double two = 0.0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) two += J(i, j) - K(i, j);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) two += J(i, j) - K(i, j);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) two += 2.0 * J(i, j);
  return e + 0.5 * two;
}

// ---------------------------------------------------------------------------
// Active spaces
// ---------------------------------------------------------------------------

ActiveSpace ActiveSpace::all(std::size_t n_orb) { return first(n_orb); }

ActiveSpace ActiveSpace::first(std::size_t n_active) {
  std::vector<std::size_t> idx(n_active);
  for (std::size_t p = 0; p < n_active; ++p) idx[p] = p;
  return ActiveSpace(std::move(idx));
}

void ActiveSpace::validate(std::size_t n_orb) const {
  std::vector<bool> seen(n_orb, false);
  for (auto p : active_) {
    if (p >= n_orb)
      throw std::out_of_range("active orbital index " + std::to_string(p) +
                              " out of range (n_orb = " +
                              std::to_string(n_orb) + ")");
    if (seen[p])
      throw std::invalid_argument("duplicate active orbital index " +
                                  std::to_string(p));
    seen[p] = true;
  }
}

std::vector<bool> ActiveSpace::classify(std::size_t n_orb) const {
  validate(n_orb);
  std::vector<bool> flags(2 * n_orb, false);
  for (auto p : active_) {
    flags[2 * p] = true;
    flags[2 * p + 1] = true;
  }
  return flags;
}

std::vector<bool> classify_active(const ActiveSpace& active,
                                  std::size_t n_orb) {
  return active.classify(n_orb);
}

bool is_external(std::span<const std::size_t> spin_indices,
                 const std::vector<bool>& active_flags) {
  return std::any_of(spin_indices.begin(), spin_indices.end(),
                     [&](std::size_t s) { return !active_flags.at(s); });
}

}  // namespace duccex
