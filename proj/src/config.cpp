// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace duccex {

namespace {

constexpr double kBohrPerAngstrom = 1.0 / 0.52917721092;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const auto x = to_int(key, v);
  if (x < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(x);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    if (!out.emplace(key, value).second)
      throw ConfigError("config key '" + key + "' given twice");
  }
  return out;
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& base_dir) {
  RunConfig c;
  const auto kv = parse_key_values(text);
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"input.fcidump",
       [&](auto&, auto& v) {
         std::filesystem::path p(v);
         c.fcidump = p.is_absolute() ? v : (std::filesystem::path(base_dir) / p).string();
       }},
      {"input.geometry", [&](auto&, auto& v) { c.geometry = v; }},
      {"input.basis", [&](auto&, auto& v) { c.basis = v; }},
      {"input.units", [&](auto&, auto& v) { c.units = v; }},
      {"input.charge", [&](auto& k, auto& v) { c.charge = static_cast<int>(to_int(k, v)); }},
      {"active.orbitals",
       [&](auto& k, auto& v) {
         if (v == "all") {
           c.active_all = true;
           return;
         }
         std::stringstream ss(v);
         for (std::string item; std::getline(ss, item, ',');)
           c.active.push_back(to_count(k, trim(item)));
       }},
      {"target.root", [&](auto& k, auto& v) { c.target_root = to_count(k, v); }},
      {"target.signature", [&](auto&, auto& v) { c.target_signature = v; }},
      {"downfold.commutator",
       [&](auto& k, auto& v) { c.commutator = static_cast<int>(to_int(k, v)); }},
      {"scf.max_iter", [&](auto& k, auto& v) { c.scf.max_iter = static_cast<int>(to_int(k, v)); }},
      {"scf.conv_tol", [&](auto& k, auto& v) { c.scf.conv_tol = to_double(k, v); }},
      {"scf.diis_depth",
       [&](auto& k, auto& v) { c.scf.diis_depth = static_cast<int>(to_int(k, v)); }},
      {"ccsd.conv_tol", [&](auto& k, auto& v) { c.ccsd.conv_tol = to_double(k, v); }},
      {"ccsd.max_iter",
       [&](auto& k, auto& v) { c.ccsd.max_iter = static_cast<int>(to_int(k, v)); }},
      {"ccsd.diis_depth",
       [&](auto& k, auto& v) { c.ccsd.diis_depth = static_cast<int>(to_int(k, v)); }},
      {"ccsd.level_shift", [&](auto& k, auto& v) { c.ccsd.level_shift = to_double(k, v); }},
      {"fci.n_roots", [&](auto& k, auto& v) { c.fci_roots = to_count(k, v); }},
      {"eom.n_roots", [&](auto& k, auto& v) { c.eom_roots = to_count(k, v); }},
      {"qpe.trial", [&](auto&, auto& v) { c.trial = v; }},
      {"qpe.shots", [&](auto& k, auto& v) { c.qpe.n_shots = to_count(k, v); }},
      {"qpe.mode",
       [&](auto& k, auto& v) {
         if (v == "ideal") c.qpe.mode = QpeMode::Ideal;
         else if (v == "register") c.qpe.mode = QpeMode::Register;
         else throw ConfigError("config key '" + k + "' must be 'ideal' or 'register'");
       }},
      {"qpe.bits",
       [&](auto& k, auto& v) { c.qpe.register_bits = static_cast<int>(to_int(k, v)); }},
      {"qpe.time",
       [&](auto& k, auto& v) {
         if (v == "auto") return;
         c.qpe.time = to_double(k, v);
         c.qpe.auto_time = false;
       }},
      {"qpe.shift",
       [&](auto& k, auto& v) {
         if (v != "auto") c.qpe.shift = to_double(k, v);
       }},
      {"qpe.cluster_tol", [&](auto& k, auto& v) { c.qpe.cluster_tol = to_double(k, v); }},
      {"qpe.bin_width", [&](auto& k, auto& v) { c.qpe.bin_width = to_double(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.qpe.seed = static_cast<std::uint64_t>(to_count(k, v)); }},
      {"threads", [&](auto& k, auto& v) { c.threads = to_count(k, v); }},
      {"output.dir", [&](auto&, auto& v) { c.out_dir = v; }},
  };
  for (const auto& [key, value] : kv) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    if (!value.empty()) it->second(key, value);
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

void RunConfig::validate() const {
  if (fcidump.empty() == geometry.empty())
    throw ConfigError("exactly one of input.fcidump and input.geometry must be set");
  if (units != "bohr" && units != "angstrom")
    throw ConfigError("input.units must be 'bohr' or 'angstrom'");
  if (commutator != 0 && commutator != 1)
    throw ConfigError("downfold.commutator must be 0 or 1");
  if (target_root && !target_signature.empty())
    throw ConfigError("set at most one of target.root and target.signature");
  if (!active_all && active.empty()) throw ConfigError("active.orbitals is required");
  try {
    qpe.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void RunConfig::validate_active(std::size_t n_orb) const {
  try {
    active_space(n_orb).validate(n_orb);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("active.orbitals: ") + e.what());
  }
}

ActiveSpace RunConfig::active_space(std::size_t n_orb) const {
  return active_all ? ActiveSpace::all(n_orb) : ActiveSpace(active);
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  auto line = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  line("input.fcidump", fcidump);
  line("input.geometry", geometry);
  line("input.basis", basis);
  line("input.units", units);
  line("input.charge", std::to_string(charge));
  std::string act;
  if (active_all) {
    act = "all";
  } else {
    for (std::size_t k = 0; k < active.size(); ++k)
      act += (k ? "," : "") + std::to_string(active[k]);
  }
  line("active.orbitals", act);
  line("target.root", target_root ? std::to_string(*target_root) : "");
  line("target.signature", target_signature);
  line("downfold.commutator", std::to_string(commutator));
  line("scf.max_iter", std::to_string(scf.max_iter));
  line("scf.conv_tol", num(scf.conv_tol));
  line("scf.diis_depth", std::to_string(scf.diis_depth));
  line("ccsd.conv_tol", num(ccsd.conv_tol));
  line("ccsd.max_iter", std::to_string(ccsd.max_iter));
  line("ccsd.diis_depth", std::to_string(ccsd.diis_depth));
  line("ccsd.level_shift", num(ccsd.level_shift));
  line("fci.n_roots", std::to_string(fci_roots));
  line("eom.n_roots", std::to_string(eom_roots));
  line("qpe.trial", trial);
  line("qpe.shots", std::to_string(qpe.n_shots));
  line("qpe.mode", qpe.mode == QpeMode::Ideal ? "ideal" : "register");
  line("qpe.bits", std::to_string(qpe.register_bits));
  line("qpe.time", qpe.auto_time ? "auto" : num(qpe.time));
  line("qpe.shift", qpe.auto_time ? "auto" : num(qpe.shift));
  line("qpe.cluster_tol", num(qpe.cluster_tol));
  line("qpe.bin_width", num(qpe.bin_width));
  line("seed", std::to_string(qpe.seed));
  line("threads", std::to_string(threads));
  line("output.dir", out_dir);
  return os.str();
}

Molecule parse_geometry(const std::string& text, const std::string& units, int charge) {
  const double scale = units == "angstrom" ? kBohrPerAngstrom : 1.0;
  Molecule mol;
  mol.charge = charge;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ';');) {
    item = trim(item);
    if (item.empty()) continue;
    std::istringstream is(item);
    std::string symbol;
    double x = 0, y = 0, z = 0;
    if (!(is >> symbol >> x >> y >> z))
      throw ConfigError("input.geometry: cannot parse atom '" + item + "'");
    Atom a;
    if (symbol == "H" || symbol == "h") a.z = 1;
    else if (symbol == "He" || symbol == "he") a.z = 2;
    else throw ConfigError("input.geometry: unsupported element '" + symbol + "'");
    a.position = Eigen::Vector3d(x, y, z) * scale;
    mol.atoms.push_back(a);
  }
  if (mol.atoms.empty()) throw ConfigError("input.geometry: no atoms");
  return mol;
}

}  // namespace duccex
