// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/pipeline.hpp"

#include "duccex/downfold.hpp"
#include "duccex/fci.hpp"
#include "duccex/labels.hpp"
#include "duccex/minint.hpp"
#include "duccex/operators.hpp"
#include "duccex/parallel.hpp"
#include "duccex/qpesim.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace duccex {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  return buf;
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("missing artifact " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

SpatialIntegrals load_integrals(const RunConfig& c) {
  return read_fcidump(path_in(c, "integrals.fcidump"));
}

std::string describe(const std::vector<DeterminantWeight>& weights) {
  std::string out;
  for (const auto& w : weights) {
    if (!out.empty()) out += ';';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", w.coefficient);
    out += std::string(buf) + "*" + w.label;
  }
  return out;
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + fixed(v[i]);
  return out;
}

// ---------------------------------------------------------------------------

StageResult stage_scf(const RunConfig& c) {
  StageResult r;
  SpatialIntegrals ints;
  std::ostringstream info;
  if (!c.fcidump.empty()) {
    ints = read_fcidump(c.fcidump);
    const double e = aufbau_energy(ints);
    info << "source fcidump\n"
         << "e_rhf " << num(e) << "\n";
    r.scalars.emplace_back("e_rhf", fixed(e));
  } else {
    const auto mol = parse_geometry(c.geometry, c.units, c.charge);
    const auto shells = build_basis(mol, c.basis);
    const auto ao = integrals_s(mol, shells);
    const auto scf = rhf(mol, ao, c.scf);
    ints = mo_transform(scf.coefficients, ao, scf.n_elec);
    info << "source inline\n"
         << "e_rhf " << num(scf.energy) << "\n"
         << "e_nuc " << num(ao.e_nuc) << "\n"
         << "iterations " << scf.iterations << "\n"
         << "error " << num(scf.error) << "\n"
         << "orbital_energies";
    for (Eigen::Index i = 0; i < scf.orbital_energies.size(); ++i)
      info << ' ' << num(scf.orbital_energies[i]);
    info << "\n";
    r.scalars.emplace_back("e_rhf", fixed(scf.energy));
    r.scalars.emplace_back("scf_iterations", std::to_string(scf.iterations));
  }
  info << "n_orb " << ints.n_orb << "\n"
       << "n_elec " << ints.n_elec << "\n";
  r.scalars.emplace_back("n_orb", std::to_string(ints.n_orb));
  r.scalars.emplace_back("n_elec", std::to_string(ints.n_elec));
  write_fcidump(ints, path_in(c, "integrals.fcidump"));
  write_file(path_in(c, "scf.txt"), info.str());
  r.files = {"integrals.fcidump", "scf.txt"};
  return r;
}

StageResult stage_fci(const RunConfig& c) {
  StageResult r;
  const auto ints = load_integrals(c);
  const auto sector = sector_of(ints);
  const auto ham = to_spin_orbital(ints);
  const auto fci = fci_solve(ham, sector, c.fci_roots);
  std::ostringstream os;
  os << "root,energy,spin_square,top_determinants\n";
  for (Eigen::Index k = 0; k < fci.energies.size(); ++k) {
    const auto v = fci.state(static_cast<std::size_t>(k));
    os << k << ',' << fixed(fci.energies[k]) << ',' << fixed(spin_square(v)) << ','
       << describe(dominant_determinants(v, fci.space->reference(), 5)) << '\n';
  }
  write_file(path_in(c, "fci_roots.csv"), os.str());
  r.scalars.emplace_back("fci_energies", join(fci.energies));
  r.files = {"fci_roots.csv"};
  return r;
}

StageResult stage_ccsd(const RunConfig& c) {
  StageResult r;
  const auto ints = load_integrals(c);
  const auto ham = to_spin_orbital(ints);
  const auto amps = solve_ccsd(ham, sector_of(ints), c.ccsd);
  save_amplitudes(amps, path_in(c, "ccsd_amplitudes.txt"));
  std::ostringstream log;
  log << "iteration,max_residual,e_corr\n";
  for (const auto& it : amps.log)
    log << it.iteration << ',' << num(it.max_residual) << ',' << num(it.e_corr) << '\n';
  write_file(path_in(c, "ccsd_log.csv"), log.str());
  r.scalars.emplace_back("e_ccsd", fixed(amps.e_total));
  r.scalars.emplace_back("e_corr", fixed(amps.e_corr));
  r.scalars.emplace_back("ccsd_iterations", std::to_string(amps.iterations));
  r.files = {"ccsd_amplitudes.txt", "ccsd_log.csv"};
  return r;
}

StageResult stage_eom(const RunConfig& c) {
  StageResult r;
  const auto ints = load_integrals(c);
  const auto ham = to_spin_orbital(ints);
  const auto amps = load_amplitudes(sector_of(ints), path_in(c, "ccsd_amplitudes.txt"));
  const auto hbar = build_hbar(amps, ham);
  EomOptions opts;
  opts.n_roots = c.eom_roots;
  const auto states = solve_eomccsd(hbar, amps, opts);
  save_eom_vectors(states, path_in(c, "eom_vectors.txt"));
  std::ostringstream os;
  os << "root,energy,omega,r0,n_k_a,spin_square,triplet_like,top_determinants\n";
  Eigen::VectorXd energies(static_cast<Eigen::Index>(states.size()));
  for (const auto& s : states) {
    os << s.root << ',' << fixed(s.energy) << ',' << fixed(s.omega) << ',' << fixed(s.r0)
       << ',' << fixed(s.n_k_a) << ',' << fixed(s.spin_square) << ','
       << (s.triplet_like ? 1 : 0) << ',' << describe(s.signature) << '\n';
    energies[static_cast<Eigen::Index>(s.root)] = s.energy;
  }
  write_file(path_in(c, "eom_states.csv"), os.str());
  r.scalars.emplace_back("eom_energies", join(energies));
  r.files = {"eom_states.csv", "eom_vectors.txt"};
  return r;
}

// Root of `pairs` with the largest overlap with `target` (normalized).
std::size_t best_overlap(const EigenPairs& pairs, const Eigen::VectorXd& target) {
  std::size_t best = 0;
  double best_val = -1.0;
  for (Eigen::Index k = 0; k < pairs.values.size(); ++k) {
    const double o = std::abs(pairs.vectors.col(k).dot(target));
    if (o > best_val + 1e-12) {
      best_val = o;
      best = static_cast<std::size_t>(k);
    }
  }
  return best;
}

StageResult stage_downfold(const RunConfig& c) {
  StageResult r;
  const auto ints = load_integrals(c);
  const auto ham = to_spin_orbital(ints);
  const auto sector = sector_of(ints);
  const auto active = c.active_space(ints.n_orb);
  active.validate(ints.n_orb);

  std::ostringstream summary;
  summary << "commutator_order " << c.commutator << "\n";
  const auto bare = build_effective(ham, nullptr, active, sector);
  EffectiveHamiltonian eff = bare;
  std::optional<Eigen::VectorXd> target_cas;
  const bool have_target = c.target_root.has_value() || !c.target_signature.empty();
  if (have_target) {
    const auto amps = load_amplitudes(sector, path_in(c, "ccsd_amplitudes.txt"));
    auto states = load_eom_vectors(path_in(c, "eom_vectors.txt"));
    const auto k = select_target(c, states, amps);
    const auto& state = states[k];
    const auto a = eomccsd_a_vector(state, amps);
    Eigen::VectorXd t = project(a.psi, bare.space).coeffs;
    if (t.norm() > 0) target_cas = t / t.norm();
    summary << "target_root " << k << "\n"
            << "target_energy " << num(state.energy) << "\n"
            << "target_n_k_a " << num(state.n_k_a) << "\n";
    r.scalars.emplace_back("target_root", std::to_string(k));
    r.scalars.emplace_back("target_energy", fixed(state.energy));
    if (c.commutator == 1) {
      const auto sigma = extract_sigma_ext(state, amps, active);
      eff = build_effective(ham, &sigma, active, sector);
    }
    eff.state = static_cast<long>(k);
    eff.e_ccsd = amps.e_total;
    eff.e_state = state.energy;
  } else if (c.commutator == 1) {
    throw ConfigError("downfold.commutator = 1 needs target.root or target.signature");
  }

  const auto spec = diagonalize_effective(eff);
  const auto bare_spec = diagonalize_effective(bare);
  export_effective(eff, path_in(c, "effective_hamiltonian.txt"));
  auto spectrum_csv = [](const EffectiveSpectrum& s) {
    std::ostringstream os;
    os << "root,energy,top_determinants\n";
    for (Eigen::Index k = 0; k < s.pairs.values.size(); ++k)
      os << k << ',' << fixed(s.pairs.values[k]) << ','
         << describe(s.signatures[static_cast<std::size_t>(k)]) << '\n';
    return os.str();
  };
  write_file(path_in(c, "effective_spectrum.csv"), spectrum_csv(spec));
  write_file(path_in(c, "bare_spectrum.csv"), spectrum_csv(bare_spec));
  summary << "asymmetry " << num(eff.asymmetry) << "\n";
  if (target_cas) {
    const auto ke = best_overlap(spec.pairs, *target_cas);
    const auto kb = best_overlap(bare_spec.pairs, *target_cas);
    const auto ek = spec.pairs.values[static_cast<Eigen::Index>(ke)];
    const auto eb = bare_spec.pairs.values[static_cast<Eigen::Index>(kb)];
    summary << "effective_root " << ke << "\n"
            << "effective_energy " << num(ek) << "\n"
            << "bare_root " << kb << "\n"
            << "bare_energy " << num(eb) << "\n";
    r.scalars.emplace_back("effective_target_energy", fixed(ek));
    r.scalars.emplace_back("bare_target_energy", fixed(eb));
  }
  write_file(path_in(c, "downfold_summary.txt"), summary.str());
  r.scalars.emplace_back("effective_energies", join(spec.pairs.values));
  r.scalars.emplace_back("asymmetry", num(eff.asymmetry));
  r.files = {"effective_hamiltonian.txt", "effective_spectrum.csv", "bare_spectrum.csv",
             "downfold_summary.txt"};
  return r;
}

StageResult stage_qpe(const RunConfig& c) {
  StageResult r;
  const auto eff = import_effective(path_in(c, "effective_hamiltonian.txt"));
  const auto trial = parse_trial(c.trial, eff.space);
  const auto report = run_qpe(eff, trial, c.qpe);
  const auto rows = report_table(report);
  write_file(path_in(c, "qpe_table.csv"), table_csv(rows));
  write_file(path_in(c, "qpe_histogram.csv"), histogram_csv(report));
  write_file(path_in(c, "qpe_probabilities.csv"), probabilities_csv(report));
  std::string table;
  for (const auto& row : rows)
    table += (table.empty() ? "" : ";") + fixed(row.mean) + "+-" + fixed(row.std) + "(" +
             std::to_string(row.count) + ")";
  r.scalars.emplace_back("qpe_table", table);
  r.files = {"qpe_table.csv", "qpe_histogram.csv", "qpe_probabilities.csv"};
  return r;
}

}  // namespace

void save_amplitudes(const ClusterAmplitudes& amps, const std::string& path) {
  std::ostringstream os;
  os << "e_ref " << num(amps.e_ref) << "\n"
     << "e_corr " << num(amps.e_corr) << "\n"
     << "e_total " << num(amps.e_total) << "\n"
     << "max_residual " << num(amps.max_residual) << "\n"
     << "iterations " << amps.iterations << "\n"
     << "n_amplitudes " << amps.t.size() << "\n";
  const auto& m = *amps.manifold;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const auto& e = m.excitations[k];
    os << "t";
    for (std::size_t x = 0; x < e.rank; ++x) os << ' ' << int(e.occ[x]);
    os << " ->";
    for (std::size_t x = 0; x < e.rank; ++x) os << ' ' << int(e.vir[x]);
    os << ' ' << num(amps.t[static_cast<Eigen::Index>(k)]) << "\n";
  }
  write_file(path, os.str());
}

ClusterAmplitudes load_amplitudes(const Sector& sector, const std::string& path) {
  std::istringstream in(read_file(path));
  ClusterAmplitudes a;
  a.manifold = build_manifold(sector);
  a.full_space = enumerate_full(sector);
  a.t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(a.manifold->size()));
  a.converged = true;
  std::size_t k = 0;
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "t") {
      if (k >= a.manifold->size()) throw std::runtime_error("too many amplitudes in " + path);
      const auto last = line.rfind(' ');
      a.t[static_cast<Eigen::Index>(k++)] = std::stod(line.substr(last + 1));
    } else if (key == "e_ref") {
      ls >> key;
      a.e_ref = std::stod(key);
    } else if (key == "e_corr") {
      ls >> key;
      a.e_corr = std::stod(key);
    } else if (key == "e_total") {
      ls >> key;
      a.e_total = std::stod(key);
    } else if (key == "max_residual") {
      ls >> key;
      a.max_residual = std::stod(key);
    } else if (key == "iterations") {
      ls >> a.iterations;
    }
  }
  if (k != a.manifold->size()) throw std::runtime_error("amplitude count mismatch in " + path);
  return a;
}

void save_eom_vectors(const std::vector<EomState>& states, const std::string& path) {
  std::ostringstream os;
  for (const auto& s : states) {
    os << "root " << s.root << ' ' << num(s.energy) << ' ' << num(s.omega) << ' '
       << num(s.n_k_a) << ' ' << num(s.spin_square) << ' ' << num(s.r0);
    for (Eigen::Index i = 0; i < s.r.size(); ++i) os << ' ' << num(s.r[i]);
    os << "\n";
  }
  write_file(path, os.str());
}

std::vector<EomState> load_eom_vectors(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<EomState> out;
  for (std::string line; std::getline(in, line);) {
    std::istringstream ls(line);
    std::string key, tok;
    ls >> key;
    if (key != "root") continue;
    EomState s;
    ls >> s.root;
    std::vector<double> vals;
    while (ls >> tok) vals.push_back(std::stod(tok));
    if (vals.size() < 5) throw std::runtime_error("short EOM vector line in " + path);
    s.energy = vals[0];
    s.omega = vals[1];
    s.n_k_a = vals[2];
    s.spin_square = vals[3];
    s.r0 = vals[4];
    s.r = Eigen::Map<Eigen::VectorXd>(vals.data() + 5, static_cast<Eigen::Index>(vals.size() - 5));
    s.triplet_like = std::abs(s.spin_square) > 0.1;
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t select_target(const RunConfig& config, const std::vector<EomState>& states,
                          const ClusterAmplitudes& amps) {
  if (config.target_root) {
    if (*config.target_root >= states.size())
      throw ConfigError("target.root " + std::to_string(*config.target_root) +
                        " exceeds the number of EOM roots (" +
                        std::to_string(states.size()) + ")");
    return *config.target_root;
  }
  const auto [phase, det] =
      resolve_label(parse_label(config.target_signature), amps.manifold->reference);
  (void)phase;
  const EomAProjector projector(amps);
  std::size_t best = states.size();
  double best_w = -1.0;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const auto& s = states[k];
    if (s.triplet_like) continue;
    const auto a = projector(s.r0, s.r);
    const double w = std::abs(a.psi.at(det)) * a.n;
    if (w > best_w + 1e-12) {
      best_w = w;
      best = k;
    }
  }
  if (best == states.size())
    throw ConfigError("no singlet EOM root carries the signature '" +
                      config.target_signature + "'");
  return best;
}

StageResult run_stage(const std::string& stage, const RunConfig& config) {
  set_num_threads(config.threads);
  const auto t0 = std::chrono::steady_clock::now();
  StageResult r;
  try {
    fs::create_directories(config.out_dir);
    if (stage == "scf") r = stage_scf(config);
    else if (stage == "fci") r = stage_fci(config);
    else if (stage == "ccsd") r = stage_ccsd(config);
    else if (stage == "eomccsd") r = stage_eom(config);
    else if (stage == "downfold") r = stage_downfold(config);
    else if (stage == "qpe") r = stage_qpe(config);
    else throw std::invalid_argument("unknown stage");
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
  r.name = stage;
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void preflight(const RunConfig& config) {
  config.validate();
  if (config.commutator == 1 && !config.target_root && config.target_signature.empty())
    throw ConfigError("downfold.commutator = 1 needs target.root or target.signature");
  std::size_t n_orb = 0;
  if (!config.fcidump.empty()) {
    n_orb = read_fcidump(config.fcidump).n_orb;
  } else {
    const auto mol = parse_geometry(config.geometry, config.units, config.charge);
    mol.validate();
    n_orb = build_basis(mol, config.basis).size();
  }
  config.validate_active(n_orb);
}

RunManifest run_pipeline(const RunConfig& config) {
  preflight(config);
  RunManifest m;
  for (const auto& s : kStages) m.stages.push_back(run_stage(s, config));

  std::ostringstream os;
  os << "[config]\n" << config.echo() << "\n[versions]\n"
     << "duccex = " << kVersion << "\n"
     << "eigen = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
     << EIGEN_MINOR_VERSION << "\n"
     << "compiler = " << __VERSION__ << "\n\n[timings]\n";
  for (const auto& s : m.stages) os << s.name << " = " << fixed(s.seconds) << "\n";
  os << "\n[scalars]\n";
  for (const auto& s : m.stages)
    for (const auto& [k, v] : s.scalars) os << s.name << '.' << k << " = " << v << "\n";
  os << "\n[files]\n";
  for (const auto& s : m.stages)
    for (const auto& f : s.files) {
      const auto p = path_in(config, f);
      if (!fs::exists(p) || fs::file_size(p) == 0)
        throw StageError(s.name, "artifact " + f + " is missing or empty");
      os << f << " = " << fs::file_size(p) << "\n";
    }
  m.text = os.str();
  write_file(path_in(config, "manifest.txt"), m.text);
  return m;
}

}  // namespace duccex
