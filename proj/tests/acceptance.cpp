// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Acceptance report: one PASS/FAIL line per primary criterion.
//
// Exit status: 0 when every criterion ran to completion, 2 when one of them
// threw. With --strict any FAIL also gives 1. --extended additionally runs
// the H4/cc-pVTZ criterion, which exits 77 (skipped) when its fixtures are
// absent and --only-extended is given.

#include "duccex/downfold.hpp"
#include "duccex/fci.hpp"
#include "duccex/labels.hpp"
#include "duccex/parallel.hpp"
#include "duccex/pipeline.hpp"
#include "duccex/qpesim.hpp"
#include "systems.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

using namespace duccex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string data_path(const std::string& rel) { return std::string(DUCCEX_DATA_DIR) + "/" + rel; }

bool within(double value, double expect, double tol) { return std::abs(value - expect) <= tol; }

std::size_t best_overlap(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& target) {
  Eigen::Index best = 0;
  (vectors.transpose() * target).cwiseAbs().maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

// Exact spectrum with singlet flags.
struct Reference {
  SpectrumResult fci;
  std::vector<bool> singlet;

  Reference(const SpinOrbitalHamiltonian& ham, const Sector& sector, std::size_t n_roots)
      : fci(fci_solve(ham, sector, n_roots)) {
    for (Eigen::Index k = 0; k < fci.energies.size(); ++k)
      singlet.push_back(std::abs(spin_square(fci.state(static_cast<std::size_t>(k)))) < 0.1);
  }
  // Singlet root nearest to `energy`.
  [[nodiscard]] std::size_t nearest_singlet(double energy) const {
    std::size_t best = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < singlet.size(); ++k)
      if (singlet[k] && std::abs(fci.energies[static_cast<Eigen::Index>(k)] - energy) < gap) {
        gap = std::abs(fci.energies[static_cast<Eigen::Index>(k)] - energy);
        best = k;
      }
    return best;
  }
  [[nodiscard]] double energy(std::size_t k) const { return fci.energies[static_cast<Eigen::Index>(k)]; }
  // Normalized projection of root k onto `space`.
  [[nodiscard]] Eigen::VectorXd projected(std::size_t k, const SpacePtr& space) const {
    return project(fci.state(k), space).coeffs.normalized();
  }
};

// Energy of the effective-Hamiltonian root that best overlaps FCI root k.
double matched_energy(const EffectiveHamiltonian& eff, const Reference& ref, std::size_t k) {
  const auto spec = diagonalize_effective(eff);
  const auto j = best_overlap(spec.pairs.vectors, ref.projected(k, eff.space));
  return spec.pairs.values[static_cast<Eigen::Index>(j)];
}

struct H2Fixture {
  SpatialIntegrals ints;
  SpinOrbitalHamiltonian ham;
  Sector sector;
  ClusterAmplitudes cc;
  std::vector<EomState> states;
  Reference ref;
  ActiveSpace active = ActiveSpace::first(4);

  explicit H2Fixture(const std::string& file)
      : ints(read_fcidump(data_path(file))),
        ham(to_spin_orbital(ints)),
        sector(sector_of(ints)),
        cc(solve_ccsd(ham, sector)),
        states(solve_eomccsd(build_hbar(cc, ham), cc, {40})),
        ref(ham, sector, 40) {}

  // DUCC-ex Hamiltonian for the singlet EOM root near `energy` with the
  // largest weight on `signature`, with the FCI root it reproduces.
  [[nodiscard]] std::pair<EffectiveHamiltonian, std::size_t> ducc(const std::string& signature,
                                                                  double energy) const {
    const auto [phase, det] = resolve_label(parse_label(signature), sector.reference());
    (void)phase;
    const EomAProjector projector(cc);
    const EomState* state = nullptr;
    double best = -1.0;
    for (const auto& s : states) {
      if (s.triplet_like || std::abs(s.energy - energy) > 2e-3) continue;
      const auto a = projector(s.r0, s.r);
      const double w = std::abs(a.psi.at(det)) * a.n;
      if (w > best) {
        best = w;
        state = &s;
      }
    }
    if (state == nullptr) throw std::runtime_error("no singlet EOMCCSD root near " + fmt("%.4f", energy));
    const auto sigma = extract_sigma_ext(*state, cc, active);
    Eigen::Index k = 0;
    (ref.fci.energies.array() - state->energy).abs().minCoeff(&k);
    return {build_effective(ham, &sigma, active, sector), static_cast<std::size_t>(k)};
  }
  [[nodiscard]] EffectiveHamiltonian bare() const {
    return build_effective(ham, nullptr, active, sector);
  }
};

Outcome oracle_exactness() {
  double dev_cc = 0.0, dev_eom = 0.0, dev_bare = 0.0, dev_ducc = 0.0;
  for (const char* basis : {"sto-3g", "6-31g"})
    for (double r : {1.4008, 10.0}) {
      const auto ints = systems::mo_integrals(systems::h2(r), basis);
      const auto ham = to_spin_orbital(ints);
      const auto sector = sector_of(ints);
      const auto fci = fci_solve(ham, sector, 0);
      const auto cc = solve_ccsd(ham, sector);
      dev_cc = std::max(dev_cc, std::abs(cc.e_total - fci.energies[0]));
      const auto states = solve_eomccsd(build_hbar(cc, ham), cc);
      if (states.size() != static_cast<std::size_t>(fci.energies.size()))
        return {false, "EOMCCSD root count differs from FCI"};
      for (std::size_t k = 0; k < states.size(); ++k)
        dev_eom = std::max(dev_eom, std::abs(states[k].energy - fci.energies[static_cast<Eigen::Index>(k)]));
      const auto all = ActiveSpace::all(ints.n_orb);
      const auto bare = bare_cas_spectrum(ham, all, sector, 0);
      dev_bare = std::max(dev_bare, (bare.energies - fci.energies).cwiseAbs().maxCoeff());
      for (const auto& s : states) {
        const auto sigma = extract_sigma_ext(s, cc, all);
        const auto spec = diagonalize_effective(build_effective(ham, &sigma, all, sector));
        dev_ducc = std::max(dev_ducc, (spec.pairs.values - fci.energies).cwiseAbs().maxCoeff());
      }
    }
  const bool pass = dev_cc < 1e-8 && dev_eom < 1e-8 && dev_bare < 1e-9 && dev_ducc < 1e-9;
  return {pass, "max |CCSD-FCI| " + fmt("%.1e", dev_cc) + ", |EOM-FCI| " + fmt("%.1e", dev_eom) +
                    " (tol 1e-8); |bare-FCI| " + fmt("%.1e", dev_bare) + ", |DUCC-FCI| " +
                    fmt("%.1e", dev_ducc) + " (tol 1e-9)"};
}

Outcome hermiticity_suite() {
  const auto ints = systems::mo_integrals(systems::h4_linear(), "sto-3g");
  const auto ham = to_spin_orbital(ints);
  const auto sector = sector_of(ints);
  auto cc = solve_ccsd(ham, sector);
  const ActiveSpace active({1, 2});
  const auto full = enumerate_full(sector);
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  double asym = 0.0, antisym = 0.0, det_dev = 0.0;
  for (int draw = 0; draw < 50; ++draw) {
    for (auto& x : cc.t) x = u(rng);
    Eigen::VectorXd r(cc.t.size());
    for (auto& x : r) x = u(rng);
    const auto sigma_ext = extract_sigma_ext(u(rng), r, 1.0 + u(rng), cc, active);
    const auto eff = build_effective(ham, &sigma_ext, active, sector);
    asym = std::max(asym, eff.asymmetry);
    const auto sigma = sigma_ext.sigma();
    const Eigen::MatrixXd s = dense_matrix(
        [&](const WavefunctionVector& v) { return apply_excitation(sigma, v, full); }, full);
    antisym = std::max(antisym, (s + s.transpose()).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd e = dense_matrix(
        [&](const WavefunctionVector& v) { return exp_apply(sigma, v, 1); }, full);
    det_dev = std::max(det_dev, std::abs(e.determinant() - 1.0));
  }
  const bool pass = asym < 1e-10 && antisym == 0.0 && det_dev < 1e-9 && full->size() <= 70;
  return {pass, "50 draws, sector " + std::to_string(full->size()) + " dets: asymmetry " +
                    fmt("%.1e", asym) + " (tol 1e-10), max|S+S^T| " + fmt("%.1e", antisym) +
                    ", max|det exp(S) - 1| " + fmt("%.1e", det_dev) + " (tol 1e-9)"};
}

Outcome h2_equilibrium() {
  const H2Fixture h2("fixtures/h2_ccpvtz_r1.4008.fcidump");
  const double ref_fci[] = {-0.5487, -0.1210, 0.2310};
  const double ref_bare[] = {0.0181, 0.0588, 0.0532};
  const auto bare = h2.bare();
  bool pass = true;
  std::ostringstream os;
  os << "FCI";
  std::size_t roots[3];
  for (int i = 0; i < 3; ++i) {
    roots[i] = h2.ref.nearest_singlet(ref_fci[i]);
    const double e = h2.ref.energy(roots[i]);
    pass &= within(e, ref_fci[i], 1e-4);
    os << ' ' << fmt("%.4f", e);
  }
  os << "; bare err";
  for (int i = 0; i < 3; ++i) {
    const double err = matched_energy(bare, h2.ref, roots[i]) - h2.ref.energy(roots[i]);
    const bool ok = within(err, ref_bare[i], 2e-3);
    pass &= ok;
    os << ' ' << fmt("%+.4f", err) << " (ref " << fmt("%+.4f", ref_bare[i]) << (ok ? "" : " MISS") << ')';
  }
  const auto [ducc, k2] = h2.ducc("1a->3a", ref_fci[0]);
  const double e2 = h2.ref.energy(k2);
  const double err_ducc = matched_energy(ducc, h2.ref, k2) - e2;
  pass &= k2 == roots[0];
  const double err_bare = matched_energy(bare, h2.ref, roots[0]) - e2;
  const bool ducc_ok = within(err_ducc, 0.0009, 2e-3);
  const bool order_ok = std::abs(err_ducc) < std::abs(err_bare);
  pass &= ducc_ok && order_ok;
  os << "; DUCC-ex(2A) err " << fmt("%+.4f", err_ducc) << " (ref +0.0009, " << (ducc_ok ? "ok" : "MISS")
     << "); |DUCC| < |bare|: " << (order_ok ? "yes" : "NO");
  return {pass, os.str()};
}

Outcome h2_stretched() {
  const H2Fixture h2("fixtures/h2_ccpvtz_r10.fcidump");
  const auto [ducc2, k2] = h2.ducc("1a->2a,1b->2b", -0.5981);
  const auto [ducc3, k3] = h2.ducc("1a->3a", -0.4873);
  const double e2 = h2.ref.energy(k2), e3 = h2.ref.energy(k3);
  const bool ok_fci = within(e2, -0.5981, 1e-4) && within(e3, -0.4873, 1e-4);
  const auto bare = h2.bare();
  const double d2 = matched_energy(ducc2, h2.ref, k2) - e2;
  const double d3 = matched_energy(ducc3, h2.ref, k3) - e3;
  const double b2 = matched_energy(bare, h2.ref, k2) - e2;
  const double b3 = matched_energy(bare, h2.ref, k3) - e3;
  const bool ok_d2 = within(d2, -0.0065, 2e-3), ok_d3 = within(d3, 0.0025, 2e-3);
  const bool ok_b2 = within(b2, 0.0178, 2e-3), ok_b3 = within(b3, 0.0078, 2e-3);

  QpeConfig qc;
  qc.n_shots = 10000;
  qc.seed = 7;
  const auto report = run_qpe(ducc2, parse_trial("1a->2a,1b->2b", ducc2.space), qc);
  std::size_t big = 0;
  for (const auto& c : report.clusters)
    if (c.count >= qc.n_shots / 100) ++big;
  const bool ok_qpe = big >= 4;

  auto mark = [](bool ok) { return ok ? "" : " MISS"; };
  std::ostringstream os;
  os << "FCI " << fmt("%.4f", e2) << " " << fmt("%.4f", e3) << (ok_fci ? "" : " MISS") << "; DUCC-ex(2A) on 2A " << fmt("%+.4f", d2) << " (ref -0.0065" << mark(ok_d2) << "), DUCC-ex(3A) on 3A "
     << fmt("%+.4f", d3) << " (ref +0.0025" << mark(ok_d3) << "); bare " << fmt("%+.4f", b2) << " / "
     << fmt("%+.4f", b3) << " (ref +0.0178 / +0.0078" << mark(ok_b2 && ok_b3) << "); QPE clusters >= 1%: "
     << big << " (need >= 4)";
  return {ok_fci && ok_d2 && ok_d3 && ok_b2 && ok_b3 && ok_qpe, os.str()};
}

Outcome h4_trapezoid() {
  const auto out = fs::temp_directory_path() / "duccex_acceptance_h4";
  fs::remove_all(out);
  auto config = RunConfig::from_file(data_path("configs/h4a_631g.conf"));
  config.out_dir = out.string();
  (void)run_pipeline(config);

  const auto ints = read_fcidump((out / "integrals.fcidump").string());
  const auto ham = to_spin_orbital(ints);
  const auto sector = sector_of(ints);
  const Reference ref(ham, sector, 20);
  const auto [phase, det] = resolve_label(parse_label("2a->3a,2b->3b"), sector.reference());
  (void)phase;
  std::size_t target = 0;
  double weight = 0.0;
  for (std::size_t k = 1; k < ref.singlet.size(); ++k) {
    const double w = ref.singlet[k] ? std::abs(ref.fci.state(k).at(det)) : 0.0;
    if (w > weight) {
      weight = w;
      target = k;
    }
  }
  const double e_fci = ref.energy(target);
  const auto eff = import_effective((out / "effective_hamiltonian.txt").string());
  const auto bare = build_effective(ham, nullptr, eff.active, sector);
  const double e_ducc = matched_energy(eff, ref, target);
  const double e_bare = matched_energy(bare, ref, target);
  const bool closer = std::abs(e_ducc - e_fci) < std::abs(e_bare - e_fci);

  // Cluster of the target state in the effective spectrum.
  const auto spec = diagonalize_effective(eff);
  const auto eff_root = best_overlap(spec.pairs.vectors, ref.projected(target, eff.space));
  auto shots_on_target = [&](const std::string& trial) {
    QpeConfig qc;
    qc.n_shots = 10000;
    qc.seed = 7;
    const auto report = run_qpe(eff, parse_trial(trial, eff.space), qc);
    for (const auto& c : report.clusters)
      if (c.first_root <= eff_root && eff_root <= c.last_root) return c.count;
    return std::size_t{0};
  };
  const char* lacking[] = {"ref", "0.7071*2a->3a + 0.7071*2b->3b", "1a->3a,1b->3b", "2a->4a,2b->4b"};
  bool never = true;
  std::ostringstream trials;
  for (const char* t : lacking) {
    const auto n = shots_on_target(t);
    never &= n == 0;
    trials << " [" << t << "]=" << n;
  }
  const auto with = shots_on_target("2a->3a,2b->3b");

  std::ostringstream os;
  os << "pipeline ok; 2A FCI " << fmt("%.6f", e_fci) << ", DUCC-ex err " << fmt("%+.5f", e_ducc - e_fci)
     << ", bare err " << fmt("%+.5f", e_bare - e_fci) << " (closer: " << (closer ? "yes" : "NO")
     << "); shots on 2A from trials lacking the double:" << trials.str() << " (need all 0); with it: " << with;
  return {closer && never, os.str()};
}

Outcome qpe_statistics() {
  const H2Fixture h2("fixtures/h2_ccpvtz_r1.4008.fcidump");
  const auto eff = h2.ducc("1a->3a", -0.5487).first;
  const auto trial = parse_trial("0.7071*1a->3a + 0.7071*1b->3b", eff.space);

  QpeConfig ideal;
  ideal.n_shots = 100000;
  ideal.seed = 11;
  const auto rep = run_qpe(eff, trial, ideal);
  double worst = 0.0;  // in units of the binomial sigma
  for (const auto& c : rep.clusters) {
    const double p = c.probability;
    const double sd = std::sqrt(p * (1 - p) / 1e5);
    const double dev = std::abs(static_cast<double>(c.count) / 1e5 - p);
    worst = std::max(worst, sd > 0 ? dev / sd : (dev > 0 ? 1e9 : 0.0));
  }

  QpeConfig reg = ideal;
  reg.n_shots = 20000;
  reg.mode = QpeMode::Register;
  reg.register_bits = 20;
  const auto rr = run_qpe(eff, trial, reg);
  double mean_dev = 0.0;
  for (double e : rr.shots) {
    double d = std::numeric_limits<double>::infinity();
    for (double x : rr.eigenvalues) d = std::min(d, std::abs(e - x));
    mean_dev += d;
  }
  mean_dev /= static_cast<double>(rr.shots.size());
  const double span = rr.eigenvalues.maxCoeff() - rr.eigenvalues.minCoeff();
  const double bound = span / std::pow(2.0, 16);

  QpeConfig small = reg;
  small.register_bits = 12;
  std::vector<std::string> outputs;
  for (int threads : {1, 4, 8}) {
    set_num_threads(static_cast<std::size_t>(threads));
    const auto r = run_qpe(eff, trial, small);
    outputs.push_back(table_csv(report_table(r)) + histogram_csv(r) + probabilities_csv(r));
  }
  set_num_threads(0);
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];

  std::ostringstream os;
  os << "ideal 1e5 shots max deviation " << fmt("%.2f", worst) << " sigma (tol 5); register m=20 mean dev "
     << fmt("%.2e", mean_dev) << " < " << fmt("%.2e", bound) << ": " << (mean_dev < bound ? "yes" : "NO")
     << "; reports identical for 1/4/8 threads: " << (same ? "yes" : "NO");
  return {worst < 5.0 && mean_dev < bound && same, os.str()};
}

// Returns nullopt when the fixtures are absent.
std::optional<Outcome> h4_ccpvtz() {
  struct Case {
    const char* fixture;
    double fci, bare_err, ducc_err;
  };
  const Case cases[] = {{"fixtures/h4a_ccpvtz.fcidump", -2.0280, 0.0734, 0.0096},
                        {"fixtures/h4b_ccpvtz.fcidump", -1.9901, 0.0388, 0.0443}};
  for (const auto& c : cases)
    if (!fs::exists(data_path(c.fixture))) return std::nullopt;
  bool pass = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    RunConfig config;
    config.fcidump = data_path(c.fixture);
    config.active = {0, 1, 2, 3, 4, 5, 6};
    config.target_signature = "2a->3a,2b->3b";
    config.trial = "2a->3a,2b->3b";
    config.fci_roots = 10;
    config.eom_roots = 10;
    config.ccsd.level_shift = 0.1;
    config.out_dir = (fs::temp_directory_path() / ("duccex_acceptance_" + fs::path(c.fixture).stem().string())).string();
    (void)run_pipeline(config);
    const auto ints = read_fcidump(data_path(c.fixture));
    const auto ham = to_spin_orbital(ints);
    const auto sector = sector_of(ints);
    const Reference ref(ham, sector, 10);
    const auto k = ref.nearest_singlet(c.fci);
    const double e = ref.energy(k);
    const auto eff = import_effective(config.out_dir + "/effective_hamiltonian.txt");
    const double d = matched_energy(eff, ref, k) - e;
    const double b = matched_energy(build_effective(ham, nullptr, eff.active, sector), ref, k) - e;
    pass &= within(e, c.fci, 5e-4) && within(b, c.bare_err, 3e-3) && within(d, c.ducc_err, 3e-3);
    os << fs::path(c.fixture).stem().string() << ": FCI " << fmt("%.4f", e) << ", bare " << fmt("%+.4f", b)
       << ", DUCC-ex " << fmt("%+.4f", d) << "; ";
  }
  return Outcome{pass, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duccex acceptance report"};
  bool strict = false, extended = false, only_extended = false;
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  app.add_flag("--extended", extended, "also run the H4/cc-pVTZ criterion");
  app.add_flag("--only-extended", only_extended, "run only the H4/cc-pVTZ criterion");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    std::string name;
    double limit;  // seconds
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria;
  if (!only_extended) {
    criteria = {
        {"Oracle exactness", 10, oracle_exactness},
        {"Hermiticity suite", 5, hermiticity_suite},
        {"H2/cc-pVTZ, R = 1.4008", 60, h2_equilibrium},
        {"H2/cc-pVTZ, R = 10", 60, h2_stretched},
        {"H4 trapezoid, 6-31G", 300, h4_trapezoid},
        {"QPE statistics", 30, qpe_statistics},
    };
  }

  int failed = 0, crashed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++crashed;
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = sec < c.limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s  %s: %s; %.1f s (limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), sec, c.limit, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }

  const std::string ext_name = "H4/cc-pVTZ (extended)";
  if (extended || only_extended) {
    std::optional<Outcome> o;
    try {
      o = h4_ccpvtz();
    } catch (const std::exception& e) {
      o = Outcome{false, std::string("error: ") + e.what()};
      ++crashed;
    }
    if (!o) {
      std::printf("SKIP  %s: fixtures data/fixtures/h4{a,b}_ccpvtz.fcidump not present\n", ext_name.c_str());
      if (only_extended) return 77;
    } else {
      if (!o->pass) ++failed;
      std::printf("%s  %s: %s\n", o->pass ? "PASS" : "FAIL", ext_name.c_str(), o->detail.c_str());
    }
  } else {
    std::printf("SKIP  %s: run with --extended\n", ext_name.c_str());
  }

  std::printf("%d criteria failed\n", failed);
  if (crashed) return 2;
  return strict && failed ? 1 : 0;
}
