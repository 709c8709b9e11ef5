// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "duccex/qpesim.hpp"

#include "duccex/eigensolvers.hpp"
#include "duccex/labels.hpp"
#include "duccex/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace duccex {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string describe(const std::vector<DeterminantWeight>& weights) {
  std::string out;
  for (const auto& w : weights) {
    if (!out.empty()) out += ';';
    out += fmt("%.4f", w.coefficient) + "*" + w.label;
  }
  return out;
}

}  // namespace

TrialState parse_trial(std::string_view text, const SpacePtr& space) {
  TrialState trial;
  std::size_t p = 0;
  auto skip = [&] {
    while (p < text.size() && is_space(text[p])) ++p;
  };
  double sign = 1.0;
  skip();
  if (p < text.size() && (text[p] == '+' || text[p] == '-')) {
    sign = text[p] == '-' ? -1.0 : 1.0;
    ++p;
  }
  while (true) {
    skip();
    double coeff = 1.0;
    {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text.data() + p, text.data() + text.size(), value);
      if (ec == std::errc{}) {
        std::size_t q = static_cast<std::size_t>(ptr - text.data());
        while (q < text.size() && is_space(text[q])) ++q;
        if (q < text.size() && text[q] == '*') {
          coeff = value;
          p = q + 1;
        }
      }
    }
    std::size_t end = p;
    while (end < text.size()) {
      const char c = text[end];
      if (c == '+' || (c == '-' && !(end + 1 < text.size() && text[end + 1] == '>'))) break;
      ++end;
    }
    std::string label(text.substr(p, end - p));
    while (!label.empty() && is_space(label.back())) label.pop_back();
    if (label.empty()) throw LabelError("empty term in trial '" + std::string(text) + "'");
    trial.terms.push_back({sign * coeff, label});
    if (end >= text.size()) break;
    sign = text[end] == '-' ? -1.0 : 1.0;
    p = end + 1;
  }

  trial.vector = WavefunctionVector(space);
  const auto& reference = space->reference();
  for (const auto& term : trial.terms) {
    const auto [phase, det] = resolve_label(parse_label(term.label), reference);
    auto idx = space->find(det);
    if (!idx)
      throw LabelError("trial determinant '" + term.label + "' is outside the active space");
    trial.vector.coeffs[static_cast<Eigen::Index>(*idx)] += phase * term.coefficient;
  }
  const double norm = trial.vector.norm();
  if (norm < 1e-12) throw std::invalid_argument("trial state has zero norm");
  trial.vector.coeffs /= norm;
  return trial;
}

void QpeConfig::validate() const {
  if (n_shots < 1) throw std::invalid_argument("qpe: n_shots must be >= 1");
  if (mode == QpeMode::Register && (register_bits < 1 || register_bits > 24))
    throw std::invalid_argument("qpe: register bits must lie in [1, 24]");
  if (!(cluster_tol >= 0.0)) throw std::invalid_argument("qpe: negative cluster tolerance");
  if (!(bin_width > 0.0)) throw std::invalid_argument("qpe: bin width must be positive");
  if (!auto_time && !(time > 0.0))
    throw std::invalid_argument("qpe: evolution time must be positive");
}

double shot_uniform(std::uint64_t seed, std::uint64_t shot, std::uint64_t stream) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ shot);
  h = splitmix64(h ^ ((stream + 1) * 0xD1B54A32D192ED03ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double fejer_probability(double phi, std::uint64_t k, int m) {
  const double n = std::ldexp(1.0, m);
  double delta = phi - static_cast<double>(k) / n;
  delta -= std::round(delta);
  const double s = std::sin(std::numbers::pi * delta);
  if (std::abs(s) < 1e-300) return 1.0;
  const double num = std::sin(n * std::numbers::pi * delta);
  return num * num / (n * n * s * s);
}

namespace {

// Inverse-CDF sampling of the register outcome, walking outward from the
// outcome nearest the phase so the expected cost is O(log 2^m).
std::uint64_t sample_outcome(double phi, int m, double u) {
  const std::uint64_t n = std::uint64_t{1} << m;
  const double scaled = phi * static_cast<double>(n);
  const auto center =
      static_cast<std::uint64_t>(std::llround(scaled)) % n;
  double acc = fejer_probability(phi, center, m);
  if (u < acc) return center;
  for (std::uint64_t j = 1; j <= n / 2; ++j) {
    const std::uint64_t up = (center + j) % n;
    acc += fejer_probability(phi, up, m);
    if (u < acc) return up;
    const std::uint64_t down = (center + n - j) % n;
    if (down == up) continue;
    acc += fejer_probability(phi, down, m);
    if (u < acc) return down;
  }
  return center;  // u beyond the accumulated total by rounding
}

}  // namespace

QpeReport run_qpe(const Eigen::MatrixXd& matrix, const SpacePtr& space,
                  const TrialState& trial, const QpeConfig& config) {
  config.validate();
  if (trial.vector.space != space &&
      (trial.vector.space->determinants() != space->determinants()))
    throw std::invalid_argument("qpe: trial state is not over the Hamiltonian's space");
  if (trial.vector.norm() == 0.0) throw std::invalid_argument("qpe: empty trial state");

  QpeReport rep;
  rep.config = config;
  const auto eig = eig_sym(matrix);
  rep.eigenvalues = eig.values;
  rep.probabilities = (eig.vectors.transpose() * trial.vector.coeffs).cwiseAbs2();
  const auto n_states = static_cast<std::size_t>(rep.eigenvalues.size());
  const double lo = rep.eigenvalues[0];
  const double hi = rep.eigenvalues[rep.eigenvalues.size() - 1];

  const int m = config.register_bits;
  if (config.auto_time) {
    const double span = hi - lo;
    const double pad = 0.05 * (span + 1e-6);
    rep.shift = lo - pad;
    rep.time = 2.0 * std::numbers::pi * (1.0 - std::ldexp(1.0, -m)) / (span + 2.0 * pad);
  } else {
    rep.shift = config.shift;
    rep.time = config.time;
  }
  if (!(rep.time > 0.0)) throw std::invalid_argument("qpe: non-positive evolution time");

  std::vector<double> cdf(n_states);
  double total = 0.0;
  for (std::size_t i = 0; i < n_states; ++i) {
    total += rep.probabilities[static_cast<Eigen::Index>(i)];
    cdf[i] = total;
  }
  std::vector<double> phases(n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    const double x = (rep.eigenvalues[static_cast<Eigen::Index>(i)] - rep.shift) *
                     rep.time / (2.0 * std::numbers::pi);
    phases[i] = x - std::floor(x);
  }

  rep.shots.assign(config.n_shots, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  const double register_size = std::ldexp(1.0, m);
  parallel_for(config.n_shots, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const double u = shot_uniform(config.seed, s, 0) * total;
      std::size_t i = static_cast<std::size_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (i >= n_states) i = n_states - 1;
      while (rep.probabilities[static_cast<Eigen::Index>(i)] == 0.0 && i > 0) --i;
      if (config.mode == QpeMode::Ideal) {
        rep.shots[s] = rep.eigenvalues[static_cast<Eigen::Index>(i)];
      } else {
        const auto k = sample_outcome(phases[i], m, shot_uniform(config.seed, s, 1));
        rep.shots[s] = rep.shift + two_pi * static_cast<double>(k) / (register_size * rep.time);
      }
    }
  });

  // Group eigenvalues closer than the tolerance.
  std::vector<std::size_t> group_of(n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    if (i == 0 || rep.eigenvalues[static_cast<Eigen::Index>(i)] -
                          rep.eigenvalues[static_cast<Eigen::Index>(i - 1)] >=
                      config.cluster_tol) {
      QpeCluster c;
      c.energy = rep.eigenvalues[static_cast<Eigen::Index>(i)];
      c.first_root = i;
      c.signature = describe(dominant_determinants(
          WavefunctionVector(space, eig.vectors.col(static_cast<Eigen::Index>(i))),
          space->reference(), 3));
      rep.clusters.push_back(c);
    }
    group_of[i] = rep.clusters.size() - 1;
    rep.clusters.back().last_root = i;
    rep.clusters.back().probability += rep.probabilities[static_cast<Eigen::Index>(i)];
  }

  rep.shot_cluster.resize(config.n_shots);
  // Offsets from the cluster energy keep single-valued clusters exact.
  std::vector<double> sum(rep.clusters.size(), 0.0);
  const auto* ev = rep.eigenvalues.data();
  for (std::size_t s = 0; s < config.n_shots; ++s) {
    const double e = rep.shots[s];
    auto it = std::lower_bound(ev, ev + n_states, e);
    std::size_t i = static_cast<std::size_t>(it - ev);
    if (i == n_states || (i > 0 && e - ev[i - 1] <= ev[i] - e)) i = i == 0 ? 0 : i - 1;
    const auto g = group_of[i];
    rep.shot_cluster[s] = g;
    rep.clusters[g].count++;
    sum[g] += e - rep.clusters[g].energy;
  }
  for (std::size_t g = 0; g < rep.clusters.size(); ++g) {
    auto& c = rep.clusters[g];
    if (c.count > 0) c.mean = c.energy + sum[g] / static_cast<double>(c.count);
  }
  std::vector<double> ss(rep.clusters.size(), 0.0);
  for (std::size_t s = 0; s < config.n_shots; ++s) {
    const auto g = rep.shot_cluster[s];
    const double d = rep.shots[s] - rep.clusters[g].mean;
    ss[g] += d * d;
  }
  for (std::size_t g = 0; g < rep.clusters.size(); ++g) {
    auto& c = rep.clusters[g];
    c.std = c.count > 1 ? std::sqrt(ss[g] / static_cast<double>(c.count - 1)) : 0.0;
  }

  const auto [mn, mx] = std::minmax_element(rep.shots.begin(), rep.shots.end());
  const double w = config.bin_width;
  const double start = std::floor(*mn / w) * w;
  const auto n_bins = static_cast<std::size_t>(std::floor((*mx - start) / w)) + 1;
  rep.bin_counts.assign(n_bins, 0);
  for (std::size_t k = 0; k <= n_bins; ++k)
    rep.bin_edges.push_back(start + static_cast<double>(k) * w);
  for (double e : rep.shots) {
    auto b = static_cast<std::size_t>(std::floor((e - start) / w));
    rep.bin_counts[std::min(b, n_bins - 1)]++;
  }
  return rep;
}

std::vector<QpeTableRow> report_table(const QpeReport& report,
                                      const std::vector<std::string>& labels) {
  if (report.shots.empty()) throw std::invalid_argument("report_table: empty report");
  const double min_count =
      std::max(5.0, 0.005 * static_cast<double>(report.config.n_shots));
  std::vector<QpeTableRow> rows;
  for (std::size_t g = 0; g < report.clusters.size(); ++g) {
    const auto& c = report.clusters[g];
    if (static_cast<double>(c.count) < min_count) continue;
    rows.push_back({c.energy, c.mean, c.std, c.count,
                    g < labels.size() ? labels[g] : c.signature});
  }
  return rows;
}

std::string table_csv(const std::vector<QpeTableRow>& rows) {
  std::ostringstream os;
  os << "cluster_energy,mean,std,count,top_determinants\n";
  for (const auto& r : rows)
    os << fmt("%.12f", r.energy) << ',' << fmt("%.12f", r.mean) << ','
       << fmt("%.12f", r.std) << ',' << r.count << ',' << r.signature << '\n';
  return os.str();
}

std::string histogram_csv(const QpeReport& report) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < report.bin_counts.size(); ++k)
    os << fmt("%.6f", report.bin_edges[k]) << ',' << fmt("%.6f", report.bin_edges[k + 1])
       << ',' << report.bin_counts[k] << '\n';
  return os.str();
}

std::string probabilities_csv(const QpeReport& report) {
  std::ostringstream os;
  os << "root,energy,probability\n";
  for (Eigen::Index i = 0; i < report.eigenvalues.size(); ++i)
    os << i << ',' << fmt("%.12f", report.eigenvalues[i]) << ','
       << fmt("%.12e", report.probabilities[i]) << '\n';
  return os.str();
}

}  // namespace duccex
