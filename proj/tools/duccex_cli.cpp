// Copyright 2026 The duccex Authors - All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: `duccex pipeline --config run.conf` or one stage at a
// time (`duccex scf --config run.conf`, then fci, ccsd, ...).

#include "duccex/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> roots;
  std::optional<std::size_t> threads;
};

duccex::RunConfig load(const Overrides& o) {
  auto c = duccex::RunConfig::from_file(o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.seed) c.qpe.seed = *o.seed;
  if (o.roots) {
    c.fci_roots = *o.roots;
    c.eom_roots = *o.roots;
  }
  if (o.threads) c.threads = *o.threads;
  return c;
}

void print(const duccex::StageResult& r) {
  std::printf("[%s] %.3f s\n", r.name.c_str(), r.seconds);
  for (const auto& [k, v] : r.scalars) std::printf("  %s = %s\n", k.c_str(), v.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"duccex: excited-state downfolding and QPE sampling"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", o.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "QPE seed (overrides seed)");
    sub->add_option("--roots", o.roots, "FCI and EOM root count");
    sub->add_option("--threads", o.threads, "worker threads, 0 for all cores");
  };
  auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_common(pipeline);
  for (const auto& s : duccex::kStages) add_common(app.add_subcommand(s, "run the " + s + " stage"));

  CLI11_PARSE(app, argc, argv);
  try {
    const auto cfg = load(o);
    if (pipeline->parsed()) {
      const auto m = duccex::run_pipeline(cfg);
      for (const auto& r : m.stages) print(r);
      std::printf("manifest written to %s/manifest.txt\n", cfg.out_dir.c_str());
      return 0;
    }
    for (const auto* sub : app.get_subcommands()) {
      if (sub->get_name() == "pipeline") continue;
      cfg.validate();
      print(duccex::run_stage(sub->get_name(), cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
