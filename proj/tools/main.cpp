// Command line front end: finite towers of order-preserving map families,
// bit-driven relational constructions, presented Boolean algebras with
// exact sup norms, and the poset of finitely presented conditions.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "morstone/cli.hpp"

namespace {

using morstone::cli::Report;
using morstone::cli::RunConfig;

int emit(const Report& report, bool as_json) {
  if (as_json) {
    std::cout << report.text();
  } else {
    const auto& checks = report.json.at("checks");
    for (const auto& c : checks)
      std::cout << (c.at("pass").get<bool>() ? "pass" : "FAIL") << "  "
                << c.at("name").get<std::string>() << "\n";
    for (const char* key : {"norm", "epsilon_max", "extension", "stronger",
                            "compatible", "chain_norm", "antichain_norm"})
      if (report.json.contains(key))
        std::cout << key << " = " << report.json.at(key).dump() << "\n";
    std::cout << (report.pass ? "OK" : "FAILED") << "\n";
  }
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite combinatorial constructions over Boolean presentations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", morstone::cli::kVersion);

  RunConfig cfg;
  bool as_json = false;
  std::uint64_t seed_value = 0;

  const auto add_json = [&](CLI::App* cmd) {
    cmd->add_flag("--json", as_json, "emit the full JSON report");
    cmd->add_option("--budget", cfg.budget, "solver budget (generators)");
  };

  // morass build / verify
  auto* morass_cmd = app.add_subcommand("morass", "level towers");
  morass_cmd->require_subcommand(1);
  auto* mb = morass_cmd->add_subcommand("build", "build a tower");
  mb->add_option("--levels", cfg.levels, "number of one-step maps")->required();
  mb->add_option("--split", cfg.split_rule,
                 "splitting rule: doubling|linear|midpoint");
  mb->add_option("--out", cfg.out_path, "output file");
  add_json(mb);
  mb->callback([&] { cfg.command = "morass-build"; });
  auto* mv = morass_cmd->add_subcommand("verify", "verify a tower file");
  mv->add_option("file", cfg.input, "tower file")->required();
  mv->add_flag("--no-amalgam", cfg.skip_amalgam_stats,
               "skip the per-pair amalgamation statistics");
  add_json(mv);
  mv->callback([&] { cfg.command = "morass-verify"; });

  // construct
  auto* cons = app.add_subcommand("construct", "bit-driven model construction");
  cons->add_option("--levels", cfg.levels, "number of one-step maps")
      ->required();
  cons->add_option("--stages", cfg.stages, "stage count (with --seed)");
  cons->add_option("--bits", cfg.bits, "explicit bit stream, e.g. 10110");
  auto* seed_opt = cons->add_option("--seed", seed_value, "bit stream seed");
  cons->add_option("--variant", cfg.variant, "plain|c");
  cons->add_option("--split", cfg.split_rule, "splitting rule");
  cons->add_option("--out", cfg.out_path, "output directory");
  add_json(cons);
  cons->callback([&] {
    cfg.command = "construct";
    if (seed_opt->count() > 0) cfg.seed = seed_value;
  });

  // norm
  auto* norm = app.add_subcommand("norm", "sup norm of a simple function");
  norm->add_option("file", cfg.input, "presentation file")->required();
  norm->add_option("--terms", cfg.terms, "e.g. \"1*g3,-1/2*g7\"")->required();
  add_json(norm);
  norm->callback([&] { cfg.command = "norm"; });

  // calg verify
  auto* calg = app.add_subcommand("calg", "blocked presentations");
  calg->require_subcommand(1);
  auto* cv = calg->add_subcommand("verify", "check the c-algebra shape");
  cv->add_option("file", cfg.input, "presentation file")->required();
  cv->add_option("--maxF", cfg.max_family, "family size bound");
  add_json(cv);
  cv->callback([&] { cfg.command = "calg-verify"; });

  // scenario
  auto* sc = app.add_subcommand("scenario", "embedding scenario arithmetic");
  sc->add_option("--nstar", cfg.n_star, "separation parameter")->required();
  sc->add_option("--c", cfg.c_value, "distortion bound, rational")->required();
  add_json(sc);
  sc->callback([&] { cfg.command = "scenario"; });

  // cohen dense / guess
  auto* coh = app.add_subcommand("cohen", "finite partial 0/1 conditions");
  coh->require_subcommand(1);
  auto* cd = coh->add_subcommand("dense", "extend into the dense set");
  cd->add_option("--p", cfg.p_literal, "condition, e.g. \"0:1,3:0\"");
  cd->add_option("--nstar", cfg.n_star, "separation parameter")->required();
  cd->add_option("--oracle", cfg.oracle_path, "norm oracle file")->required();
  add_json(cd);
  cd->callback([&] { cfg.command = "cohen-dense"; });
  auto* cg = coh->add_subcommand("guess", "pigeonhole over deciding conditions");
  cg->add_option("--decisions", cfg.decisions_path, "decision file")
      ->required();
  add_json(cg);
  cg->callback([&] { cfg.command = "cohen-guess"; });

  // plam
  auto* pl = app.add_subcommand("plam", "poset of presented conditions");
  pl->require_subcommand(1);
  auto* ps = pl->add_subcommand("stronger", "order test");
  ps->add_option("p", cfg.input, "weaker condition file")->required();
  ps->add_option("q", cfg.input2, "stronger condition file")->required();
  add_json(ps);
  ps->callback([&] { cfg.command = "plam-stronger"; });
  auto* pa = pl->add_subcommand("amalgam", "compatibility and amalgam");
  pa->add_option("p", cfg.input, "first condition file")->required();
  pa->add_option("q", cfg.input2, "second condition file")->required();
  pa->add_option("--out", cfg.out_path, "write the amalgam here");
  add_json(pa);
  pa->callback([&] { cfg.command = "plam-amalgam"; });
  auto* px = pl->add_subcommand("split", "chain and antichain extensions");
  px->add_option("--base", cfg.base_dir, "directory of condition files")
      ->required();
  px->add_option("--fresh", cfg.fresh, "fresh indices, e.g. a1,a4,a9")
      ->required();
  px->add_option("--out", cfg.out_path, "output directory");
  add_json(px);
  px->callback([&] { cfg.command = "plam-split"; });
  auto* pli = pl->add_subcommand("limit", "colimit of a coherent system");
  pli->add_option("--system", cfg.system_dir, "directory of condition files")
      ->required();
  pli->add_option("--out", cfg.out_path, "write the limit here");
  add_json(pli);
  pli->callback([&] { cfg.command = "plam-limit"; });

  CLI11_PARSE(app, argc, argv);

  try {
    return emit(morstone::cli::run(cfg), as_json);
  } catch (const morstone::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
