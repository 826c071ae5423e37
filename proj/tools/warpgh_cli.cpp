// warpgh command-line front end.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "warpgh/report/commands.hpp"

using namespace warpgh;

int main(int argc, char** argv) {
  CLI::App app{"Warped-product Ricci models, GH bounds and puncture ledgers"};
  app.require_subcommand(1, 1);
  std::string config, out = "out";
  uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", config, "key = value configuration file");
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const report::RunContext&);
  };
  const Sub subs[] = {
      {"build-model", "build and certify the local model bundle", report::cmd_build_model},
      {"verify", "certify a stored profile against a Ricci lower bound", report::cmd_verify},
      {"gh", "Gromov-Hausdorff bounds, collapse and cone tables", report::cmd_gh},
      {"punctures", "run the puncture induction and write its ledger", report::cmd_punctures},
      {"report", "summarize an output directory", report::cmd_report},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : report::kExitValidation;
  }

  try {
    report::RunContext ctx;
    if (!config.empty()) ctx.cfg = report::RunConfig::load(config);
    if (seed_opt->count() > 0) ctx.cfg.set("seed", std::to_string(seed));
    ctx.cfg.allow("seed");
    ctx.out = out;
    ctx.threads = threads;
    for (const auto& s : subs)
      if (app.got_subcommand(s.name)) return s.run(ctx);
  } catch (const Error& e) {
    std::cerr << report::error_json(e) << "\n";
    return report::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << report::error_json(Error(ErrorKind::Contract, "cli_reports", "main", e.what())) << "\n";
    return report::kExitComputation;
  }
  return report::kExitValidation;
}
