#include <CLI11.hpp>

#include <iostream>

#include "zest_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"zest: normalizing-constant estimators for multiple importance sampling"};
  app.require_subcommand(1);

  zest::cli::CliInvocation inv;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out,-o", inv.output_path, "Output CSV path (default: standard output)");
    sub->add_option("--workers,-j", inv.workers, "Worker threads (0 = hardware concurrency)");
  };
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config,-c", inv.config_path, "YAML experiment configuration")->required();
    sub->add_option("--override", inv.overrides, "Override a config key, KEY=VALUE (repeatable)")
        ->take_all();
  };

  CLI::App* run = app.add_subcommand("run", "Run an experiment and write one CSV row per replicate and estimator");
  add_config(run);
  add_common(run);

  CLI::App* oracle = app.add_subcommand("oracle", "Print reference quantities computed by quadrature and enumeration");
  add_config(oracle);
  add_common(oracle);

  CLI::App* summarize = app.add_subcommand("summarize", "Aggregate a results CSV per experiment and estimator");
  summarize->add_option("--in,-i", inv.input_path, "Results CSV written by 'run'")->required();
  add_common(summarize);

  CLI::App* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");
  add_common(selftest);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? zest::cli::kExitOk : zest::cli::kExitConfig;
  }

  for (CLI::App* sub : {run, oracle, summarize, selftest})
    if (sub->parsed()) inv.subcommand = sub->get_name();

  try {
    return zest::cli::dispatch(inv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return zest::cli::kExitFailure;
  }
}
