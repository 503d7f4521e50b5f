// Command-line front end: run, verify, analyze, sweep.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mqg/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dissipative modified quasi-geostrophic solver and regularity checks"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "Integrate a configuration, writing snapshots and diag.csv");
  run->add_option("config", run_config, "key = value run configuration")->required();

  std::string suite;
  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "Run a named check suite");
  verify->add_option("suite", suite, "operators|lemma|paraproduct|energy|decay|scaling|bootstrap|all")
      ->required();
  verify->add_option("config", verify_config, "optional key = value overrides");

  std::string snapshot;
  std::vector<std::string> besov;
  std::vector<double> holder, blocks;
  std::string profile = "smooth";
  auto* analyze = app.add_subcommand("analyze", "Print norms of a stored snapshot as CSV");
  analyze->add_option("snapshot", snapshot, "snapshot file")->required();
  analyze->add_option("--besov", besov, "s,p (q = inf)")->take_all();
  analyze->add_option("--holder", holder, "Hoelder exponent in (0,1)")->take_all();
  analyze->add_option("--blocks", blocks, "L^p norm of every shell")->take_all();
  analyze->add_option("--profile", profile, "smooth|sharp")->check(CLI::IsMember({"smooth", "sharp"}));

  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Bootstrap experiment over a parameter grid");
  sweep->add_option("config", sweep_config, "key = value sweep configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : mqg::cli::kConfigError;
  }

  if (*run) return mqg::cli::cmd_run(run_config, std::cout, std::cerr);
  if (*verify) {
    std::optional<std::filesystem::path> cfg;
    if (!verify_config.empty()) cfg = verify_config;
    return mqg::cli::cmd_verify(suite, cfg, std::cout, std::cerr);
  }
  if (*analyze) {
    mqg::cli::AnalyzeRequest req;
    try {
      for (const auto& b : besov) req.besov.push_back(mqg::cli::parse_besov_flag(b));
      req.profile = mqg::io::parse_profile(profile);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mqg::cli::kConfigError;
    }
    req.holder = holder;
    req.blocks = blocks;
    return mqg::cli::cmd_analyze(snapshot, req, std::cout, std::cerr);
  }
  if (*sweep) return mqg::cli::cmd_sweep(sweep_config, std::cout, std::cerr);
  return mqg::cli::kConfigError;
}
