#include <CLI11.hpp>
#include <iostream>

#include "dqr/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deep quantile and deep composite regression"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
  };
  std::map<std::string, SubArgs> args;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Generate a synthetic dataset with closed-form truth"},
      {"fit-quantiles", "Fit a deep multiple quantile regression"},
      {"fit-composite", "Fit a deep composite regression at one level tau"},
      {"select-phi", "Data-driven selection of the composite scoring function"},
      {"evaluate", "Calibration report of a model or prediction file"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    auto& a = args[name];
    sub->add_option("--config", a.config, "Run configuration (key = value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", a.seed, "Override the config seed");
    sub->add_option("--out", a.out, "Override the report output path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const SubArgs& a = args[name];
  return dqr::cli::run_command(name, {a.config, a.seed, a.out}, std::cerr);
}
