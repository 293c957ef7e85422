#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace dqr::cli {

/// Flags shared by every subcommand: --config is the run configuration,
/// --seed and --out override the corresponding config keys.
struct CommandOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

/// Typed view over a parsed key = value run config. All keys are checked
/// against the command's allowed set and parsed before any computation
/// starts; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig(std::map<std::string, std::string> kv, std::set<std::string> allowed,
            std::set<std::string> required);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::vector<double> number_list(const std::string& key) const;
  std::vector<int> int_list_or(const std::string& key,
                               const std::vector<int>& fallback) const;

 private:
  std::map<std::string, std::string> kv_;
};

void cmd_simulate(const RunConfig& cfg);
void cmd_fit_quantiles(const RunConfig& cfg);
void cmd_fit_composite(const RunConfig& cfg);
void cmd_select_phi(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);

/// Load the config, apply the flag overrides and run one command.
/// Returns the process exit code: 0 success, 1 user error, 2 internal error.
/// Failures print a single-line diagnostic to `err`.
int run_command(const std::string& name, const CommandOptions& opts,
                std::ostream& err);

}  // namespace dqr::cli
