#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace levymix {

// Exit codes shared by the library runner and the CLI binary.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerificationFailure = 2;
inline constexpr int kExitDiagnostic = 3;

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  int threads = 1;
  std::filesystem::path out_dir = "out";
  std::vector<std::string> overrides;  // section.key=value
  bool plots = false;
  double gap0 = 1.0;       // mix: initial mode-1 separation (0 = identical start)
  double contraction_gap0 = 1e-3;  // verify: one-step contraction start gap
};

// name: validate | simulate | couple | mix | verify | tv. Returns an exit
// code; configuration and usage problems throw ConfigError out of here.
int run_subcommand(const std::string& name, const std::filesystem::path& config_path,
                   const RunOptions& opts);

}  // namespace levymix
