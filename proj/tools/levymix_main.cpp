// levymix: simulation and verification driver for spectral-Galerkin SPDE
// models driven by degenerate heavy-tailed jump noise.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "levymix/config.hpp"
#include "levymix/levy_noise.hpp"
#include "levymix/output.hpp"
#include "levymix/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{std::string(levymix::kVersion) +
               " - coupled simulation and verification for jump-driven mode systems"};
  app.require_subcommand(1);

  std::string config_path;
  levymix::RunOptions opts;
  std::uint64_t seed_arg = 0;
  int replicas_arg = 0;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"validate", "check the standing assumptions and report the derived constants"},
      {"simulate", "single-process path ensemble with path statistics"},
      {"couple", "coupled-chain ensemble with stopping-time records"},
      {"mix", "coupled two-start mixing-gap estimate with exponential fit"},
      {"verify", "run every verifier and emit the full report"},
      {"tv", "overlap tables over a separation grid, deterministic vs Monte Carlo"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "configuration file (sectioned key=value)")
        ->required();
    sub->add_option("--seed", seed_arg, "override [verification] seed");
    sub->add_option("--replicas", replicas_arg, "override [verification] replicas");
    sub->add_option("--threads", opts.threads, "worker threads (outputs are thread-count independent)");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--set", opts.overrides, "override section.key=value (repeatable)");
    sub->add_flag("--plots", opts.plots, "also emit gnuplot command files");
    if (name == "mix")
      sub->add_option("--gap0", opts.gap0, "initial separation on mode 1 (0 = identical start)");
    if (name == "verify")
      sub->add_option("--contraction-gap0", opts.contraction_gap0,
                      "starting gap for the one-step contraction check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? levymix::kExitOk : levymix::kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  for (const auto& [name, desc] : subs) {
    if (sub->get_name() != name) continue;
    try {
      if (sub->count("--seed")) opts.seed = seed_arg;
      if (sub->count("--replicas")) opts.replicas = replicas_arg;
      return levymix::run_subcommand(name, config_path, opts);
    } catch (const levymix::ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return levymix::kExitUsage;
    } catch (const levymix::DiagnosticError& e) {
      std::fprintf(stderr, "numerical diagnostic: %s\n", e.what());
      return levymix::kExitDiagnostic;
    } catch (const std::invalid_argument& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return levymix::kExitUsage;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return levymix::kExitUsage;
    }
  }
  return levymix::kExitUsage;
}
