#pragma once

// Command-line front end:
//
//   gwrw simulate|verify|sweep|network --config PATH [--seed U64]
//        [--threads N] [--out DIR] [--trajectory-stride K]
//
// Exit codes: 0 success, 1 verification failure, 2 configuration, usage or
// output-directory error, 3 unexpected internal error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gwrw/config.hpp"
#include "gwrw/experiment.hpp"
#include "gwrw/format.hpp"

namespace gwrw {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInternalError = 3;

/// Output directory precedence: --out, then GWRW_OUT_DIR, then output.dir.
inline std::string resolve_output_dir(const ExperimentConfig& cfg, const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GWRW_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return cfg.out_dir;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Random walks on Galton-Watson trees with random conductances", "gwrw"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::string> out;
    std::optional<std::size_t> stride;
  } flags;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "run replicas and estimate speed and volatility"},
      {"verify", "run the oracle checks and report pass/fail"},
      {"sweep", "estimate speed and volatility over a list of epsilons"},
      {"network", "dump a frozen truncation and its conductance computations"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", flags.config, "experiment config file")->required();
    sub->add_option("--seed", flags.seed, "seed (overrides run.seed)");
    sub->add_option("--threads", flags.threads, "worker threads (overrides run.threads)")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "output directory (overrides GWRW_OUT_DIR and output.dir)");
    if (name == "simulate") {
      sub->add_option("--trajectory-stride", flags.stride, "export every K-th step of replica 0 (0 disables)");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "gwrw: " << e.what() << '\n';
    return kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    ExperimentConfig cfg = load_config(flags.config);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.threads) cfg.threads = *flags.threads;
    if (flags.stride) cfg.trajectory_stride = *flags.stride;
    (void)cfg.require_seed();
    const std::filesystem::path dir = resolve_output_dir(cfg, flags.out);

    if (command == "simulate") {
      const auto s = run_simulate(cfg, dir);
      out << "v_naive = " << format_double(s.naive.value);
      if (s.regen) out << "  v = " << format_double(s.regen->value);
      if (s.volatility) out << "  sigma2 = " << format_double(s.volatility->value);
      out << "  pairs = " << s.pairs << '\n';
    } else if (command == "sweep") {
      const auto table = run_sweep(cfg, dir);
      out << "(1-alpha)m = " << format_double(table.t1_mean_offspring)
          << (table.t1_supercritical ? " > 1" : " <= 1") << '\n';
      for (const auto& r : table.rows) {
        out << "epsilon = " << format_double(r.epsilon) << "  v = " << format_double(r.speed.value)
            << "  sigma2 = " << format_double(r.volatility.value) << " [" << format_double(r.volatility.ci_low)
            << ", " << format_double(r.volatility.ci_high) << "]  pairs = " << r.pairs << '\n';
      }
    } else if (command == "network") {
      const auto s = run_network(cfg, dir);
      out << "vertices = " << s.vertices << "  return probability = " << format_double(s.return_probability)
          << "  solver = " << format_double(s.solver_value) << '\n';
    } else {
      const auto report = run_verify(cfg, dir);
      for (const auto& c : report.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "  observed = " << format_double(c.observed)
            << "  tolerance = " << format_double(c.tolerance) << '\n';
      }
      if (!report.passed()) return kExitVerifyFailed;
    }
    out << "outputs written to " << dir.string() << '\n';
    return kExitSuccess;
  } catch (const ConfigError& e) {
    err << "gwrw: config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const OutputError& e) {
    err << "gwrw: output error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "gwrw: config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "gwrw: internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace gwrw
