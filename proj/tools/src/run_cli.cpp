#include <CLI11.hpp>
#include <fmt/format.h>
#include <iostream>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "adherence/cli/commands.hpp"

namespace adherence::cli {

int run_cli(int argc, char** argv) {
  CLI::App app{"Adherence prediction pipeline for smart sharps bin fleets"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool verbose = false;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--out", out_dir, "output directory (overrides config 'out')");
  app.add_option("--seed", seed, "master seed (overrides config 'seed')");
  app.add_option("--set", overrides, "extra key=value setting, applied after the file")
      ->take_all();
  app.add_flag("--verbose,-v", verbose, "debug logging");

  const std::pair<Command, const char*> commands[] = {
      {Command::Synth, "generate a synthetic fleet (units, schedule, drops, truth)"},
      {Command::Label, "label occasions and apply exclusion rules"},
      {Command::Features, "build history-window rows and rank features"},
      {Command::Train, "tune and fit the five-model voting ensemble"},
      {Command::Predict, "score held-out or single-day occasions with a saved ensemble"},
      {Command::Evaluate, "compare predictions with testing labels"},
      {Command::Sweep, "ROC AUC as a function of history length"},
      {Command::LearningCurve, "train/test metrics against training-set size"}};
  for (const auto& [cmd, help] : commands) {
    app.add_subcommand(std::string(to_string(cmd)), help)->fallthrough();
  }

  auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
  auto logger = std::make_shared<spdlog::logger>("adherence", sink);
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      fail(ErrorCode::ConfigInvalid, e.what());
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    RunConfig config;
    if (!config_path.empty()) apply_file(config, config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        fail(ErrorCode::ConfigInvalid, fmt::format("--set expects key=value, got '{}'", kv));
      }
      apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!out_dir.empty()) config.out = out_dir;
    if (seed) config.seed = *seed;

    const Command command = *parse_command(app.get_subcommands().front()->get_name());
    for (const auto& path : run_command(command, config)) spdlog::debug("wrote {}", path.string());
    return 0;
  } catch (const Error& e) {
    std::cerr << error_line(e) << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << error_line(Error(ErrorCode::Io, e.what())) << '\n';
    return exit_code(Error(ErrorCode::Io, e.what()));
  }
}

}  // namespace adherence::cli
