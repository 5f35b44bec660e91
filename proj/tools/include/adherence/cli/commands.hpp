#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adherence/cli/config.hpp"
#include "adherence/error.hpp"

namespace adherence::cli {

enum class Command { Synth, Label, Features, Train, Predict, Evaluate, Sweep, LearningCurve };

std::string_view to_string(Command c) noexcept;
std::optional<Command> parse_command(std::string_view name);

/// Each command writes under config.out and returns the files it wrote.
std::vector<std::filesystem::path> cmd_synth(const RunConfig& config);
std::vector<std::filesystem::path> cmd_label(const RunConfig& config);
std::vector<std::filesystem::path> cmd_features(const RunConfig& config);
std::vector<std::filesystem::path> cmd_train(const RunConfig& config);
std::vector<std::filesystem::path> cmd_predict(const RunConfig& config);
std::vector<std::filesystem::path> cmd_evaluate(const RunConfig& config);
std::vector<std::filesystem::path> cmd_sweep(const RunConfig& config);
std::vector<std::filesystem::path> cmd_learning_curve(const RunConfig& config);

/// Validates the config, runs the command, then refreshes the manifest.
std::vector<std::filesystem::path> run_command(Command command, const RunConfig& config);

/// 2 config, 3 data, 4 model.
int exit_code(const Error& e) noexcept;

/// Single-line JSON: {"error":"<code>","category":"<cat>","message":"..."}
std::string error_line(const Error& e);

/// Full command-line entry point; never throws.
int run_cli(int argc, char** argv);

}  // namespace adherence::cli
