#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adherence/learners/model_config.hpp"
#include "adherence/learners/tuning.hpp"
#include "adherence/synthgen.hpp"
#include "adherence/time.hpp"

namespace adherence::cli {

/// Everything a command needs. Built from a `key = value` file, then
/// `--set` overrides, then the dedicated flags.
struct RunConfig {
  std::filesystem::path out = "run";
  std::uint64_t seed = 0;

  // inputs; empty means <out>/<name>.csv
  std::filesystem::path drops;
  std::filesystem::path schedule;
  std::filesystem::path units;

  std::optional<Instant> as_of;  // default: latest last_comm_at in the units file
  std::size_t k = 6;
  double split_ratio = 0.8;
  /// Each unit's last N closed occasions are held out of training and
  /// become the prediction targets.
  std::size_t holdout_occasions = 2;
  bool undersample = false;

  std::map<ModelKind, ModelConfig> models;
  std::map<ModelKind, SearchSpace> search;
  TuneOptions tune;

  std::size_t sweep_k_min = 5;
  std::size_t sweep_k_max = 14;

  std::size_t curve_points = 5;
  std::vector<std::size_t> curve_sizes;  // overrides curve_points when set

  std::filesystem::path model_file;   // default <out>/ensemble.json
  std::filesystem::path predictions;  // default <out>/predictions.csv
  std::filesystem::path testing;      // default <out>/testing.csv
  std::optional<Instant> predict_day;

  GeneratorConfig synth;
  std::optional<std::uint64_t> synth_seed;  // default: seed

  std::filesystem::path input(std::string_view name) const;
  std::filesystem::path drops_path() const;
  std::filesystem::path schedule_path() const;
  std::filesystem::path units_path() const;
  std::filesystem::path model_path() const;
  std::filesystem::path predictions_path() const;
  std::filesystem::path testing_path() const;
};

/// Applies one setting. Throws ConfigInvalid for unknown keys or bad
/// values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses the config grammar: one `key = value` per line, `#` starts a
/// comment, blank lines ignored. `file` names the source in errors.
void apply_text(RunConfig& config, std::string_view text, std::string_view file = "<config>");
void apply_file(RunConfig& config, const std::filesystem::path& path);

/// Cross-field checks (k, ratio, sweep range, generator config).
void validate(const RunConfig& config);

}  // namespace adherence::cli
