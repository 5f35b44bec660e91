#include "adherence/cli/config.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "adherence/error.hpp"

namespace adherence::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view text, char sep = ',') {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    const std::string_view item = trim(text.substr(pos, next - pos));
    if (!item.empty()) out.emplace_back(item);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  fail(ErrorCode::ConfigInvalid, fmt::format("{} = '{}': {}", key, value, why));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad(key, value, "not a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  bad(key, value, "expected true or false");
}

Instant parse_time(std::string_view key, std::string_view value) {
  const auto t = try_parse_instant(value);
  if (!t) bad(key, value, "expected YYYY-MM-DD or YYYY-MM-DDThh:mm:ssZ");
  return *t;
}

// "weekly:0.6, daily:0.4"
template <typename T, typename Parse>
std::vector<std::pair<T, double>> parse_mix(std::string_view key, std::string_view value,
                                            Parse parse) {
  std::vector<std::pair<T, double>> mix;
  for (const std::string& item : split_list(value)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) bad(key, value, "expected name:weight pairs");
    mix.emplace_back(parse(trim(std::string_view(item).substr(0, colon))),
                     parse_number<double>(key, trim(std::string_view(item).substr(colon + 1))));
  }
  return mix;
}

ModelKind kind_of(std::string_view key, std::string_view name) {
  try {
    return parse_model_kind(name);
  } catch (const Error&) {
    fail(ErrorCode::ConfigInvalid, fmt::format("{}: unknown model kind '{}'", key, name));
  }
}

void apply_synth(GeneratorConfig& g, std::string_view key, std::string_view name,
                 std::string_view value) {
  if (name == "n_units") g.n_units = parse_number<std::size_t>(key, value);
  else if (name == "n_occasions") g.n_occasions = parse_number<std::size_t>(key, value);
  else if (name == "alpha") g.alpha = parse_number<double>(key, value);
  else if (name == "beta") g.beta = parse_number<double>(key, value);
  else if (name == "fixed_baseline") {
    if (value == "none") g.fixed_baseline.reset();
    else g.fixed_baseline = parse_number<double>(key, value);
  }
  else if (name == "stickiness") g.stickiness = parse_number<double>(key, value);
  else if (name == "jitter_fraction") g.jitter_fraction = parse_number<double>(key, value);
  else if (name == "late_drop_rate") g.late_drop_rate = parse_number<double>(key, value);
  else if (name == "missing_rate") g.missing_rate = parse_number<double>(key, value);
  else if (name == "self_reported_rate") g.self_reported_rate = parse_number<double>(key, value);
  else if (name == "loading_rate") g.loading_rate = parse_number<double>(key, value);
  else if (name == "unplug_rate") g.unplug_rate = parse_number<double>(key, value);
  else if (name == "deactivation_rate") g.deactivation_rate = parse_number<double>(key, value);
  else if (name == "as_of") g.as_of = parse_time(key, value);
  else if (name == "frequency_mix") {
    g.frequency_mix = parse_mix<Frequency>(key, value, [&](std::string_view f) {
      try {
        return parse_frequency(f);
      } catch (const Error& e) {
        bad(key, value, e.what());
      }
    });
  } else if (name == "region_mix") {
    g.region_mix = parse_mix<Region>(key, value, [&](std::string_view r) {
      try {
        return parse_region(r);
      } catch (const Error& e) {
        bad(key, value, e.what());
      }
    });
  } else {
    fail(ErrorCode::ConfigInvalid, fmt::format("unknown setting '{}'", key));
  }
}

}  // namespace

std::filesystem::path RunConfig::input(std::string_view name) const {
  return out / fmt::format("{}.csv", name);
}
std::filesystem::path RunConfig::drops_path() const { return drops.empty() ? input("drops") : drops; }
std::filesystem::path RunConfig::schedule_path() const {
  return schedule.empty() ? input("schedule") : schedule;
}
std::filesystem::path RunConfig::units_path() const { return units.empty() ? input("units") : units; }
std::filesystem::path RunConfig::model_path() const {
  return model_file.empty() ? out / "ensemble.json" : model_file;
}
std::filesystem::path RunConfig::predictions_path() const {
  return predictions.empty() ? input("predictions") : predictions;
}
std::filesystem::path RunConfig::testing_path() const {
  return testing.empty() ? input("testing") : testing;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  const auto dot = key.find('.');
  const std::string_view head = key.substr(0, dot);
  const std::string_view rest = dot == std::string_view::npos ? std::string_view{} : key.substr(dot + 1);

  if (key == "out") c.out = std::string(value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "drops") c.drops = std::string(value);
  else if (key == "schedule") c.schedule = std::string(value);
  else if (key == "units") c.units = std::string(value);
  else if (key == "as_of") c.as_of = parse_time(key, value);
  else if (key == "k") c.k = parse_number<std::size_t>(key, value);
  else if (key == "split_ratio") c.split_ratio = parse_number<double>(key, value);
  else if (key == "holdout_occasions") c.holdout_occasions = parse_number<std::size_t>(key, value);
  else if (key == "undersample") c.undersample = parse_bool(key, value);
  else if (key == "model_file") c.model_file = std::string(value);
  else if (key == "predictions") c.predictions = std::string(value);
  else if (key == "testing") c.testing = std::string(value);
  else if (key == "predict_day") c.predict_day = start_of_day(parse_time(key, value));
  else if (key == "sweep.k_min") c.sweep_k_min = parse_number<std::size_t>(key, value);
  else if (key == "sweep.k_max") c.sweep_k_max = parse_number<std::size_t>(key, value);
  else if (key == "curve.points") c.curve_points = parse_number<std::size_t>(key, value);
  else if (key == "curve.sizes") {
    c.curve_sizes.clear();
    for (const std::string& s : split_list(value)) c.curve_sizes.push_back(parse_number<std::size_t>(key, s));
  } else if (key == "tune.folds") c.tune.folds = parse_number<std::size_t>(key, value);
  else if (key == "tune.n_iter") c.tune.n_iter = parse_number<std::size_t>(key, value);
  else if (key == "tune.mode") {
    if (value == "grid") c.tune.mode = SearchMode::Grid;
    else if (value == "random") c.tune.mode = SearchMode::Random;
    else bad(key, value, "expected grid or random");
  } else if (head == "wma") {
    Frequency f;
    try {
      f = parse_frequency(rest);
    } catch (const Error& e) {
      bad(key, value, e.what());
    }
    const double hours = parse_number<double>(key, value);
    std::erase_if(c.synth.wma_by_frequency, [&](const auto& p) { return p.first == f; });
    c.synth.wma_by_frequency.emplace_back(f, hours);
  } else if (key == "synth.seed") {
    c.synth_seed = parse_number<std::uint64_t>(key, value);
  } else if (head == "synth") {
    apply_synth(c.synth, key, rest, value);
  } else if (head == "model" || head == "search") {
    const auto dot2 = rest.find('.');
    if (dot2 == std::string_view::npos) {
      fail(ErrorCode::ConfigInvalid, fmt::format("'{}' needs the form {}.<kind>.<param>", key, head));
    }
    const ModelKind kind = kind_of(key, rest.substr(0, dot2));
    const std::string param(rest.substr(dot2 + 1));
    auto [it, inserted] = c.models.try_emplace(kind, ModelConfig::defaults(kind));
    try {
      if (head == "model") {
        set_param(it->second, param, value);
      } else {
        std::vector<std::string> values = split_list(value);
        if (values.empty()) bad(key, value, "empty search list");
        ModelConfig probe = it->second;
        for (const std::string& v : values) set_param(probe, param, v);
        auto& params = c.search[kind].params;
        std::erase_if(params, [&](const auto& p) { return p.first == param; });
        params.emplace_back(param, std::move(values));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigInvalid) throw;
      fail(ErrorCode::ConfigInvalid, fmt::format("{}: {}", key, e.what()));
    }
  } else {
    fail(ErrorCode::ConfigInvalid, fmt::format("unknown setting '{}'", key));
  }
}

void apply_text(RunConfig& config, std::string_view text, std::string_view file) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    std::string_view line = text.substr(pos, next - pos);
    ++line_no;
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::ConfigInvalid, fmt::format("{}:{}: expected key = value", file, line_no));
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(ErrorCode::ConfigInvalid, fmt::format("{}:{}: {}", file, line_no, e.what()));
    }
  }
}

void apply_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigInvalid, fmt::format("cannot read config file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  apply_text(config, buf.str(), path.string());
}

void validate(const RunConfig& c) {
  if (c.k < 1) fail(ErrorCode::ConfigInvalid, "k must be at least 1");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    fail(ErrorCode::ConfigInvalid, fmt::format("split_ratio {} must be in (0,1)", c.split_ratio));
  }
  if (c.sweep_k_min < 1 || c.sweep_k_max < c.sweep_k_min) {
    fail(ErrorCode::ConfigInvalid,
         fmt::format("sweep range {}..{} is empty", c.sweep_k_min, c.sweep_k_max));
  }
  if (c.tune.folds < 2) fail(ErrorCode::ConfigInvalid, "tune.folds must be at least 2");
  if (c.curve_points < 1) fail(ErrorCode::ConfigInvalid, "curve.points must be at least 1");
  for (const auto& [kind, model] : c.models) {
    try {
      model.validate();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigInvalid, fmt::format("model.{}: {}", to_string(kind), e.what()));
    }
  }
  try {
    c.synth.validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigInvalid, fmt::format("synth: {}", e.what()));
  }
}

}  // namespace adherence::cli
