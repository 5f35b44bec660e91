#include "adherence/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>

#include "adherence/csv.hpp"
#include "adherence/error.hpp"
#include "adherence/labeling.hpp"
#include "adherence/metrics.hpp"
#include "adherence/parallel.hpp"
#include "adherence/rng.hpp"

namespace adherence {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

template <typename T>
void check_mix(const std::vector<std::pair<T, double>>& mix, std::string_view name) {
  if (mix.empty()) fail(ErrorCode::InvalidConfig, fmt::format("{} is empty", name));
  double total = 0.0;
  for (const auto& [value, p] : mix) {
    if (!is_probability(p)) fail(ErrorCode::InvalidConfig, fmt::format("{} has weight {}", name, p));
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidConfig, fmt::format("{} sums to {}, not 1", name, total));
  }
}

template <typename T>
const T& draw(const std::vector<std::pair<T, double>>& mix, Rng& rng) {
  std::vector<double> w;
  w.reserve(mix.size());
  for (const auto& [value, p] : mix) w.push_back(p);
  return mix[rng.categorical(w)].first;
}

std::string unit_name(std::size_t i, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(5, fmt::formatted_size("{}", n));
  return fmt::format("U{:0{}}", i + 1, width);
}

struct UnitOutput {
  UnitProfile profile;
  ScheduleSpec schedule;
  std::vector<DropEvent> drops;
  std::vector<int> states;
};

Instant uniform_between(Rng& rng, Instant lo, Instant hi) {
  const auto span = (hi - lo).count();
  if (span <= 0) return lo;
  return lo + Seconds{static_cast<long long>(rng.index(static_cast<std::size_t>(span)))};
}

UnitOutput generate_unit(const GeneratorConfig& c, std::size_t index) {
  Rng rng(derive_seed(c.seed, index));
  UnitOutput u;
  const std::string id = unit_name(index, c.n_units);

  const Frequency freq = draw(c.frequency_mix, rng);
  const Region region = draw(c.region_mix, rng);
  const double p = c.fixed_baseline ? *c.fixed_baseline : rng.beta(c.alpha, c.beta);

  // Place the last occasion so that its window closes by as_of while the
  // following occasion's window is still open.
  const double wma = c.wma_hours(freq);
  const Seconds half{hours_to_seconds(wma).count() / 2};
  const auto period_days = std::chrono::duration_cast<Days>(freq.period()).count();
  const Instant latest = start_of_day(c.as_of - half);
  const Instant last = latest - Days{static_cast<long long>(rng.index(static_cast<std::size_t>(period_days)))};
  const Instant start = last - freq.period() * static_cast<long long>(c.n_occasions - 1);

  u.schedule = {id, start, freq, wma};
  const std::vector<ScheduledOccasion> occasions = expand_schedule(u.schedule, last);

  u.states.resize(c.n_occasions);
  u.states[0] = rng.bernoulli(p) ? 1 : 0;
  for (std::size_t t = 1; t < c.n_occasions; ++t) {
    u.states[t] = rng.bernoulli(c.stickiness) ? u.states[t - 1] : (rng.bernoulli(p) ? 1 : 0);
  }

  const bool loading = rng.bernoulli(c.loading_rate);
  const bool unplugged = rng.bernoulli(c.unplug_rate);
  const bool deactivated = rng.bernoulli(c.deactivation_rate);

  u.profile.unit_id = id;
  u.profile.region = region;
  u.profile.activated_at = start - Days{1};
  u.profile.last_comm_at = c.as_of;
  if (unplugged) {
    const auto silent = 31 + static_cast<long long>(rng.index(30));
    u.profile.last_comm_at = c.as_of - Days{silent};
  }
  if (deactivated) {
    const ScheduledOccasion& occ = occasions[rng.index(occasions.size())];
    u.profile.deactivated_at = uniform_between(rng, start_of_day(occ.scheduled_time), occ.window_end);
  }

  const Seconds wma_s = hours_to_seconds(wma);
  const auto jitter_width = std::max<long long>(
      1, static_cast<long long>(std::floor(c.jitter_fraction * static_cast<double>(wma_s.count()))));
  for (std::size_t t = 0; t < occasions.size(); ++t) {
    const ScheduledOccasion& occ = occasions[t];
    std::optional<Instant> when;
    if (u.states[t] == 1) {
      const Instant lo = occ.scheduled_time - Seconds{jitter_width / 2};
      Instant d = lo + Seconds{static_cast<long long>(rng.index(static_cast<std::size_t>(jitter_width)))};
      d = std::clamp(d, occ.window_start, occ.window_end - Seconds{1});
      if (!rng.bernoulli(c.missing_rate)) when = d;
    } else if (rng.bernoulli(c.late_drop_rate)) {
      // Between this window's end and the next window's start, never after as_of.
      const Instant gap_end = std::min(occ.window_start + freq.period(), c.as_of);
      if (gap_end > occ.window_end) when = uniform_between(rng, occ.window_end, gap_end);
    }
    if (!when || *when > u.profile.last_comm_at) continue;
    DropEvent drop{id, *when, DropSource::Sensor, false};
    if (rng.bernoulli(c.self_reported_rate)) drop.source = DropSource::SelfReported;
    if (loading && t == 0) drop.loading_dose = true;
    u.drops.push_back(std::move(drop));
  }
  return u;
}

}  // namespace

double GeneratorConfig::wma_hours(const Frequency& f) const {
  for (const auto& [freq, hours] : wma_by_frequency) {
    if (freq == f) return hours;
  }
  const double period_hours = 24.0 * static_cast<double>(f.period().count());
  return std::min(144.0, period_hours);
}

void GeneratorConfig::validate() const {
  if (n_units == 0) fail(ErrorCode::InvalidConfig, "n_units must be positive");
  if (n_occasions == 0) fail(ErrorCode::InvalidConfig, "n_occasions must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    fail(ErrorCode::InvalidConfig, fmt::format("Beta({}, {}) needs positive shapes", alpha, beta));
  }
  if (fixed_baseline && !is_probability(*fixed_baseline)) {
    fail(ErrorCode::InvalidConfig, fmt::format("fixed baseline {} is not a probability", *fixed_baseline));
  }
  const std::pair<const char*, double> probs[] = {
      {"stickiness", stickiness},       {"jitter_fraction", jitter_fraction},
      {"late_drop_rate", late_drop_rate}, {"missing_rate", missing_rate},
      {"self_reported_rate", self_reported_rate}, {"loading_rate", loading_rate},
      {"unplug_rate", unplug_rate},     {"deactivation_rate", deactivation_rate}};
  for (const auto& [name, v] : probs) {
    if (!is_probability(v)) fail(ErrorCode::InvalidConfig, fmt::format("{} = {} is not in [0,1]", name, v));
  }
  check_mix(frequency_mix, "frequency mix");
  check_mix(region_mix, "region mix");
  for (const auto& [f, w] : frequency_mix) {
    if (f.period().count() <= 0) fail(ErrorCode::InvalidConfig, "frequency with non-positive period");
  }
  for (const auto& [f, hours] : wma_by_frequency) {
    // Wider windows would overlap and let one drop satisfy two occasions.
    if (!(hours > 0.0) || hours > 24.0 * static_cast<double>(f.period().count())) {
      fail(ErrorCode::InvalidConfig,
           fmt::format("window of {} h for {} must be positive and at most the period", hours,
                       to_string(f)));
    }
  }
}

GeneratorConfig GeneratorConfig::clean() const {
  GeneratorConfig c = *this;
  c.missing_rate = c.self_reported_rate = c.loading_rate = c.unplug_rate = c.deactivation_rate = 0.0;
  return c;
}

GeneratedFleet generate_fleet(const GeneratorConfig& config) {
  config.validate();
  std::vector<UnitOutput> units(config.n_units);
  parallel_for(config.n_units, [&](std::size_t i) { units[i] = generate_unit(config, i); });

  GeneratedFleet fleet;
  fleet.as_of = config.as_of;
  for (UnitOutput& u : units) {
    for (std::size_t t = 0; t < u.states.size(); ++t) {
      fleet.truth.push_back({u.profile.unit_id, t, u.states[t]});
    }
    fleet.records.units.push_back(std::move(u.profile));
    fleet.records.schedules.push_back(std::move(u.schedule));
    for (DropEvent& d : u.drops) fleet.records.drops.push_back(std::move(d));
  }
  return fleet;
}

FleetCsv to_csv(const GeneratedFleet& fleet) {
  FleetCsv out;
  std::ostringstream units, schedule, drops, truth;
  CsvWriter uw(units);
  uw.write("unit_id", "region", "activated_at_utc", "deactivated_at_utc", "last_comm_at_utc");
  for (const UnitProfile& u : fleet.records.units) {
    uw.write(u.unit_id, to_string(u.region), format_instant(u.activated_at),
             u.deactivated_at ? format_instant(*u.deactivated_at) : std::string(),
             format_instant(u.last_comm_at));
  }
  CsvWriter sw(schedule);
  sw.write("unit_id", "start_date_utc", "frequency", "wma_hours");
  for (const ScheduleSpec& s : fleet.records.schedules) {
    sw.write(s.unit_id, format_date(s.start_date), to_string(s.frequency), s.wma_hours);
  }
  CsvWriter dw(drops);
  dw.write("unit_id", "timestamp_utc", "source", "loading_dose");
  for (const DropEvent& d : fleet.records.drops) {
    dw.write(d.unit_id, format_instant(d.timestamp), to_string(d.source), d.loading_dose ? 1 : 0);
  }
  CsvWriter tw(truth);
  tw.write("unit_id", "occasion_index", "latent_state");
  for (const TruthRow& t : fleet.truth) tw.write(t.unit_id, t.occasion_index, t.latent_state);
  out.units = units.str();
  out.schedule = schedule.str();
  out.drops = drops.str();
  out.truth = truth.str();
  return out;
}

std::vector<std::filesystem::path> write_fleet(const GeneratedFleet& fleet,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const FleetCsv csv = to_csv(fleet);
  const std::pair<const char*, const std::string*> files[] = {{"units.csv", &csv.units},
                                                              {"schedule.csv", &csv.schedule},
                                                              {"drops.csv", &csv.drops},
                                                              {"truth.csv", &csv.truth}};
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << *text;
    if (!out) fail(ErrorCode::Io, fmt::format("cannot write {}", path.string()));
    written.push_back(path);
  }
  return written;
}

namespace {

// Likelihood of a state sequence as sum_a w[a] p^a (1-p)^(n-a). Every
// factor is a non-negative combination of p and 1-p, so no cancellation.
std::vector<double> likelihood_weights(double s, std::span<const int> states) {
  std::vector<double> w{1.0};
  auto multiply = [&](double coef_p, double coef_q) {
    std::vector<double> next(w.size() + 1, 0.0);
    for (std::size_t a = 0; a < w.size(); ++a) {
      next[a + 1] += w[a] * coef_p;
      next[a] += w[a] * coef_q;
    }
    w = std::move(next);
  };
  multiply(states[0] == 1 ? 1.0 : 0.0, states[0] == 1 ? 0.0 : 1.0);
  for (std::size_t t = 1; t < states.size(); ++t) {
    const bool same = states[t] == states[t - 1];
    if (states[t] == 1) {
      // s*[same] + (1-s) p, written over p + (1-p) = 1
      multiply(same ? 1.0 : 1.0 - s, same ? s : 0.0);
    } else {
      multiply(same ? s : 0.0, same ? 1.0 : 1.0 - s);
    }
  }
  return w;
}

// E[p^a (1-p)^b] under the baseline prior.
double prior_moment(const GeneratorConfig& c, std::size_t a, std::size_t b) {
  if (c.fixed_baseline) {
    return std::pow(*c.fixed_baseline, static_cast<double>(a)) *
           std::pow(1.0 - *c.fixed_baseline, static_cast<double>(b));
  }
  const double da = static_cast<double>(a), db = static_cast<double>(b);
  return std::exp(std::lgamma(c.alpha + da) + std::lgamma(c.beta + db) - std::lgamma(c.alpha + c.beta + da + db) -
                  std::lgamma(c.alpha) - std::lgamma(c.beta) + std::lgamma(c.alpha + c.beta));
}

// (P(states), P(states, next = 1))
std::pair<double, double> joint(const GeneratorConfig& c, std::span<const int> states) {
  const std::vector<double> w = likelihood_weights(c.stickiness, states);
  const std::size_t n = states.size();
  double z = 0.0, zp = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (w[a] == 0.0) continue;
    z += w[a] * prior_moment(c, a, n - a);
    zp += w[a] * prior_moment(c, a + 1, n - a);
  }
  const double s = c.stickiness;
  const double next_on = s * (states.back() == 1 ? z : 0.0) + (1.0 - s) * zp;
  return {z, next_on};
}

}  // namespace

double bayes_posterior(const GeneratorConfig& config, std::span<const int> states) {
  if (states.empty()) fail(ErrorCode::InvalidConfig, "posterior needs at least one state");
  const auto [z, on] = joint(config, states);
  return z > 0.0 ? on / z : 0.0;
}

BayesAuc bayes_optimal_auc(const GeneratorConfig& config, std::size_t n_mc, std::size_t k,
                           std::uint64_t seed) {
  config.validate();
  if (n_mc < 100000) fail(ErrorCode::InvalidConfig, fmt::format("n_mc = {} is below 1e5", n_mc));
  if (k == 0 || k > 30) fail(ErrorCode::InvalidConfig, fmt::format("history length {} out of range", k));

  std::map<std::vector<int>, double> cache;
  auto posterior = [&](const std::vector<int>& states) {
    const auto it = cache.find(states);
    if (it != cache.end()) return it->second;
    return cache[states] = bayes_posterior(config, states);
  };

  constexpr std::size_t kBatches = 20;
  std::vector<double> scores(n_mc);
  std::vector<int> truth(n_mc);
  std::vector<std::vector<int>> histories(n_mc);
  parallel_for(kBatches, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    for (std::size_t i = b * n_mc / kBatches; i < (b + 1) * n_mc / kBatches; ++i) {
      const double p = config.fixed_baseline ? *config.fixed_baseline : rng.beta(config.alpha, config.beta);
      std::vector<int> states(k);
      states[0] = rng.bernoulli(p) ? 1 : 0;
      for (std::size_t t = 1; t < k; ++t) {
        states[t] = rng.bernoulli(config.stickiness) ? states[t - 1] : (rng.bernoulli(p) ? 1 : 0);
      }
      truth[i] = rng.bernoulli(config.stickiness) ? states[k - 1] : (rng.bernoulli(p) ? 1 : 0);
      histories[i] = std::move(states);
    }
  });
  for (std::size_t i = 0; i < n_mc; ++i) scores[i] = posterior(histories[i]);

  BayesAuc out;
  out.samples = n_mc;
  out.auc = roc_auc(scores, truth);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t b = 0; b < kBatches; ++b) {
    const std::size_t lo = b * n_mc / kBatches, hi = (b + 1) * n_mc / kBatches;
    const double a = roc_auc(std::span<const double>(scores).subspan(lo, hi - lo),
                             std::span<const int>(truth).subspan(lo, hi - lo));
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / kBatches;
  const double var = std::max(0.0, (sum_sq - kBatches * mean * mean) / (kBatches - 1));
  out.standard_error = std::sqrt(var / kBatches);
  return out;
}

double bayes_optimal_auc_exact(const GeneratorConfig& config, std::size_t k) {
  config.validate();
  if (k == 0 || k > 20) fail(ErrorCode::InvalidConfig, fmt::format("history length {} out of range", k));
  struct Cell {
    double score, pos, neg;
  };
  std::vector<Cell> cells;
  std::vector<int> states(k);
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    for (std::size_t t = 0; t < k; ++t) states[t] = static_cast<int>((mask >> t) & 1U);
    const auto [z, on] = joint(config, states);
    if (z <= 0.0) continue;
    cells.push_back({on / z, on, z - on});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.score < b.score; });
  // P(score of a positive > score of a negative) + half the tie mass.
  double total_pos = 0.0, total_neg = 0.0;
  for (const Cell& c : cells) {
    total_pos += c.pos;
    total_neg += c.neg;
  }
  if (total_pos <= 0.0 || total_neg <= 0.0) fail(ErrorCode::InvalidConfig, "generator yields a single class");
  double below_neg = 0.0, area = 0.0;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    double pos = 0.0, neg = 0.0;
    while (j < cells.size() && std::abs(cells[j].score - cells[i].score) <= 1e-15) {
      pos += cells[j].pos;
      neg += cells[j].neg;
      ++j;
    }
    area += pos * (below_neg + 0.5 * neg);
    below_neg += neg;
    i = j;
  }
  return area / (total_pos * total_neg);
}

}  // namespace adherence
