#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adherence/domain.hpp"
#include "adherence/ingest.hpp"

namespace adherence {

/// Parameters of a synthetic bin fleet. Each unit draws a baseline
/// adherence p ~ Beta(alpha, beta) (or uses fixed_baseline), starts in
/// state ~ Bernoulli(p), and then repeats its last state with probability
/// `stickiness` or redraws from Bernoulli(p).
struct GeneratorConfig {
  std::size_t n_units = 1000;
  std::size_t n_occasions = 30;
  std::uint64_t seed = 0;

  double alpha = 6.0;
  double beta = 2.0;
  std::optional<double> fixed_baseline;
  double stickiness = 0.85;

  std::vector<std::pair<Frequency, double>> frequency_mix{{Frequency::weekly(), 0.6},
                                                          {Frequency::biweekly(), 0.2},
                                                          {Frequency::monthly28d(), 0.1},
                                                          {Frequency::daily(), 0.1}};
  std::vector<std::pair<Region, double>> region_mix{
      {Region::NA, 0.4}, {Region::EU, 0.3}, {Region::AS, 0.15}, {Region::OC, 0.1}, {Region::SA, 0.05}};

  /// Drops land uniformly in the central `jitter_fraction` of the window.
  double jitter_fraction = 1.0;
  /// Probability that a NotOnTime state leaves a late drop between windows
  /// instead of no drop at all.
  double late_drop_rate = 0.3;

  // contamination
  double missing_rate = 0.01;        // OnTime state whose drop is never recorded
  double self_reported_rate = 0.02;  // per recorded drop
  double loading_rate = 0.05;        // per unit: first drop flagged as loading dose
  double unplug_rate = 0.02;         // per unit: silent for more than 30 days at as_of
  double deactivation_rate = 0.01;   // per unit: deactivated during one occasion

  /// Reference "now": every unit's last labelable window closes by then.
  Instant as_of = make_instant(2020, 6, 1);

  /// Window widths by frequency; others get 144 h capped at the period.
  std::vector<std::pair<Frequency, double>> wma_by_frequency;

  double wma_hours(const Frequency& f) const;

  /// Throws InvalidConfig.
  void validate() const;

  /// Same dynamics with all contamination rates at zero.
  GeneratorConfig clean() const;
};

struct TruthRow {
  std::string unit_id;
  std::size_t occasion_index = 0;
  int latent_state = 0;  // 1 = OnTime
};

struct GeneratedFleet {
  FleetRecords records;
  std::vector<TruthRow> truth;
  Instant as_of;
};

/// Same config and seed give identical output regardless of thread count.
GeneratedFleet generate_fleet(const GeneratorConfig& config);

struct FleetCsv {
  std::string units;
  std::string schedule;
  std::string drops;
  std::string truth;
};

FleetCsv to_csv(const GeneratedFleet& fleet);

/// Writes units.csv, schedule.csv, drops.csv and truth.csv into `dir`.
/// Returns the paths written, in that order.
std::vector<std::filesystem::path> write_fleet(const GeneratedFleet& fleet,
                                               const std::filesystem::path& dir);

/// Exact P(next state = OnTime | last k states), oldest first in `states`.
double bayes_posterior(const GeneratorConfig& config, std::span<const int> states);

struct BayesAuc {
  double auc = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo AUC of the Bayes posterior against realized next states on
/// windows of k states drawn from the generator's law. The standard error
/// comes from 20 independent batches. Throws InvalidConfig for n_mc < 1e5.
BayesAuc bayes_optimal_auc(const GeneratorConfig& config, std::size_t n_mc, std::size_t k,
                           std::uint64_t seed);

/// Population AUC of the Bayes posterior by enumerating all 2^k histories.
double bayes_optimal_auc_exact(const GeneratorConfig& config, std::size_t k);

}  // namespace adherence
