#pragma once

// Hand-built inputs shared by unit tests and the acceptance binary.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "adherence/domain.hpp"
#include "adherence/features.hpp"
#include "adherence/ingest.hpp"
#include "adherence/learners/mlp.hpp"
#include "adherence/pipeline.hpp"
#include "adherence/rng.hpp"
#include "adherence/synthgen.hpp"
#include "adherence/time.hpp"
#include "oracles.hpp"

namespace fixture {

struct SixUnits {
  std::string drops;
  std::string schedule;
  std::string units;
  adherence::Instant as_of;
  // unit -> (occasion time, rule) pairs expected in the exclusion log
  std::map<std::string, std::vector<std::pair<adherence::Instant, adherence::ExclusionRule>>>
      expected;
};

// Weekly schedules from 2019-01-05 with 144 h windows, as_of 2019-03-01:
// eight closed occasions per unit (Jan 5 .. Feb 23).
//   U1 silent since Jan 29 (31 days)           -> all eight Unplugged
//   U2 deactivated 2019-02-10T12:00Z           -> Feb 9 Deactivated
//   U3 Jan 19 drop self-reported               -> Jan 19 SelfReported
//   U4 first drop flagged as loading dose      -> Jan 5 LoadingDose
//   U5, U6 clean (U6 misses Jan 26)            -> nothing
inline SixUnits six_units() {
  using namespace adherence;
  SixUnits f;
  f.as_of = make_instant(2019, 3, 1);
  const Instant start = make_instant(2019, 1, 5);
  std::vector<Instant> occ;
  for (int i = 0; i < 8; ++i) occ.push_back(start + Days(7 * i));

  f.units = std::string(kUnitsHeader) + "\n";
  f.units += "U1,NA,2018-12-01T00:00:00Z,,2019-01-29T00:00:00Z\n";
  f.units += "U2,EU,2018-12-01T00:00:00Z,2019-02-10T12:00:00Z,2019-02-28T00:00:00Z\n";
  f.units += "U3,AS,2018-12-01T00:00:00Z,,2019-02-28T00:00:00Z\n";
  f.units += "U4,OC,2018-12-01T00:00:00Z,,2019-02-28T00:00:00Z\n";
  f.units += "U5,NA,2018-12-01T00:00:00Z,,2019-02-28T00:00:00Z\n";
  f.units += "U6,SA,2018-12-01T00:00:00Z,,2019-02-28T00:00:00Z\n";

  f.schedule = std::string(kScheduleHeader) + "\n";
  for (int u = 1; u <= 6; ++u) f.schedule += "U" + std::to_string(u) + ",2019-01-05,weekly,144\n";

  f.drops = std::string(kDropsHeader) + "\n";
  auto add = [&](const std::string& unit, Instant t, const char* source, int loading) {
    f.drops += unit + "," + format_instant(t) + "," + source + "," + std::to_string(loading) + "\n";
  };
  const auto hour = std::chrono::hours(1);
  for (int i = 0; i < 4; ++i) add("U1", occ[i] + hour, "sensor", 0);
  for (int i = 0; i < 6; ++i) add("U2", occ[i] + hour, "sensor", 0);
  for (int i = 0; i < 8; ++i) add("U3", occ[i] + hour, i == 2 ? "self_reported" : "sensor", 0);
  for (int i = 0; i < 8; ++i) add("U4", occ[i] + hour, "sensor", i == 0 ? 1 : 0);
  for (int i = 0; i < 8; ++i) add("U5", occ[i] - 20 * hour, "sensor", 0);
  for (int i = 0; i < 8; ++i) {
    if (i != 3) add("U6", occ[i] + 30 * hour, "sensor", 0);
  }

  for (Instant t : occ) f.expected["U1"].emplace_back(t, ExclusionRule::Unplugged);
  f.expected["U2"].emplace_back(occ[5], ExclusionRule::Deactivated);
  f.expected["U3"].emplace_back(occ[2], ExclusionRule::SelfReported);
  f.expected["U4"].emplace_back(occ[0], ExclusionRule::LoadingDose);
  return f;
}

// 200 rows: three informative binary features, a uniform and a normal
// nuisance column, labels drawn from a logistic model.
inline adherence::Dataset boosting_200(std::uint64_t seed = 1) {
  using namespace adherence;
  Rng rng(seed);
  Dataset d;
  d.n_features = 5;
  d.feature_names = {"a", "b", "c", "n1", "n2"};
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(5);
    for (int j = 0; j < 3; ++j) x[static_cast<std::size_t>(j)] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    x[3] = rng.uniform();
    x[4] = rng.normal();
    const double z = 1.5 * x[0] - 1.0 * x[1] + 0.7 * x[2] - 0.4;
    const int y = rng.bernoulli(1.0 / (1.0 + std::exp(-z))) ? 1 : 0;
    d.add_row(x, y);
  }
  return d;
}

// Two features, label = (x0 + 2 x1 > 0.3), with a margin band removed.
inline adherence::Dataset separable(std::size_t n, std::uint64_t seed) {
  using namespace adherence;
  Rng rng(seed);
  Dataset d;
  d.n_features = 2;
  d.feature_names = {"x0", "x1"};
  while (d.n_rows() < n) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double s = a + 2 * b - 0.3;
    if (std::abs(s) < 0.5) continue;
    d.add_row(std::vector<double>{a, b}, s > 0 ? 1 : 0);
  }
  return d;
}

// Full-batch gradient descent on the logistic log-likelihood with a small
// ridge term so the separable optimum stays finite. Bias last.
inline std::vector<double> logistic_regression(const adherence::Dataset& d) {
  std::vector<double> w(d.n_features + 1, 0.0);
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
      double z = w.back();
      for (std::size_t j = 0; j < d.n_features; ++j) z += w[j] * d.at(i, j);
      const double r = 1.0 / (1.0 + std::exp(-z)) - d.y[i];
      for (std::size_t j = 0; j < d.n_features; ++j) g[j] += r * d.at(i, j);
      g.back() += r;
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] -= 0.5 * (g[j] / static_cast<double>(d.n_rows()) + 1e-4 * w[j]);
    }
  }
  return w;
}

// Two Gaussian classes in five dimensions; only x0 and x1 are shifted.
inline adherence::Dataset blobs(std::size_t n, std::uint64_t seed) {
  using namespace adherence;
  Rng rng(seed);
  Dataset d;
  d.n_features = 5;
  for (int j = 0; j < 5; ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    std::vector<double> row(5);
    for (double& v : row) v = rng.normal();
    row[0] += y ? 1.2 : -1.2;
    row[1] += y ? 0.8 : -0.8;
    d.add_row(row, y);
  }
  return d;
}

// Labels after the six-unit CSVs go through load, clean and records.
inline adherence::FleetLabels six_unit_labels(const SixUnits& f) {
  using namespace adherence;
  const RawTables t = load_tables_from_text(f.drops, f.schedule, f.units, f.as_of);
  return label_fleet(to_records(clean(t).tables, f.as_of), f.as_of);
}

// Window rows from a contamination-free generated fleet.
inline std::vector<adherence::FeatureRow> markov_rows(std::size_t n_units, std::uint64_t seed,
                                                      std::size_t k = 6,
                                                      adherence::GeneratorConfig config = {}) {
  using namespace adherence;
  config.n_units = n_units;
  config.seed = seed;
  const GeneratedFleet fleet = generate_fleet(config.clean());
  return fleet_rows(label_fleet(fleet.records, fleet.as_of), k);
}

inline adherence::Dataset markov_dataset(std::size_t n_units, std::uint64_t seed,
                                         std::size_t k = 6) {
  const auto rows = markov_rows(n_units, seed, k);
  return adherence::FeatureSchema::fit(rows, k).encode(rows);
}

// Per-layer relative error between the network's analytic gradient and
// central differences of an independently written loss, on a random
// five-row batch. Biases are randomized too so every parameter matters.
inline std::vector<double> mlp_gradient_errors(const std::vector<int>& sizes, std::uint64_t seed,
                                               double step = 1e-4) {
  using namespace adherence;
  Rng rng(seed);
  Dataset d;
  d.n_features = static_cast<std::size_t>(sizes.front());
  for (std::size_t j = 0; j < d.n_features; ++j) d.feature_names.push_back("x" + std::to_string(j));
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int r = 0; r < 5; ++r) {
    std::vector<double> x(d.n_features);
    for (double& v : x) v = rng.normal();
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    d.add_row(x, y);
    xs.push_back(x);
    ys.push_back(y);
  }
  Mlp net(sizes);
  net.initialize(derive_seed(seed, 1));
  for (double& p : net.params()) p += 0.1 * rng.normal();

  const std::vector<std::size_t> rows{0, 1, 2, 3, 4};
  std::vector<double> analytic;
  net.loss_and_gradient(d, rows, analytic);
  const auto f = [&](const std::vector<double>& theta) { return oracle::mlp_loss(sizes, theta, xs, ys); };
  const std::vector<double> numeric = oracle::numeric_gradient(f, net.params(), step);

  std::vector<double> errors;
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    const std::size_t off = net.layer_offset(l), len = net.layer_size(l);
    errors.push_back(oracle::relative_error(std::span<const double>(analytic).subspan(off, len),
                                            std::span<const double>(numeric).subspan(off, len)));
  }
  return errors;
}

}  // namespace fixture
