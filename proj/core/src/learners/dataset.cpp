#include "adherence/learners/dataset.hpp"

#include <cstdint>
#include <fmt/format.h>
#include <numeric>

#include "adherence/error.hpp"

namespace adherence {

void Dataset::add_row(std::span<const double> values, int label) {
  if (values.size() != n_features) {
    fail(ErrorCode::SchemaMismatch,
         fmt::format("row has {} features, dataset expects {}", values.size(), n_features));
  }
  x.insert(x.end(), values.begin(), values.end());
  y.push_back(label);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.n_features = n_features;
  out.feature_names = feature_names;
  out.x.reserve(rows.size() * n_features);
  out.y.reserve(rows.size());
  for (std::size_t i : rows) {
    const auto r = row(i);
    out.x.insert(out.x.end(), r.begin(), r.end());
    out.y.push_back(y[i]);
  }
  return out;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::accumulate(y.begin(), y.end(), 0LL));
}

std::string Dataset::fingerprint() const { return schema_fingerprint(feature_names); }

// 64-bit FNV-1a over the names, separated by NUL.
std::string schema_fingerprint(const std::vector<std::string>& feature_names) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const std::string& name : feature_names) {
    for (char c : name) feed(static_cast<unsigned char>(c));
    feed(0);
  }
  return fmt::format("{:016x}-{}", h, feature_names.size());
}

}  // namespace adherence
