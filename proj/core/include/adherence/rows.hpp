#pragma once

#include <string>
#include <vector>

#include "adherence/domain.hpp"

namespace adherence {

/// Features available at prediction time for one upcoming occasion.
struct PredictionRow {
  std::string unit_id;
  Instant scheduled_time;             // the occasion being predicted
  std::vector<int> drop_history;      // latest-first; index 0 is the latest drop
  std::string frequency;              // CSV spelling, e.g. "weekly"
  std::string region;                 // continent code
};

/// Training/evaluation row: prediction-time features plus the realised label.
struct FeatureRow : PredictionRow {
  AdherenceLabel target = AdherenceLabel::NotOnTime;
};

}  // namespace adherence
