#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "adherence/ensemble.hpp"
#include "adherence/learners/model.hpp"

namespace adherence {

inline constexpr int kModelFormatVersion = 1;

/// JSON text of a single model: config, schema, and the fitted body (node
/// arrays for trees, flat parameter vector for networks). Doubles are
/// written with round-trip precision.
std::string model_to_json(const TrainedModel& model);
std::string ensemble_to_json(const VotingEnsemble& ensemble);

/// Throw ModelFormat on malformed text, an unknown format tag or version,
/// or an inconsistent body.
TrainedModel model_from_json(std::string_view text);
VotingEnsemble ensemble_from_json(std::string_view text);

void save_ensemble(const VotingEnsemble& ensemble, const std::filesystem::path& path);
/// Throws UnreadableFile when the file cannot be opened.
VotingEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace adherence
