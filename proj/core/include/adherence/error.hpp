#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adherence {

enum class ErrorCode {
  // domain
  InvalidRegion,
  InvalidTimeline,
  InvalidFrequency,
  NonPositiveWindow,
  InvalidTimestamp,
  InvalidSource,
  EmptyUnitId,
  InvalidLabel,
  // labeling
  EmptyHorizon,
  UnsortedInput,
  // ingest
  MissingColumn,
  UnreadableFile,
  ForeignKeyViolation,
  EmptyDataset,
  InsufficientHistory,
  NoScheduledOccasion,
  InvalidRatio,
  // features / metrics
  LengthMismatch,
  SingleClass,
  SizeTooLarge,
  // learners / ensemble
  UntrainedModel,
  NonFiniteLoss,
  SchemaMismatch,
  InsufficientData,
  InvalidHyperparameter,
  WrongArity,
  ModelFormat,
  // synthgen / cli
  InvalidConfig,
  ConfigInvalid,
  Io,
};

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Config, Data, Model };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace adherence
