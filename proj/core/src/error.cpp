#include "adherence/error.hpp"

namespace adherence {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidRegion: return "InvalidRegion";
    case ErrorCode::InvalidTimeline: return "InvalidTimeline";
    case ErrorCode::InvalidFrequency: return "InvalidFrequency";
    case ErrorCode::NonPositiveWindow: return "NonPositiveWindow";
    case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::InvalidSource: return "InvalidSource";
    case ErrorCode::EmptyUnitId: return "EmptyUnitId";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::EmptyHorizon: return "EmptyHorizon";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnreadableFile: return "UnreadableFile";
    case ErrorCode::ForeignKeyViolation: return "ForeignKeyViolation";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::NoScheduledOccasion: return "NoScheduledOccasion";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::SizeTooLarge: return "SizeTooLarge";
    case ErrorCode::UntrainedModel: return "UntrainedModel";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
    case ErrorCode::WrongArity: return "WrongArity";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidRatio:
    case ErrorCode::InvalidHyperparameter:
      return ErrorCategory::Config;
    case ErrorCode::UntrainedModel:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::InsufficientData:
    case ErrorCode::WrongArity:
    case ErrorCode::ModelFormat:
      return ErrorCategory::Model;
    default:
      return ErrorCategory::Data;
  }
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace adherence
