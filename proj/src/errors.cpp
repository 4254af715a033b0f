#include "stratvar/errors.hpp"

namespace stratvar {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPartition: return "NonPartition";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::BadTreatedCount: return "BadTreatedCount";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::TooFewStrata: return "TooFewStrata";
    case ErrorCode::SingletonArm: return "SingletonArm";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::LeverageOne: return "LeverageOne";
    case ErrorCode::BadAlpha: return "BadAlpha";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::OddCount: return "OddCount";
    case ErrorCode::MultivariateUnsupported: return "MultivariateUnsupported";
    case ErrorCode::NoCovariates: return "NoCovariates";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "UnknownError";
}

}  // namespace stratvar
