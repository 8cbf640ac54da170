#include "morphpiece/error.hpp"

namespace morphpiece {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::ColumnOutOfRange: return "ColumnOutOfRange";
    case ErrorCode::ZeroValidRecords: return "ZeroValidRecords";
    case ErrorCode::EmptyEffectiveCorpus: return "EmptyEffectiveCorpus";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::NonDenseIds: return "NonDenseIds";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::ArtifactMissing: return "ArtifactMissing";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InconsistentArtifacts: return "InconsistentArtifacts";
  }
  return "Unknown";
}

}  // namespace morphpiece
