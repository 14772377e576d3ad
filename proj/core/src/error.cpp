#include "hen/error.hpp"

namespace hen {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SvdFailure: return "SvdFailure";
    case ErrorCode::LookupMiss: return "LookupMiss";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::BlockTooSmall: return "BlockTooSmall";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedPpm: return "MalformedPpm";
    case ErrorCode::CaptionIdMismatch: return "CaptionIdMismatch";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::ZeroRank: return "ZeroRank";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace hen
