#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hen {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  NonFinite,
  SvdFailure,
  LookupMiss,
  EmptyTable,
  BlockTooSmall,
  // HENB container
  BadMagic,
  UnsupportedVersion,
  Truncated,
  TrailingBytes,
  DuplicateId,
  // dataset ingestion
  Io,
  MalformedPpm,
  CaptionIdMismatch,
  ImageTooSmall,
  ValueOutOfRange,
  ZeroRank,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (and tests) can tell failure kinds apart without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hen
